#include "janus/trace/trace.hpp"

#include <fstream>
#include <sstream>

namespace janus::trace {

namespace {

const char* tag_name(builder::Provenance::Tag t) {
  switch (t) {
    case builder::Provenance::Tag::Native:
      return "native";
    case builder::Provenance::Tag::Borrowed:
      return "borrowed";
    case builder::Provenance::Tag::Default:
      return "default";
    case builder::Provenance::Tag::Postulated:
      return "postulated";
  }
  return "native";
}

const char* event_kind_name(builder::BuildEvent::Kind k) {
  switch (k) {
    case builder::BuildEvent::Kind::Bind:
      return "bind";
    case builder::BuildEvent::Kind::Fill:
      return "fill";
    case builder::BuildEvent::Kind::BorrowFire:
      return "borrow-fire";
    case builder::BuildEvent::Kind::Default:
      return "default";
    case builder::BuildEvent::Kind::Postulate:
      return "postulate";
  }
  return "bind";
}

const char* violation_kind_name(checker::ViolationKind k) {
  switch (k) {
    case checker::ViolationKind::Syntactic:
      return "syntactic";
    case checker::ViolationKind::Integrity:
      return "integrity";
    case checker::ViolationKind::Adequacy:
      return "adequacy";
  }
  return "syntactic";
}

Json document_shell(const std::vector<InputFile>& inputs, const std::string& scene,
                    const std::string& target, const std::vector<std::string>& sources,
                    const RunConfig& config) {
  Json doc;
  doc["schema_version"] = "trace/1";
  doc["scene"] = scene;
  doc["target"] = target;
  doc["sources"] = sources;
  doc["config"] = config_json(config);
  Json ins = Json::array();
  for (const auto& in : inputs)
    ins.push_back(Json{{"path", in.path}, {"digest", digest_hex(in.content)}});
  doc["inputs"] = std::move(ins);
  return doc;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string digest_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

InputFile read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EngineError("IO-READ", "cannot read `" + path + "`");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return {path, buffer.str()};
}

Json score_json(const Score& s) { return Json{{"num", s.num}, {"den", s.den}}; }

Json registry_json(const std::vector<assoc::JanusEntity>& registry) {
  Json out = Json::array();
  for (const auto& j : registry) {
    int with_same_target = 0;
    for (const auto& other : registry)
      if (other.target_face == j.target_face) ++with_same_target;
    out.push_back(Json{{"id", j.id},
                       {"target_face", j.target_face},
                       {"source_face", j.source_face},
                       {"score", score_json(j.score)},
                       {"shared_features", j.shared_features},
                       {"status", j.differentiated ? "differentiated" : "active"},
                       {"multi_association", with_same_target > 1}});
  }
  return out;
}

Json model_json(const builder::InterpretationModel& model) {
  Json doc;
  doc["schema_version"] = "model/1";
  doc["scene"] = model.scene;
  doc["target"] = model.target;
  doc["complete"] = model.complete;

  Json nodes = Json::array();
  for (const auto& n : model.nodes)
    nodes.push_back(Json{{"id", n.id},
                         {"concept", n.concept_name},
                         {"entity", n.bound_entity},
                         {"postulated", n.postulated}});
  doc["nodes"] = std::move(nodes);

  Json edges = Json::array();
  for (const auto& e : model.edges)
    edges.push_back(Json{{"id", e.id},
                         {"concept", e.concept_name},
                         {"from", e.from},
                         {"to", e.to},
                         {"directed", e.directed},
                         {"modes", e.modes},
                         {"means", e.means}});
  doc["edges"] = std::move(edges);

  Json aux = Json::array();
  for (const auto& a : model.aux)
    aux.push_back(Json{{"id", a.id}, {"concept", a.concept_name}});
  doc["aux"] = std::move(aux);

  doc["slots"] = model.slots;
  doc["unbound"] = model.unbound;
  doc["unfilled"] = model.unfilled;

  Json prov = Json::object();
  for (const auto& [fact, p] : model.provenance) {
    Json entry{{"tag", tag_name(p.tag)}};
    if (!p.domain.empty()) entry["domain"] = p.domain;
    if (!p.demon.empty()) entry["demon"] = p.demon;
    if (!p.janus.empty()) entry["janus"] = p.janus;
    prov[fact] = std::move(entry);
  }
  doc["provenance"] = std::move(prov);
  return doc;
}

Json events_json(const builder::BuildTrace& trace) {
  Json out = Json::array();
  for (const auto& e : trace.events)
    out.push_back(Json{{"step", e.step}, {"kind", event_kind_name(e.kind)},
                       {"detail", e.detail}});
  return out;
}

Json borrowings_json(const std::vector<assoc::Borrowing>& borrowings) {
  Json out = Json::array();
  for (const auto& b : borrowings)
    out.push_back(Json{{"janus", b.janus},
                       {"kind", b.kind == assoc::Borrowing::Kind::Demon ? "demon" : "aspect"},
                       {"payload", b.payload},
                       {"from", b.from},
                       {"to", b.to}});
  return out;
}

Json consequences_json(const std::vector<checker::Consequence>& consequences) {
  Json out = Json::array();
  for (const auto& c : consequences)
    out.push_back(Json{{"id", c.id}, {"statement", c.statement},
                       {"derivation", c.derivation}});
  return out;
}

Json violations_json(const std::vector<checker::ViolationReport>& violations) {
  Json out = Json::array();
  for (const auto& v : violations)
    out.push_back(Json{{"id", v.id},
                       {"kind", violation_kind_name(v.kind)},
                       {"constraint", v.constraint},
                       {"message", v.message},
                       {"cites", v.cites},
                       {"evidence", v.evidence},
                       {"implicated", v.implicated}});
  return out;
}

Json edits_json(const std::vector<kb::KbEdit>& edits) {
  Json out = Json::array();
  for (std::size_t i = 0; i < edits.size(); ++i) {
    Json entry;
    entry["version"] = i + 1;  // log replays from version 0
    if (const auto* form = std::get_if<kb::EditFormRegistry>(&edits[i])) {
      entry["kind"] = "form-registry";
      Json ids = Json::array();
      for (const auto& j : form->entities) ids.push_back(j.id);
      entry["entities"] = std::move(ids);
    } else if (const auto* split = std::get_if<kb::EditDifferentiate>(&edits[i])) {
      entry["kind"] = "differentiate";
      entry["janus"] = split->janus_id;
      entry["target"] = split->target_domain;
      entry["blocked"] = split->blocked_demons;
    } else if (const auto* rebind = std::get_if<kb::EditRebind>(&edits[i])) {
      entry["kind"] = "rebind";
      entry["entity"] = rebind->entity;
      entry["from"] = rebind->from_concept;
      entry["to"] = rebind->to_concept;
    } else {
      const auto& spec = std::get<kb::EditSpecialize>(edits[i]);
      entry["kind"] = "specialize";
      entry["domain"] = spec.domain;
      entry["schema"] = spec.schema.name;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

Json action_json(const learn::RepairAction& action) {
  Json out{{"id", action.id}, {"justification", action.justification}};
  switch (action.kind) {
    case learn::RepairAction::Kind::Differentiate:
      out["kind"] = "differentiate";
      out["janus"] = action.janus_id;
      out["target"] = action.target_domain;
      out["blocked"] = action.blocked_demons;
      break;
    case learn::RepairAction::Kind::Rebind:
      out["kind"] = "rebind";
      out["entity"] = action.entity;
      out["from"] = action.from_concept;
      out["to"] = action.to_concept;
      break;
    case learn::RepairAction::Kind::Specialize:
      out["kind"] = "specialize";
      break;
  }
  return out;
}

Json episode_json(const learn::Episode& episode) {
  Json doc;
  doc["schema_version"] = "episode/1";
  doc["outcome"] = learn::outcome_name(episode.outcome);
  doc["final_version"] = episode.final_kb.version;
  doc["edits"] = edits_json(episode.edits);
  Json iterations = Json::array();
  for (const auto& it : episode.iterations) {
    Json entry;
    entry["kb_version"] = it.kb_version;
    entry["events"] = events_json(it.trace);
    entry["borrowings"] = borrowings_json(it.borrowings);
    entry["model"] = model_json(it.model);
    entry["consequences"] = consequences_json(it.report.consequences);
    entry["violations"] = violations_json(it.report.violations);
    entry["action"] = it.action ? action_json(*it.action) : Json(nullptr);
    iterations.push_back(std::move(entry));
  }
  doc["iterations"] = std::move(iterations);
  return doc;
}

Json config_json(const RunConfig& config) {
  // Output mode is presentation, not semantics; identical runs that differ
  // only in rendering still produce identical traces.
  return Json{{"saliency_threshold", config.saliency_threshold},
              {"janus_threshold", config.janus_threshold},
              {"budget", config.budget},
              {"seed", config.seed}};
}

Json interpret_document(const std::vector<InputFile>& inputs, const std::string& scene,
                        const std::string& target, const std::vector<std::string>& sources,
                        const RunConfig& config, const builder::BuildOutput& build,
                        const checker::CheckReport& report) {
  Json doc = document_shell(inputs, scene, target, sources, config);
  doc["command"] = "interpret";
  doc["janus"] = registry_json(build.kb.registry);
  doc["build"] = events_json(build.trace);
  doc["borrowings"] = borrowings_json(build.borrowings);
  doc["model"] = model_json(build.model);
  doc["consequences"] = consequences_json(report.consequences);
  doc["violations"] = violations_json(report.violations);
  doc["episode"] = nullptr;
  doc["outcome"] = report.violations.empty() ? "clean" : "violations";
  return doc;
}

Json repair_document(const std::vector<InputFile>& inputs, const std::string& scene,
                     const std::string& target, const std::vector<std::string>& sources,
                     const RunConfig& config, const learn::Episode& episode) {
  Json doc = document_shell(inputs, scene, target, sources, config);
  doc["command"] = "repair";
  doc["janus"] = registry_json(episode.final_kb.registry);
  const learn::Iteration& last = episode.iterations.back();
  doc["build"] = events_json(last.trace);
  doc["borrowings"] = borrowings_json(last.borrowings);
  doc["model"] = model_json(last.model);
  doc["consequences"] = consequences_json(last.report.consequences);
  doc["violations"] = violations_json(last.report.violations);
  doc["episode"] = episode_json(episode);
  doc["outcome"] = learn::outcome_name(episode.outcome);
  return doc;
}

std::string render(const Json& doc) { return doc.dump(2) + "\n"; }

std::string render_text(const builder::InterpretationModel& model,
                        const std::vector<checker::ViolationReport>& violations,
                        const kb::Domain& target) {
  std::ostringstream out;
  out << "scene " << model.scene << " -> " << target.name << "\n";
  out << builder::chain_notation(model, target) << "\n";
  if (violations.empty()) {
    out << "no violations\n";
  } else {
    out << "violations:\n";
    for (const auto& v : violations)
      out << "  " << v.id << " " << violation_kind_name(v.kind) << " " << v.constraint
          << ": " << v.message << "\n";
  }
  return out.str();
}

namespace {

bool type_matches(const Json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "null") return value.is_null();
  return false;
}

void validate(const Json& value, const Json& schema, const std::string& path,
              std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(value, t.get<std::string>());
    } else {
      for (const auto& option : t) ok |= type_matches(value, option.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + t.dump() + ", got " +
                       std::string(value.type_name()));
      return;
    }
  }
  if (schema.contains("const") && value != schema["const"])
    errors.push_back(path + ": expected constant " + schema["const"].dump());
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& option : schema["enum"]) ok |= value == option;
    if (!ok) errors.push_back(path + ": value " + value.dump() + " not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          errors.push_back(path + ": missing required key `" + key.get<std::string>() + "`");
    const Json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    for (const auto& [key, member] : value.items()) {
      if (props && props->contains(key)) {
        validate(member, (*props)[key], path + "/" + key, errors);
      } else if (schema.contains("additionalProperties")) {
        const Json& extra = schema["additionalProperties"];
        if (extra.is_boolean() && !extra.get<bool>())
          errors.push_back(path + ": unexpected key `" + key + "`");
        else if (extra.is_object())
          validate(member, extra, path + "/" + key, errors);
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& member : value)
      validate(member, schema["items"], path + "/" + std::to_string(i++), errors);
  }
}

}  // namespace

std::vector<std::string> schema_errors(const Json& doc, const Json& schema) {
  std::vector<std::string> errors;
  validate(doc, schema, "", errors);
  return errors;
}

}  // namespace janus::trace
