#include <cstdio>
#include <sstream>

#include "janus/dsl/dsl.hpp"

namespace janus::dsl {

namespace {

using kb::ConceptKind;
using kb::ConstraintKind;
using kb::Flow;
using kb::Level;
using kb::Necessity;

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void print_concept(std::ostringstream& out, const kb::Schema& c) {
  out << "  concept " << c.name << ' ';
  out << (c.kind == ConceptKind::Edge ? "edge" : c.kind == ConceptKind::Aux ? "aux" : "node");
  if (c.postulable) {
    out << " postulable";
    if (!c.postulate_name.empty()) out << " as " << c.postulate_name;
  }
  if (c.required_features.empty() && c.invariance.empty() && c.slots.empty()) {
    out << " { }\n";
    return;
  }
  out << " {\n";
  if (!c.required_features.empty())
    out << "    requires " << join(c.required_features, ", ") << '\n';
  if (!c.invariance.empty()) out << "    invariant " << join(c.invariance, ", ") << '\n';
  for (const auto& s : c.slots) {
    out << "    role " << s.name << " : ";
    switch (s.constraint.kind) {
      case kb::SlotConstraint::Kind::Any: out << "any"; break;
      case kb::SlotConstraint::Kind::DistinctFrom:
        out << "distinct-from " << s.constraint.other_role;
        break;
      case kb::SlotConstraint::Kind::Names: out << join(s.constraint.names, " | "); break;
    }
    if (s.flow == Flow::In) out << " flow in";
    if (s.flow == Flow::Out) out << " flow out";
    if (s.default_value) out << " default " << *s.default_value;
    if (s.necessity == Necessity::Optional) out << " optional";
    if (s.postulation_allowed) out << " postulable-ok";
    out << '\n';
  }
  out << "  }\n";
}

void print_demon(std::ostringstream& out, const kb::Demon& d) {
  out << "  demon " << d.id << " {\n";
  if (d.projects) out << "    projects " << d.schema << '\n';
  else out << "    fills " << d.schema << '.' << d.slot << '\n';
  out << "    via " << d.builtin;
  if (!d.feature_param.empty()) out << " feature " << d.feature_param;
  if (!d.value_param.empty()) out << " value " << d.value_param;
  out << '\n';
  if (!d.blocked_contexts.empty())
    out << "    blocked in " << join(d.blocked_contexts, ", ") << '\n';
  out << "  }\n";
}

}  // namespace

std::string serialize(const kb::Domain& d) {
  std::ostringstream out;
  out << "domain " << d.name << " {\n";
  out << "  level " << (d.level_default == Level::Notional ? "notional" : "conceptual") << '\n';
  out << "  operational " << (d.operational ? "true" : "false") << '\n';
  for (const auto& c : d.concepts) {
    out << '\n';
    print_concept(out, c);
  }
  for (const auto& demon : d.demons) {
    out << '\n';
    print_demon(out, demon);
  }
  for (const auto& r : d.rules) {
    out << '\n';
    out << "  rule " << r.id << ' '
        << (r.kind == ConstraintKind::Integrity ? "integrity" : "syntactic") << " {\n";
    out << "    asserts " << r.builtin;
    if (!r.params.empty()) out << " with " << join(r.params, ", ");
    out << '\n';
    out << "    message " << quoted(r.message) << '\n';
    out << "  }\n";
  }
  for (const auto& f : d.facts) {
    out << '\n';
    out << "  fact " << f.id << " {\n";
    out << "    asserts " << f.builtin;
    if (!f.params.empty()) out << " with " << join(f.params, ", ");
    out << '\n';
    out << "    message " << quoted(f.message) << '\n';
    out << "  }\n";
  }
  if (!d.lexicon.empty()) {
    out << "\n  lexicon {\n";
    for (const auto& e : d.lexicon)
      out << "    " << quoted(e.word) << " -> " << e.concept_name << '\n';
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

std::string serialize(const kb::SceneGraph& s) {
  std::ostringstream out;
  if (s.entities.empty() && s.relations.empty() && s.observations.empty())
    return "scene " + s.name + " { }\n";
  out << "scene " << s.name << " {\n";
  for (const auto& e : s.entities)
    out << "  entity " << e.id << " : " << quoted(e.category) << " saliency "
        << number(e.saliency) << '\n';
  if (!s.relations.empty()) out << '\n';
  for (const auto& r : s.relations)
    out << "  relation " << r.label << '(' << r.from << ", " << r.to << ")\n";
  if (!s.observations.empty()) out << '\n';
  for (const auto& o : s.observations) {
    out << "  observe " << o.predicate << '(';
    for (std::size_t i = 0; i < o.args.size(); ++i) {
      if (i) out << ", ";
      // An argument naming a scene entity is a reference; anything else is
      // an opaque word and stays quoted.
      if (s.find_entity(o.args[i])) out << o.args[i];
      else out << quoted(o.args[i]);
    }
    out << ")\n";
  }
  out << "}\n";
  return out.str();
}

std::string serialize(const kb::FeatureTable& t) {
  std::ostringstream out;
  out << "features " << t.name << " {\n";
  out << "  vocabulary " << join(t.vocabulary, ", ") << '\n';
  out << '\n';
  for (const auto& e : t.entries) {
    out << "  term " << quoted(e.term);
    if (e.parent) out << " isa " << quoted(*e.parent);
    out << " : ";
    std::vector<std::string> feats(e.features.begin(), e.features.end());
    out << join(feats, ", ") << '\n';
  }
  out << "}\n";
  return out.str();
}

}  // namespace janus::dsl
