#include <algorithm>
#include <set>

#include "internal.hpp"

namespace janus::builder {

using detail::FillValue;
using detail::FireContext;
using detail::SceneIndex;

long& demon_firings() {
  thread_local long count = 0;
  return count;
}

std::vector<std::string> provenance_tags(const std::string& fact_id, const Provenance& p) {
  switch (p.tag) {
    case Provenance::Tag::Native:
      return {p.demon.empty() ? "native:" + p.domain : "native:" + p.domain + "." + p.demon};
    case Provenance::Tag::Borrowed: {
      std::vector<std::string> tags{"janus:" + p.janus};
      if (!p.demon.empty()) tags.push_back("demon:" + p.domain + "." + p.demon);
      return tags;
    }
    case Provenance::Tag::Default:
      return {"default:" + fact_id};
    case Provenance::Tag::Postulated:
      return {"postulated:" + fact_id};
  }
  return {};
}

namespace {

/// Feature table that declares (directly or through the lexicon) the term's
/// notional entry; names the lender on janus-mediated binds.
std::string home_table(const kb::KbState& kb, const std::string& term) {
  for (const auto& t : kb.tables)
    if (t.find(term)) return t.name;
  for (const auto& d : kb.domains) {
    std::vector<std::string> words;
    for (const auto& entry : d.lexicon)
      if (entry.word == term) words = d.words_for(entry.concept_name);
    if (words.empty() && d.find_concept(term)) words = d.words_for(term);
    for (const auto& w : words)
      for (const auto& t : kb.tables)
        if (t.find(w)) return t.name;
  }
  return "";
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ",";
    out += p;
  }
  return out;
}

std::vector<std::string> split(const std::string& joined) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= joined.size() && !joined.empty()) {
    std::size_t comma = joined.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(joined.substr(start));
      break;
    }
    out.push_back(joined.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string tag_word(Provenance::Tag tag) {
  switch (tag) {
    case Provenance::Tag::Native: return "native";
    case Provenance::Tag::Borrowed: return "borrowed";
    case Provenance::Tag::Default: return "default";
    case Provenance::Tag::Postulated: return "postulated";
  }
  return "";
}

Provenance prov_from_detail(const std::map<std::string, std::string>& d) {
  Provenance p;
  auto get = [&](const char* k) {
    auto it = d.find(k);
    return it == d.end() ? std::string() : it->second;
  };
  std::string tag = get("tag");
  if (tag == "borrowed") p.tag = Provenance::Tag::Borrowed;
  else if (tag == "default") p.tag = Provenance::Tag::Default;
  else if (tag == "postulated") p.tag = Provenance::Tag::Postulated;
  else p.tag = Provenance::Tag::Native;
  p.domain = get("domain");
  p.demon = get("demon");
  p.janus = get("janus");
  return p;
}

void put_prov(std::map<std::string, std::string>& detail, const Provenance& p) {
  detail["tag"] = tag_word(p.tag);
  if (!p.domain.empty()) detail["domain"] = p.domain;
  if (!p.demon.empty()) detail["demon"] = p.demon;
  if (!p.janus.empty()) detail["janus"] = p.janus;
}

/// First edge-kind concept of the target domain: the transfer type that flow
/// fills materialize.
const kb::Schema* transfer_concept(const kb::Domain& target) {
  for (const auto& c : target.concepts)
    if (c.kind == kb::ConceptKind::Edge) return &c;
  return nullptr;
}

/// Applies one slot fill — plus any edge orientation or materialization it
/// carries — identically for live builds and trace replays.
void apply_fill(InterpretationModel& model, bool owner_is_edge, const std::string& owner_id,
                const std::string& slot_name, const std::string& value, bool orients,
                const Provenance& prov, const std::string& mat_edge,
                const std::string& mat_concept, const std::string& mat_from,
                const std::string& mat_to, const std::vector<std::string>& mat_means) {
  model.slots[owner_id + "." + slot_name] = value;
  std::string fact =
      (owner_is_edge ? "attr:" : "slot:") + owner_id + "." + slot_name;
  model.provenance[fact] = prov;
  if (owner_is_edge && orients) {
    for (auto& e : model.edges) {
      if (e.id != owner_id) continue;
      auto arrow = value.find("->");
      std::string from = value.substr(0, arrow);
      std::string to = value.substr(arrow + 2);
      e.from = from;
      e.to = to;
      e.directed = true;
    }
  }
  if (!mat_edge.empty()) {
    ModelEdge e;
    e.id = mat_edge;
    e.concept_name = mat_concept;
    e.from = mat_from;
    e.to = mat_to;
    e.directed = true;
    e.means = mat_means;
    model.edges.push_back(e);
    model.provenance["edge:" + mat_edge] = prov;
    model.slots[mat_edge + ".direction"] = mat_from + "->" + mat_to;
    model.provenance["attr:" + mat_edge + ".direction"] = prov;
  }
}

void set_modes_from_value(InterpretationModel& model, const std::string& owner_id,
                          const std::string& slot_name, const std::string& value) {
  if (slot_name != "mode") return;
  for (auto& e : model.edges)
    if (e.id == owner_id)
      for (const auto& m : split(value)) e.modes.insert(m);
}

/// Recomputes the completeness summary: required slots of every bound
/// element, then the coverage of salient entities.
void finalize(InterpretationModel& model, const kb::Domain& target) {
  model.unfilled.clear();
  auto sweep = [&](const std::string& owner_id, const std::string& concept_name) {
    const kb::Schema* schema = target.find_concept(concept_name);
    if (!schema) return;
    for (const auto& slot : schema->slots) {
      if (slot.necessity != kb::Necessity::Required) continue;
      if (model.slots.count(owner_id + "." + slot.name)) continue;
      model.unfilled.push_back(owner_id + "." + slot.name);
    }
  };
  for (const auto& e : model.edges) sweep(e.id, e.concept_name);
  for (const auto& n : model.nodes) sweep(n.id, n.concept_name);
  model.complete =
      model.unfilled.empty() && model.unbound.empty() && !model.nodes.empty();
}

struct EventSink {
  BuildTrace* trace;
  BuildEvent& emit(BuildEvent::Kind kind) {
    BuildEvent e;
    e.step = static_cast<int>(trace->events.size()) + 1;
    e.kind = kind;
    trace->events.push_back(e);
    return trace->events.back();
  }
};

void record_borrowing(std::vector<assoc::Borrowing>& borrowings,
                      const assoc::Borrowing& b) {
  if (std::find(borrowings.begin(), borrowings.end(), b) == borrowings.end())
    borrowings.push_back(b);
}

}  // namespace

std::vector<assoc::JanusEntity> form_registry(const kb::SceneGraph& scene,
                                              const kb::Domain& target,
                                              const std::vector<const kb::Domain*>& sources,
                                              const Score& threshold,
                                              const kb::KbState& kb) {
  // Candidate pool: distinct scene categories plus one surface word per
  // source-domain concept, kept only when a notional core exists.
  std::vector<std::string> candidates;
  auto add = [&](const std::string& term) {
    if (std::find(candidates.begin(), candidates.end(), term) != candidates.end()) return;
    try {
      kb.notional_core(term);
    } catch (const EngineError&) {
      return;
    }
    candidates.push_back(term);
  };
  for (const auto& e : scene.entities) add(e.category);
  for (const kb::Domain* src : sources)
    for (const auto& c : src->concepts) add(src->surface_word(c.name));

  std::vector<assoc::JanusEntity> out;
  for (const auto& concept_schema : target.concepts) {
    FeatureSet core;
    try {
      core = kb.notional_core(concept_schema.name);
    } catch (const EngineError&) {
      continue;  // concept has no notional presence; nothing to associate
    }
    auto ranked = assoc::propose_janus(concept_schema.name, candidates, threshold, kb);
    for (auto& j : ranked) out.push_back(std::move(j));
  }
  return out;
}

InterpretationModel bind_roles(const kb::SceneGraph& scene, const kb::Domain& target,
                               const kb::KbState& kb, const RunConfig& config,
                               BuildTrace& trace, std::vector<assoc::Borrowing>& borrowings) {
  InterpretationModel model;
  model.scene = scene.name;
  model.target = target.name;
  SceneIndex index = SceneIndex::build(scene, kb);
  EventSink sink{&trace};

  auto bind_to = [&](const kb::SceneEntity& entity, const std::string& concept_name,
                     const Provenance& prov) {
    const kb::Schema* schema = target.find_concept(concept_name);
    BuildEvent& ev = sink.emit(BuildEvent::Kind::Bind);
    ev.detail["entity"] = entity.id;
    ev.detail["category"] = entity.category;
    ev.detail["concept"] = concept_name;
    put_prov(ev.detail, prov);
    if (schema->kind == kb::ConceptKind::Aux) {
      ev.detail["kind"] = "aux";
      model.aux.push_back({entity.id, concept_name});
      model.provenance["aux:" + entity.id] = prov;
    } else {
      ev.detail["kind"] = "node";
      model.nodes.push_back({entity.id, concept_name, entity.id, false});
      model.provenance["node:" + entity.id] = prov;
    }
  };
  auto leave_unbound = [&](const kb::SceneEntity& entity, const std::string& reason) {
    BuildEvent& ev = sink.emit(BuildEvent::Kind::Bind);
    ev.detail["entity"] = entity.id;
    ev.detail["category"] = entity.category;
    ev.detail["kind"] = "unbound";
    if (!reason.empty()) ev.detail["reason"] = reason;
    model.unbound.push_back(entity.id);
  };

  for (const auto& entity : scene.entities) {
    if (entity.saliency < config.saliency_threshold) continue;

    // Repair overrides take precedence over fresh matching.
    auto override_it = kb.bind_overrides.find(entity.id);
    if (override_it != kb.bind_overrides.end()) {
      if (override_it->second.empty()) {
        leave_unbound(entity, "override");
      } else {
        Provenance prov{Provenance::Tag::Native, target.name, "rebind", ""};
        bind_to(entity, override_it->second, prov);
      }
      continue;
    }

    // Native: the category is a target lexicon word for a node/aux concept.
    const kb::Schema* native = nullptr;
    for (const auto& entry : target.lexicon) {
      if (entry.word != entity.category) continue;
      const kb::Schema* s = target.find_concept(entry.concept_name);
      if (s && s->kind != kb::ConceptKind::Edge) {
        native = s;
        break;
      }
    }
    if (native) {
      Provenance prov{Provenance::Tag::Native, target.name, "lexicon", ""};
      bind_to(entity, native->name, prov);
      continue;
    }

    // Janus: best-scoring active association whose source face is the
    // category; earlier registry rank wins ties.
    const assoc::JanusEntity* best = nullptr;
    for (const auto& j : kb.registry) {
      if (j.differentiated || j.source_face != entity.category) continue;
      const kb::Schema* s = target.find_concept(j.target_face);
      if (!s || s->kind == kb::ConceptKind::Edge) continue;
      if (!best || best->score < j.score) best = &j;
    }
    if (!best) {
      leave_unbound(entity, "");
      continue;
    }
    const kb::Schema* schema = target.find_concept(best->target_face);
    FeatureSet core = index.category_core(entity.id);
    bool viable = true;
    std::vector<assoc::Borrowing> aspects;
    for (const auto& feature : schema->required_features) {
      if (core.count(feature)) continue;
      auto b = assoc::borrow(*best, assoc::Need{assoc::Need::Kind::Aspect, feature}, kb);
      if (!b) {
        leave_unbound(entity, "missing-feature:" + feature);
        viable = false;
        break;
      }
      aspects.push_back(*b);
    }
    if (!viable) continue;
    std::string table = home_table(kb, entity.category);
    for (const auto& aspect : aspects) {
      record_borrowing(borrowings, aspect);
      BuildEvent& ev = sink.emit(BuildEvent::Kind::BorrowFire);
      ev.detail["action"] = "aspect";
      ev.detail["entity"] = entity.id;
      ev.detail["feature"] = aspect.payload;
      ev.detail["janus"] = aspect.janus;
      ev.detail["from"] = aspect.from;
      ev.detail["to"] = aspect.to;
      if (!table.empty()) ev.detail["domain"] = table;
    }
    Provenance prov{Provenance::Tag::Borrowed, table, "", best->id};
    bind_to(entity, best->target_face, prov);
  }

  // Projection imports: active janus entities whose source face names an
  // edge schema let that schema's recognizer demons run for the target.
  FireContext ctx{&model, &scene, &kb, &target, &index};
  for (const auto& j : kb.registry) {
    if (j.differentiated) continue;
    const kb::Schema* target_schema = target.find_concept(j.target_face);
    if (!target_schema || target_schema->kind != kb::ConceptKind::Edge) continue;
    const kb::Domain* home = nullptr;
    const kb::Schema* src_schema = assoc::source_schema(j, kb, &home);
    if (!src_schema || src_schema->kind != kb::ConceptKind::Edge) continue;
    for (const auto& demon : home->demons) {
      if (!demon.projects || demon.schema != src_schema->name) continue;
      if (std::find(demon.blocked_contexts.begin(), demon.blocked_contexts.end(),
                    target.name) != demon.blocked_contexts.end())
        continue;
      for (const auto& found : detail::run_projection_builtin(demon, ctx)) {
        const ModelNode* a = nullptr;
        const ModelNode* b = nullptr;
        for (const auto& n : model.nodes) {
          if (n.bound_entity == found.a) a = &n;
          if (n.bound_entity == found.b) b = &n;
        }
        if (!a || !b) continue;
        ++demon_firings();
        ModelEdge e;
        e.id = "t" + std::to_string(model.edges.size() + 1);
        e.concept_name = j.target_face;
        e.from = a->id;
        e.to = b->id;
        e.means = {found.connector};
        Provenance prov{Provenance::Tag::Borrowed, home->name, demon.id, j.id};
        model.provenance["edge:" + e.id] = prov;
        BuildEvent& ev = sink.emit(BuildEvent::Kind::BorrowFire);
        ev.detail["action"] = "import";
        ev.detail["edge"] = e.id;
        ev.detail["concept"] = e.concept_name;
        ev.detail["from"] = e.from;
        ev.detail["to"] = e.to;
        ev.detail["means"] = join(e.means);
        put_prov(ev.detail, prov);
        model.edges.push_back(std::move(e));
        record_borrowing(borrowings,
                         {j.id, assoc::Borrowing::Kind::Demon, demon.id, j.source_face,
                          j.target_face});
      }
    }
  }
  finalize(model, target);
  return model;
}

namespace {

struct Filler {
  InterpretationModel& model;
  const kb::KbState& kb;
  const kb::Domain& target;
  BuildTrace& trace;
  std::vector<assoc::Borrowing>& borrowings;
  SceneIndex index;
  const kb::SceneGraph* scene;
  std::set<std::string> sterile;  // slots where postulation already refused

  bool filled(const std::string& owner, const std::string& slot) const {
    return model.slots.count(owner + "." + slot) > 0;
  }

  FireContext context() const { return {&model, scene, &kb, &target, &index}; }

  void emit_fill(BuildEvent::Kind kind, bool owner_is_edge, const std::string& owner,
                 const kb::Slot& slot, const FillValue& v, const Provenance& prov) {
    std::string mat_edge, mat_concept;
    std::vector<std::string> mat_means;
    if (v.materialize) {
      const kb::Schema* tc = transfer_concept(target);
      if (tc) {
        mat_edge = "t" + std::to_string(model.edges.size() + 1);
        mat_concept = tc->name;
        mat_means = v.mat_means;
      }
    }
    EventSink sink{&trace};
    BuildEvent& ev = sink.emit(kind);
    ev.detail["owner"] = owner;
    ev.detail["kind"] = owner_is_edge ? "edge" : "node";
    ev.detail["slot"] = slot.name;
    ev.detail["value"] = v.value;
    if (kind == BuildEvent::Kind::BorrowFire) ev.detail["action"] = "fill";
    if (v.orients) ev.detail["orient"] = "1";
    if (!mat_edge.empty()) {
      ev.detail["mat_edge"] = mat_edge;
      ev.detail["mat_concept"] = mat_concept;
      ev.detail["mat_from"] = v.mat_from;
      ev.detail["mat_to"] = v.mat_to;
      ev.detail["mat_means"] = join(mat_means);
    }
    put_prov(ev.detail, prov);
    apply_fill(model, owner_is_edge, owner, slot.name, v.value, v.orients, prov, mat_edge,
               mat_concept, v.mat_from, v.mat_to, mat_means);
    set_modes_from_value(model, owner, slot.name, v.value);
  }

  /// Priority steps 1–2: native demon then borrowed demon. True on a fill.
  bool try_demons(bool owner_is_edge, const std::string& owner_id,
                  const std::string& concept_name, const kb::Slot& slot) {
    const ModelNode* node = owner_is_edge ? nullptr : model.find_node(owner_id);
    const ModelEdge* edge = owner_is_edge ? model.find_edge(owner_id) : nullptr;
    FireContext ctx = context();

    for (const auto& demon : target.demons) {
      if (demon.projects || demon.schema != concept_name || demon.slot != slot.name)
        continue;
      if (std::find(demon.blocked_contexts.begin(), demon.blocked_contexts.end(),
                    target.name) != demon.blocked_contexts.end())
        continue;
      auto v = detail::run_slot_builtin(demon, node, edge, slot, ctx);
      if (!v) continue;
      ++demon_firings();
      Provenance prov{Provenance::Tag::Native, target.name, demon.id, ""};
      emit_fill(BuildEvent::Kind::Fill, owner_is_edge, owner_id, slot, *v, prov);
      return true;
    }

    for (const auto& j : kb.registry) {
      if (j.differentiated || j.target_face != concept_name) continue;
      auto b = assoc::borrow(j, assoc::Need{assoc::Need::Kind::Slot, slot.name}, kb);
      if (!b) continue;
      const kb::Domain* home = nullptr;
      const kb::Schema* src_schema = assoc::source_schema(j, kb, &home);
      if (!src_schema) continue;
      const kb::Demon* demon = home->find_demon(b->payload);
      if (!demon) continue;
      if (std::find(demon->blocked_contexts.begin(), demon->blocked_contexts.end(),
                    target.name) != demon->blocked_contexts.end())
        continue;
      auto v = detail::run_slot_builtin(*demon, node, edge, slot, ctx);
      if (!v) continue;
      ++demon_firings();
      Provenance prov{Provenance::Tag::Borrowed, home->name, demon->id, j.id};
      emit_fill(BuildEvent::Kind::BorrowFire, owner_is_edge, owner_id, slot, *v, prov);
      record_borrowing(borrowings, *b);
      return true;
    }
    return false;
  }

  /// One sweep of demon-driven filling: edges in creation order, nodes in
  /// binding order, slots in declaration order.
  bool demon_pass() {
    bool any = false;
    for (std::size_t i = 0; i < model.edges.size(); ++i) {
      const kb::Schema* schema = target.find_concept(model.edges[i].concept_name);
      if (!schema) continue;
      for (const auto& slot : schema->slots) {
        std::string owner = model.edges[i].id;
        if (filled(owner, slot.name)) continue;
        if (try_demons(true, owner, model.edges[i].concept_name, slot)) any = true;
      }
    }
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
      const kb::Schema* schema = target.find_concept(model.nodes[i].concept_name);
      if (!schema) continue;
      for (const auto& slot : schema->slots) {
        std::string owner = model.nodes[i].id;
        if (filled(owner, slot.name)) continue;
        if (try_demons(false, owner, model.nodes[i].concept_name, slot)) any = true;
      }
    }
    return any;
  }

  bool apply_defaults() {
    bool any = false;
    auto sweep = [&](bool owner_is_edge, const std::string& owner_id,
                     const std::string& concept_name) {
      const kb::Schema* schema = target.find_concept(concept_name);
      if (!schema) return;
      for (const auto& slot : schema->slots) {
        if (filled(owner_id, slot.name) || !slot.default_value) continue;
        FillValue v;
        v.value = *slot.default_value;
        Provenance prov{Provenance::Tag::Default, "", "", ""};
        emit_fill(BuildEvent::Kind::Default, owner_is_edge, owner_id, slot, v, prov);
        any = true;
      }
    };
    for (std::size_t i = 0; i < model.edges.size(); ++i)
      sweep(true, model.edges[i].id, model.edges[i].concept_name);
    for (std::size_t i = 0; i < model.nodes.size(); ++i)
      sweep(false, model.nodes[i].id, model.nodes[i].concept_name);
    return any;
  }

  /// Step 4 for the first eligible empty slot: hypothesize the unique
  /// postulable occupant. Ambiguity makes the slot sterile, reported in the
  /// trace rather than guessed around.
  bool try_postulation() {
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
      const ModelNode owner = model.nodes[i];
      const kb::Schema* schema = target.find_concept(owner.concept_name);
      if (!schema) continue;
      for (const auto& slot : schema->slots) {
        if (filled(owner.id, slot.name) || !slot.postulation_allowed) continue;
        if (slot.constraint.kind != kb::SlotConstraint::Kind::Names) continue;
        std::string key = owner.id + "." + slot.name;
        if (sterile.count(key)) continue;
        std::vector<const kb::Schema*> fits;
        for (const auto& name : slot.constraint.names) {
          const kb::Schema* c = target.find_concept(name);
          if (c && c->postulable) fits.push_back(c);
        }
        if (fits.size() != 1) {
          sterile.insert(key);
          EventSink sink{&trace};
          BuildEvent& ev = sink.emit(BuildEvent::Kind::Postulate);
          ev.detail["owner"] = owner.id;
          ev.detail["slot"] = slot.name;
          ev.detail["outcome"] = fits.empty() ? "no-postulable-concept" : "ambiguous";
          continue;
        }
        const kb::Schema* chosen = fits[0];
        std::string node_id =
            chosen->postulate_name.empty() ? chosen->name : chosen->postulate_name;
        const ModelNode* existing = model.find_node(node_id);
        while (existing && !(existing->postulated && existing->concept_name == chosen->name)) {
          node_id += "+";
          existing = model.find_node(node_id);
        }
        if (!existing) {
          Provenance prov{Provenance::Tag::Postulated, "", "", ""};
          model.nodes.push_back({node_id, chosen->name, "", true});
          model.provenance["node:" + node_id] = prov;
          EventSink sink{&trace};
          BuildEvent& ev = sink.emit(BuildEvent::Kind::Postulate);
          ev.detail["node"] = node_id;
          ev.detail["concept"] = chosen->name;
        }
        FillValue v;
        v.value = node_id;
        bool covered = false;
        std::string mfrom = slot.flow == kb::Flow::In ? node_id : owner.id;
        std::string mto = slot.flow == kb::Flow::In ? owner.id : node_id;
        for (const auto& e : model.edges)
          if (e.directed && e.from == mfrom && e.to == mto) covered = true;
        if (slot.flow != kb::Flow::None && !covered) {
          v.materialize = true;
          v.mat_from = mfrom;
          v.mat_to = mto;
        }
        Provenance prov{Provenance::Tag::Postulated, "", "", ""};
        emit_fill(BuildEvent::Kind::Fill, false, owner.id, slot, v, prov);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

void fill_slots(InterpretationModel& model, const kb::SceneGraph& scene,
                const kb::KbState& kb, const kb::Domain& target, const RunConfig& config,
                BuildTrace& trace, std::vector<assoc::Borrowing>& borrowings) {
  (void)config;
  Filler filler{model,      kb,     target, trace, borrowings,
                SceneIndex::build(scene, kb), &scene, {}};
  // Fill ladder as a fixpoint: exhaust demons, then defaults, then a single
  // postulation, until a full round makes no progress.
  while (filler.demon_pass()) {}
  for (;;) {
    if (filler.apply_defaults()) {
      while (filler.demon_pass()) {}
      continue;
    }
    if (filler.try_postulation()) {
      while (filler.demon_pass()) {}
      continue;
    }
    break;
  }
  finalize(model, target);
}

BuildOutput build_model(const kb::SceneGraph& scene, const std::string& target_name,
                        const std::vector<std::string>& source_names,
                        const kb::KbState& kb, const RunConfig& config) {
  BuildOutput out;
  out.kb = kb;
  const kb::Domain* target = out.kb.find_domain(target_name);
  if (!target)
    throw EngineError("CONFIG", "unknown target domain `" + target_name + "`");
  std::vector<const kb::Domain*> sources;
  for (const auto& name : source_names) {
    const kb::Domain* d = out.kb.find_domain(name);
    if (!d) throw EngineError("CONFIG", "unknown source domain `" + name + "`");
    sources.push_back(d);
  }
  if (out.kb.registry.empty()) {
    Score threshold = kb::threshold_score(config.janus_threshold);
    auto entities = form_registry(scene, *target, sources, threshold, out.kb);
    if (!entities.empty())
      out.kb = kb::apply_edit(out.kb, kb::EditFormRegistry{std::move(entities)});
  }
  target = out.kb.find_domain(target_name);
  out.model = bind_roles(scene, *target, out.kb, config, out.trace, out.borrowings);
  fill_slots(out.model, scene, out.kb, *target, config, out.trace, out.borrowings);
  return out;
}

InterpretationModel replay(const BuildTrace& trace, const kb::Domain& target,
                           const std::string& scene_name) {
  InterpretationModel model;
  model.scene = scene_name;
  model.target = target.name;
  auto get = [](const std::map<std::string, std::string>& d, const char* k) {
    auto it = d.find(k);
    return it == d.end() ? std::string() : it->second;
  };
  for (const auto& ev : trace.events) {
    const auto& d = ev.detail;
    switch (ev.kind) {
      case BuildEvent::Kind::Bind: {
        std::string kind = get(d, "kind");
        if (kind == "unbound") {
          model.unbound.push_back(get(d, "entity"));
        } else if (kind == "aux") {
          model.aux.push_back({get(d, "entity"), get(d, "concept")});
          model.provenance["aux:" + get(d, "entity")] = prov_from_detail(d);
        } else {
          model.nodes.push_back({get(d, "entity"), get(d, "concept"), get(d, "entity"), false});
          model.provenance["node:" + get(d, "entity")] = prov_from_detail(d);
        }
        break;
      }
      case BuildEvent::Kind::BorrowFire: {
        std::string action = get(d, "action");
        if (action == "import") {
          ModelEdge e;
          e.id = get(d, "edge");
          e.concept_name = get(d, "concept");
          e.from = get(d, "from");
          e.to = get(d, "to");
          e.means = split(get(d, "means"));
          model.provenance["edge:" + e.id] = prov_from_detail(d);
          model.edges.push_back(std::move(e));
        } else if (action == "fill") {
          apply_fill(model, get(d, "kind") == "edge", get(d, "owner"), get(d, "slot"),
                     get(d, "value"), get(d, "orient") == "1", prov_from_detail(d),
                     get(d, "mat_edge"), get(d, "mat_concept"), get(d, "mat_from"),
                     get(d, "mat_to"), split(get(d, "mat_means")));
          set_modes_from_value(model, get(d, "owner"), get(d, "slot"), get(d, "value"));
        }
        // aspect borrowings carry no model change
        break;
      }
      case BuildEvent::Kind::Fill:
      case BuildEvent::Kind::Default: {
        apply_fill(model, get(d, "kind") == "edge", get(d, "owner"), get(d, "slot"),
                   get(d, "value"), get(d, "orient") == "1", prov_from_detail(d),
                   get(d, "mat_edge"), get(d, "mat_concept"), get(d, "mat_from"),
                   get(d, "mat_to"), split(get(d, "mat_means")));
        set_modes_from_value(model, get(d, "owner"), get(d, "slot"), get(d, "value"));
        break;
      }
      case BuildEvent::Kind::Postulate: {
        if (d.count("node")) {
          model.nodes.push_back({get(d, "node"), get(d, "concept"), "", true});
          model.provenance["node:" + get(d, "node")] =
              Provenance{Provenance::Tag::Postulated, "", "", ""};
        }
        // sterile-postulation events record a refusal, not a node
        break;
      }
    }
  }
  finalize(model, target);
  return model;
}

std::string chain_notation(const InterpretationModel& model, const kb::Domain& target) {
  if (model.nodes.empty()) return "(empty interpretation)";

  auto node_label = [&](const std::string& id) {
    const ModelNode* n = model.find_node(id);
    std::string label = "[" + id + ":" + (n ? n->concept_name : "?");
    if (n && n->postulated) label += "*";
    return label + "]";
  };
  auto mode_words = [&](const ModelEdge& e) {
    std::vector<std::string> words;
    for (const auto& m : e.modes) words.push_back(target.surface_word(m));
    std::sort(words.begin(), words.end());
    return join(words);
  };

  std::vector<const ModelEdge*> remaining;
  for (const auto& e : model.edges)
    if (e.directed) remaining.push_back(&e);

  std::set<std::string> rendered_nodes;
  std::string out;
  auto append_line = [&](const std::string& line) {
    if (!out.empty()) out += "\n";
    out += line;
  };

  auto has_in = [&](const std::string& id) {
    for (const ModelEdge* e : remaining)
      if (e->to == id) return true;
    return false;
  };
  auto has_out = [&](const std::string& id) {
    for (const ModelEdge* e : remaining)
      if (e->from == id) return true;
    return false;
  };
  auto take_out_edge = [&](const std::string& id) -> const ModelEdge* {
    const ModelEdge* best = nullptr;
    for (const ModelEdge* e : remaining)
      if (e->from == id && (!best || e->id < best->id)) best = e;
    if (best)
      remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    return best;
  };

  while (!remaining.empty()) {
    // Prefer a genuine chain start; a pure cycle starts at the first node in
    // binding order that still has an outgoing edge.
    const ModelNode* start = nullptr;
    for (const auto& n : model.nodes)
      if (has_out(n.id) && !has_in(n.id)) {
        start = &n;
        break;
      }
    if (!start)
      for (const auto& n : model.nodes)
        if (has_out(n.id)) {
          start = &n;
          break;
        }
    if (!start) break;
    std::string line = node_label(start->id);
    rendered_nodes.insert(start->id);
    std::string cur = start->id;
    while (const ModelEdge* e = take_out_edge(cur)) {
      line += " -(" + mode_words(*e) + ")-> " + node_label(e->to);
      rendered_nodes.insert(e->to);
      cur = e->to;
    }
    append_line(line);
  }

  for (const auto& e : model.edges) {
    if (e.directed) continue;
    append_line(node_label(e.from) + " -(" + mode_words(e) + ")- " + node_label(e.to));
    rendered_nodes.insert(e.from);
    rendered_nodes.insert(e.to);
  }

  for (const auto& n : model.nodes)
    if (!rendered_nodes.count(n.id)) append_line(node_label(n.id));

  return out;
}

}  // namespace janus::builder
