#include "janus/learn/learn.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace janus::learn {

namespace {

using builder::InterpretationModel;
using builder::Provenance;

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

/// How a janus entity shows up in the model: which demons smuggled facts in
/// through it, and which bind facts (node:/aux:) it justified.
struct JanusUse {
  std::vector<std::string> demons;      // sorted unique demon ids
  std::vector<std::string> bind_facts;  // provenance-map order
};

std::map<std::string, JanusUse> janus_uses(const InterpretationModel& model) {
  std::map<std::string, JanusUse> uses;
  for (const auto& [fact, p] : model.provenance) {
    if (p.tag != Provenance::Tag::Borrowed || p.janus.empty()) continue;
    JanusUse& use = uses[p.janus];
    if (!p.demon.empty()) {
      if (!contains(use.demons, p.demon)) use.demons.push_back(p.demon);
    } else if (fact.rfind("node:", 0) == 0 || fact.rfind("aux:", 0) == 0) {
      use.bind_facts.push_back(fact);
    }
  }
  for (auto& [id, use] : uses) std::sort(use.demons.begin(), use.demons.end());
  return uses;
}

/// Active same-category associations strictly weaker than `current`, best
/// first, as rebind fallbacks for an entity of that category.
std::vector<std::string> weaker_faces(const assoc::JanusEntity& current,
                                      const kb::KbState& kb, kb::ConceptKind kind,
                                      const std::string& target_domain) {
  const kb::Domain* target = kb.find_domain(target_domain);
  std::vector<const assoc::JanusEntity*> weaker;
  for (const auto& j : kb.registry) {
    if (j.differentiated || j.source_face != current.source_face) continue;
    if (!(j.score < current.score)) continue;
    const kb::Schema* schema = target ? target->find_concept(j.target_face) : nullptr;
    if (!schema || schema->kind != kind) continue;
    weaker.push_back(&j);
  }
  std::stable_sort(weaker.begin(), weaker.end(),
                   [](const assoc::JanusEntity* a, const assoc::JanusEntity* b) {
                     return b->score < a->score;
                   });
  std::vector<std::string> faces;
  for (const auto* j : weaker) faces.push_back(j->target_face);
  faces.emplace_back("");  // last resort: leave the entity unbound
  return faces;
}

bool attests_equality(const std::vector<kb::Observation>& measurements,
                      const std::string& quantity) {
  for (const auto& obs : measurements)
    if (obs.predicate == "equal" && obs.args.size() == 3 && obs.args[0] == quantity &&
        obs.args[1] == "before" && obs.args[2] == "after")
      return true;
  return false;
}

std::vector<std::string> fillers_of(const PositiveInstance& instance,
                                    const std::string& role) {
  auto it = instance.fillers.find(role);
  return it == instance.fillers.end() ? std::vector<std::string>{} : it->second;
}

}  // namespace

std::vector<RepairAction> diagnose(const std::vector<checker::ViolationReport>& violations,
                                   const InterpretationModel& model,
                                   const kb::KbState& kb) {
  std::map<std::string, JanusUse> uses = janus_uses(model);
  std::vector<RepairAction> actions;

  for (const auto& [janus_id, use] : uses) {
    std::vector<std::string> covered;
    for (const auto& v : violations)
      if (contains(v.implicated, "janus:" + janus_id)) covered.push_back(v.id);
    if (covered.empty()) continue;

    if (!use.demons.empty()) {
      RepairAction a;
      a.kind = RepairAction::Kind::Differentiate;
      a.id = "differentiate:" + janus_id;
      a.janus_id = janus_id;
      a.target_domain = model.target;
      a.blocked_demons = use.demons;
      a.justification = covered;
      actions.push_back(std::move(a));
      continue;
    }

    // Bind-only use: propose rebinding the first cited entity bound via it.
    const assoc::JanusEntity* janus = kb.find_janus(janus_id);
    if (!janus) continue;
    std::string bind_fact;
    for (const auto& v : violations) {
      if (!contains(v.implicated, "janus:" + janus_id)) continue;
      for (const auto& fact : v.cites)
        if (contains(use.bind_facts, fact)) {
          bind_fact = fact;
          break;
        }
      if (!bind_fact.empty()) break;
    }
    if (bind_fact.empty()) continue;
    bool is_node = bind_fact.rfind("node:", 0) == 0;
    std::string entity = bind_fact.substr(bind_fact.find(':') + 1);

    for (const auto& face :
         weaker_faces(*janus, kb, is_node ? kb::ConceptKind::Node : kb::ConceptKind::Aux,
                      model.target)) {
      if (std::find(kb.rebinds_tried.begin(), kb.rebinds_tried.end(),
                    std::make_pair(entity, face)) != kb.rebinds_tried.end())
        continue;
      RepairAction a;
      a.kind = RepairAction::Kind::Rebind;
      a.id = "rebind:" + entity + ":" + face;
      a.entity = entity;
      a.from_concept = janus->target_face;
      a.to_concept = face;
      a.justification = covered;
      actions.push_back(std::move(a));
      break;
    }
  }

  std::stable_sort(actions.begin(), actions.end(),
                   [](const RepairAction& a, const RepairAction& b) {
                     if (a.justification.size() != b.justification.size())
                       return a.justification.size() > b.justification.size();
                     if (a.kind != b.kind)
                       return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                     return a.id < b.id;
                   });
  return actions;
}

kb::KbState apply_action(const RepairAction& action, const kb::KbState& kb) {
  switch (action.kind) {
    case RepairAction::Kind::Differentiate:
      return kb::apply_edit(kb, kb::EditDifferentiate{action.janus_id, action.target_domain,
                                                      action.blocked_demons});
    case RepairAction::Kind::Rebind:
      return kb::apply_edit(
          kb, kb::EditRebind{action.entity, action.from_concept, action.to_concept});
    case RepairAction::Kind::Specialize:
      break;
  }
  throw EngineError("CONFIG", "repair action `" + action.id +
                                  "` carries no knowledge-base edit; call specialize() "
                                  "with the positive instance instead");
}

kb::KbState differentiate(const RepairAction& action, const kb::KbState& kb) {
  if (action.kind != RepairAction::Kind::Differentiate)
    throw EngineError("CONFIG",
                      "differentiate() requires a Differentiate action, got `" + action.id + "`");
  return apply_action(action, kb);
}

PositiveInstance instance_from_node(const InterpretationModel& model,
                                    const kb::SceneGraph& scene,
                                    const std::string& node_id) {
  const builder::ModelNode* node = model.find_node(node_id);
  if (!node)
    throw EngineError("CONFIG", "no node `" + node_id + "` in the model of `" +
                                    model.scene + "`");
  PositiveInstance inst;
  inst.node = node_id;
  inst.fillers["transformer"] = {node->concept_name};

  std::set<std::string> initial;
  std::set<std::string> final_;
  std::string transformee;
  for (const auto& e : model.edges) {
    if (!e.directed) continue;
    if (e.to == node_id) {
      initial.insert(e.modes.begin(), e.modes.end());
      if (transformee.empty()) {
        auto stored = model.slots.find(e.from + ".stores");
        transformee = stored != model.slots.end() ? stored->second : e.concept_name;
      }
    }
    if (e.from == node_id) final_.insert(e.modes.begin(), e.modes.end());
  }
  if (!transformee.empty()) inst.fillers["transformee"] = {transformee};
  if (!initial.empty())
    inst.fillers["initial_state"] = {initial.begin(), initial.end()};
  if (!final_.empty()) inst.fillers["final_state"] = {final_.begin(), final_.end()};

  for (const auto& obs : scene.observations)
    if (obs.predicate == "equal") inst.measurements.push_back(obs);
  return inst;
}

kb::Schema specialize(const kb::Schema& notional, const PositiveInstance& instance) {
  kb::Schema schema;
  schema.name = notional.name;
  schema.level = kb::Level::Conceptual;
  schema.kind = notional.kind;
  schema.required_features = notional.required_features;

  for (const auto& slot : notional.slots) {
    std::vector<std::string> cats = fillers_of(instance, slot.name);
    kb::Slot tightened = slot;
    if (cats.empty()) {
      if (slot.necessity == kb::Necessity::Required)
        throw EngineError("LEARN-NOT-POSITIVE", "role `" + slot.name +
                                                    "` of `" + notional.name +
                                                    "` has no filler in the instance");
      // An optional role the instance never exercised keeps its loose form.
      schema.slots.push_back(std::move(tightened));
      continue;
    }
    switch (slot.constraint.kind) {
      case kb::SlotConstraint::Kind::Any:
        break;
      case kb::SlotConstraint::Kind::Names:
        for (const auto& c : cats)
          if (!contains(slot.constraint.names, c))
            throw EngineError("LEARN-NOT-POSITIVE",
                              "filler `" + c + "` of role `" + slot.name +
                                  "` falls outside the loose constraint");
        break;
      case kb::SlotConstraint::Kind::DistinctFrom:
        if (cats == fillers_of(instance, slot.constraint.other_role))
          throw EngineError("LEARN-NOT-POSITIVE",
                            "role `" + slot.name + "` does not differ from `" +
                                slot.constraint.other_role +
                                "`; the final state must differ from the initial state");
        break;
    }
    tightened.constraint = {kb::SlotConstraint::Kind::Names, cats, ""};
    schema.slots.push_back(std::move(tightened));
  }

  std::set<std::string> quantities;
  for (const auto& obs : instance.measurements)
    if (obs.predicate == "equal" && obs.args.size() == 3 && obs.args[1] == "before" &&
        obs.args[2] == "after")
      quantities.insert(obs.args[0]);
  schema.invariance.assign(quantities.begin(), quantities.end());
  return schema;
}

bool accepts(const kb::Schema& schema, const PositiveInstance& instance) {
  for (const auto& slot : schema.slots) {
    std::vector<std::string> cats = fillers_of(instance, slot.name);
    if (cats.empty()) {
      if (slot.necessity == kb::Necessity::Required) return false;
      continue;
    }
    switch (slot.constraint.kind) {
      case kb::SlotConstraint::Kind::Any:
        break;
      case kb::SlotConstraint::Kind::Names:
        for (const auto& c : cats)
          if (!contains(slot.constraint.names, c)) return false;
        break;
      case kb::SlotConstraint::Kind::DistinctFrom:
        if (cats == fillers_of(instance, slot.constraint.other_role)) return false;
        break;
    }
  }
  for (const auto& quantity : schema.invariance)
    if (!attests_equality(instance.measurements, quantity)) return false;
  return true;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::ValidModel:
      return "valid-model";
    case Outcome::Stuck:
      return "stuck";
    case Outcome::BudgetExhausted:
      return "budget-exhausted";
  }
  return "stuck";
}

Episode repair_loop(const kb::SceneGraph& scene, const std::string& target,
                    const std::vector<std::string>& sources, const kb::KbState& kb,
                    const RunConfig& config) {
  validate_config(config);
  Episode ep;
  kb::KbState current = kb;
  for (int round = 0; round < config.budget; ++round) {
    builder::BuildOutput out = builder::build_model(scene, target, sources, current, config);
    current = std::move(out.kb);
    checker::CheckReport report =
        checker::check_all(out.model, *current.find_domain(target));

    Iteration it;
    it.kb_version = current.version;
    it.model = std::move(out.model);
    it.trace = std::move(out.trace);
    it.borrowings = std::move(out.borrowings);
    it.report = std::move(report);

    if (it.report.violations.empty()) {
      // Nothing to object to; valid only if the model actually got built.
      ep.outcome = it.model.complete ? Outcome::ValidModel : Outcome::Stuck;
      ep.iterations.push_back(std::move(it));
      break;
    }
    std::vector<RepairAction> actions = diagnose(it.report.violations, it.model, current);
    if (actions.empty()) {
      ep.outcome = Outcome::Stuck;
      ep.iterations.push_back(std::move(it));
      break;
    }
    it.action = actions.front();
    ep.iterations.push_back(std::move(it));
    current = apply_action(actions.front(), current);
    if (round + 1 == config.budget) ep.outcome = Outcome::BudgetExhausted;
  }
  ep.edits = current.edits;
  ep.final_kb = std::move(current);
  return ep;
}

}  // namespace janus::learn
