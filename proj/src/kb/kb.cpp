#include <algorithm>

#include "janus/kb/kb.hpp"

namespace janus::kb {

namespace {

const char* kDemonBuiltins[] = {
    "incident-transfer", "supplier-reservoir", "receiver-node",  "mode-from-means",
    "mode-from-emission", "currents-in-circuit", "circuit-orientation",
};
const char* kRuleBuiltins[] = {
    "required-slots-filled", "transformer-has-throughput",
    "chain-endpoints-are-reservoirs", "no-return-to-start",
};
const char* kFactBuiltins[] = {
    "supplying-reservoir-depletes", "transformer-output-needs-input",
    "modes-require-inflow",
};

template <std::size_t N>
bool contains(const char* const (&table)[N], const std::string& name) {
  for (const char* entry : table)
    if (name == entry) return true;
  return false;
}

}  // namespace

bool is_demon_builtin(const std::string& name) { return contains(kDemonBuiltins, name); }
bool is_rule_builtin(const std::string& name) { return contains(kRuleBuiltins, name); }
bool is_fact_builtin(const std::string& name) { return contains(kFactBuiltins, name); }

const Domain* KbState::find_domain(const std::string& name) const {
  for (const auto& d : domains)
    if (d.name == name) return &d;
  return nullptr;
}

const FeatureTable* KbState::find_table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

const assoc::JanusEntity* KbState::find_janus(const std::string& id) const {
  for (const auto& j : registry)
    if (j.id == id) return &j;
  return nullptr;
}

const Demon* KbState::find_demon_anywhere(const std::string& id) const {
  for (const auto& d : domains)
    if (const Demon* demon = d.find_demon(id)) return demon;
  return nullptr;
}

void KbState::register_domain(Domain d) {
  if (find_domain(d.name))
    throw EngineError("KB-DUP", "domain `" + d.name + "` is already registered");
  domains.push_back(std::move(d));
}

void KbState::register_features(FeatureTable t) {
  if (find_table(t.name))
    throw EngineError("KB-DUP", "feature table `" + t.name + "` is already registered");
  for (const auto& e : t.entries)
    for (const auto& existing : tables)
      if (existing.find(e.term))
        throw EngineError("KB-FEATURE-MISMATCH",
                          "term `" + e.term + "` is already declared by table `" +
                              existing.name + "`");
  tables.push_back(std::move(t));
}

FeatureSet KbState::notional_core(const std::string& term) const {
  FeatureSet core;
  bool found = false;
  for (const auto& t : tables) {
    if (const FeatureEntry* e = t.find(term)) {
      core.insert(e->features.begin(), e->features.end());
      found = true;
    }
  }
  if (found) return core;

  // Resolve through the lexicons: a surface word or a concept name stands
  // for the union of the entries of every word naming that concept.
  auto absorb_concept = [&](const Domain& d, const std::string& concept_name) {
    for (const auto& word : d.words_for(concept_name)) {
      for (const auto& t : tables) {
        if (const FeatureEntry* e = t.find(word)) {
          core.insert(e->features.begin(), e->features.end());
          found = true;
        }
      }
    }
  };
  for (const auto& d : domains) {
    for (const auto& entry : d.lexicon)
      if (entry.word == term) absorb_concept(d, entry.concept_name);
    if (d.find_concept(term)) absorb_concept(d, term);
  }
  if (!found)
    throw EngineError("KB-UNKNOWN-TERM", "no notional core for term `" + term + "`");
  return core;
}

std::vector<Diagnostic> KbState::validate() const {
  std::vector<Diagnostic> out;
  auto report = [&](const std::string& code, const std::string& msg,
                    const std::string& where) {
    out.push_back({code, Severity::Error, msg, where, {0, 0}});
  };
  for (const auto& d : domains) {
    for (const auto& demon : d.demons) {
      const Schema* schema = d.find_concept(demon.schema);
      if (!schema) {
        report("KB-DANGLING-SLOT",
               "demon `" + demon.id + "` targets unknown concept `" + demon.schema + "`",
               d.name);
        continue;
      }
      if (!demon.projects && !schema->find_slot(demon.slot))
        report("KB-DANGLING-SLOT",
               "demon `" + demon.id + "` fills missing slot `" + demon.schema + "." +
                   demon.slot + "`",
               d.name);
      if (!is_demon_builtin(demon.builtin))
        report("KB-UNKNOWN-BUILTIN",
               "demon `" + demon.id + "` uses unknown builtin `" + demon.builtin + "`",
               d.name);
    }
    for (const auto& rule : d.rules)
      if (!is_rule_builtin(rule.builtin))
        report("KB-UNKNOWN-BUILTIN",
               "rule `" + rule.id + "` uses unknown builtin `" + rule.builtin + "`", d.name);
    for (const auto& fact : d.facts)
      if (!is_fact_builtin(fact.builtin))
        report("KB-UNKNOWN-CONSEQUENCE",
               "fact `" + fact.id + "` asserts unknown consequence kind `" + fact.builtin +
                   "`",
               d.name);
    for (const auto& entry : d.lexicon)
      if (!d.find_concept(entry.concept_name))
        report("KB-DANGLING-SLOT",
               "lexicon word `" + entry.word + "` names unknown concept `" +
                   entry.concept_name + "`",
               d.name);
  }
  for (const auto& t : tables)
    for (const auto& e : t.entries)
      if (e.features.empty())
        report("KB-FEATURE-MISMATCH", "term `" + e.term + "` declares no features", t.name);
  return out;
}

namespace {

void apply_one(KbState& kb, const KbEdit& edit) {
  if (const auto* form = std::get_if<EditFormRegistry>(&edit)) {
    for (const auto& j : form->entities) {
      if (kb.find_janus(j.id)) continue;  // idempotent per pair
      kb.registry.push_back(j);
    }
    return;
  }
  if (const auto* split = std::get_if<EditDifferentiate>(&edit)) {
    assoc::JanusEntity* found = nullptr;
    for (auto& j : kb.registry)
      if (j.id == split->janus_id) found = &j;
    if (!found)
      throw EngineError("LEARN-ALREADY-SPLIT",
                        "janus entity `" + split->janus_id + "` is not in the registry");
    if (found->differentiated)
      throw EngineError("LEARN-ALREADY-SPLIT",
                        "janus entity `" + split->janus_id + "` is already differentiated");
    found->differentiated = true;
    for (const auto& demon_id : split->blocked_demons) {
      for (auto& d : kb.domains) {
        for (auto& demon : d.demons) {
          if (demon.id != demon_id) continue;
          auto& blocked = demon.blocked_contexts;
          if (std::find(blocked.begin(), blocked.end(), split->target_domain) ==
              blocked.end())
            blocked.push_back(split->target_domain);
        }
      }
    }
    return;
  }
  if (const auto* rebind = std::get_if<EditRebind>(&edit)) {
    kb.bind_overrides[rebind->entity] = rebind->to_concept;
    kb.rebinds_tried.emplace_back(rebind->entity, rebind->to_concept);
    return;
  }
  const auto& spec = std::get<EditSpecialize>(edit);
  for (auto& d : kb.domains) {
    if (d.name != spec.domain) continue;
    if (d.find_concept(spec.schema.name))
      throw EngineError("KB-DUP", "concept `" + spec.schema.name + "` already exists in `" +
                                      spec.domain + "`");
    d.concepts.push_back(spec.schema);
    return;
  }
  throw EngineError("KB-DUP", "no domain `" + spec.domain + "` to specialize into");
}

}  // namespace

KbState apply_edit(const KbState& base, const KbEdit& edit) {
  KbState next = base;
  apply_one(next, edit);
  next.version = base.version + 1;
  next.edits.push_back(edit);
  return next;
}

KbState replay_edits(KbState base, const std::vector<KbEdit>& edits) {
  for (const auto& e : edits) base = apply_edit(base, e);
  return base;
}

}  // namespace janus::kb
