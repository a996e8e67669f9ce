#include "janus/checker/checker.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace janus::checker {

using builder::InterpretationModel;
using builder::ModelEdge;
using builder::ModelNode;

namespace {

/// Storage concepts are the ones that keep a level: their schema declares a
/// `stores` role. Throughput concepts move energy: they declare both an
/// inbound and an outbound flow role.
bool is_storage(const kb::Schema* s) { return s && s->find_slot("stores"); }

bool is_throughput(const kb::Schema* s) {
  if (!s) return false;
  bool in = false, out = false;
  for (const auto& slot : s->slots) {
    if (slot.flow == kb::Flow::In) in = true;
    if (slot.flow == kb::Flow::Out) out = true;
  }
  return in && out;
}

std::vector<const ModelEdge*> edges_in(const InterpretationModel& m, const std::string& id) {
  std::vector<const ModelEdge*> out;
  for (const auto& e : m.edges)
    if (e.directed && e.to == id) out.push_back(&e);
  return out;
}

std::vector<const ModelEdge*> edges_out(const InterpretationModel& m, const std::string& id) {
  std::vector<const ModelEdge*> out;
  for (const auto& e : m.edges)
    if (e.directed && e.from == id) out.push_back(&e);
  return out;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

void cite_edge(std::vector<std::string>& cites, const ModelEdge& e) {
  push_unique(cites, "edge:" + e.id);
  push_unique(cites, "attr:" + e.id + ".direction");
}

/// Owner fact id for an unfilled "<owner>.<role>" entry.
std::string owner_fact(const InterpretationModel& m, const std::string& slot_key) {
  std::string owner = slot_key.substr(0, slot_key.find('.'));
  if (m.find_edge(owner)) return "edge:" + owner;
  for (const auto& a : m.aux)
    if (a.id == owner) return "aux:" + owner;
  return "node:" + owner;
}

/// First directed cycle under deterministic order: nodes in model order,
/// out-edges by edge id. Returns the edges along the cycle.
std::vector<const ModelEdge*> find_cycle(const InterpretationModel& m) {
  std::map<std::string, std::vector<const ModelEdge*>> adj;
  for (const auto& e : m.edges)
    if (e.directed) adj[e.from].push_back(&e);
  for (auto& [id, outs] : adj)
    std::sort(outs.begin(), outs.end(),
              [](const ModelEdge* a, const ModelEdge* b) { return a->id < b->id; });

  std::set<std::string> done;
  std::vector<std::pair<std::string, const ModelEdge*>> path;  // node , edge taken from it

  std::function<std::vector<const ModelEdge*>(const std::string&)> dfs =
      [&](const std::string& node) -> std::vector<const ModelEdge*> {
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i].first != node) continue;
      std::vector<const ModelEdge*> cycle;
      for (std::size_t k = i; k < path.size(); ++k) cycle.push_back(path[k].second);
      return cycle;
    }
    if (done.count(node)) return {};
    auto it = adj.find(node);
    if (it != adj.end()) {
      for (const ModelEdge* e : it->second) {
        path.emplace_back(node, e);
        auto cycle = dfs(e->to);
        path.pop_back();
        if (!cycle.empty()) return cycle;
      }
    }
    done.insert(node);
    return {};
  };

  for (const auto& n : m.nodes) {
    auto cycle = dfs(n.id);
    if (!cycle.empty()) return cycle;
  }
  return {};
}

const Consequence* find_statement(const std::vector<Consequence>& cs,
                                  const std::string& statement) {
  for (const auto& c : cs)
    if (c.statement == statement) return &c;
  return nullptr;
}

}  // namespace

std::vector<Consequence> reinterpret(const InterpretationModel& model,
                                     const kb::Domain& target) {
  std::vector<Consequence> out;
  auto add = [&](const std::string& statement, std::vector<std::string> derivation) {
    Consequence c;
    c.id = "c" + std::to_string(out.size() + 1);
    c.statement = statement;
    c.derivation = std::move(derivation);
    out.push_back(std::move(c));
  };

  // Flow propagation: each directed transfer states a departure and an
  // arrival, derived from the edge and its orientation.
  for (const auto& e : model.edges) {
    if (!e.directed) continue;
    std::vector<std::string> derivation{"edge:" + e.id, "attr:" + e.id + ".direction"};
    add("energy leaves " + e.from, derivation);
    add("energy arrives-at " + e.to, derivation);
  }

  for (const auto& n : model.nodes) {
    auto in = edges_in(model, n.id);
    auto outn = edges_out(model, n.id);
    if (!in.empty() && outn.empty()) {
      std::vector<std::string> derivation{"node:" + n.id};
      for (const ModelEdge* e : in) cite_edge(derivation, *e);
      add(n.id + " receives energy", derivation);
    }
    // Level trends for storage concepts with any incident directed transfer.
    const kb::Schema* schema = target.find_concept(n.concept_name);
    if (!is_storage(schema) || (in.empty() && outn.empty())) continue;
    std::string trend = in.empty()    ? "decreasing"
                        : outn.empty() ? "increasing"
                                       : "non-decreasing";
    std::vector<std::string> derivation{"node:" + n.id};
    for (const auto& e : model.edges)
      if (e.directed && (e.from == n.id || e.to == n.id)) cite_edge(derivation, e);
    add(n.id + " level " + trend, derivation);
  }
  return out;
}

namespace {

/// All bound or postulated elements whose schema matches a predicate.
template <typename Pred>
std::vector<const ModelNode*> nodes_where(const InterpretationModel& m,
                                          const kb::Domain& target, Pred pred) {
  std::vector<const ModelNode*> out;
  for (const auto& n : m.nodes)
    if (pred(target.find_concept(n.concept_name))) out.push_back(&n);
  return out;
}

std::vector<std::string> rule_offences(const InterpretationModel& model,
                                       const kb::Domain& target,
                                       const kb::MetaConstraint& rule) {
  std::vector<std::string> cites;
  if (rule.builtin == "required-slots-filled") {
    for (const auto& key : model.unfilled) push_unique(cites, owner_fact(model, key));
    return cites;
  }
  if (rule.builtin == "transformer-has-throughput") {
    for (const ModelNode* n : nodes_where(model, target, is_throughput)) {
      auto in = edges_in(model, n->id);
      auto out = edges_out(model, n->id);
      if (!in.empty() && !out.empty()) continue;
      push_unique(cites, "node:" + n->id);
      for (const ModelEdge* e : in) cite_edge(cites, *e);
      for (const ModelEdge* e : out) cite_edge(cites, *e);
    }
    return cites;
  }
  if (rule.builtin == "chain-endpoints-are-reservoirs") {
    for (const auto& n : model.nodes) {
      auto in = edges_in(model, n.id);
      auto out = edges_out(model, n.id);
      bool endpoint = (in.empty() && !out.empty()) || (out.empty() && !in.empty());
      if (!endpoint) continue;
      if (is_storage(target.find_concept(n.concept_name))) continue;
      push_unique(cites, "node:" + n.id);
      for (const ModelEdge* e : in) cite_edge(cites, *e);
      for (const ModelEdge* e : out) cite_edge(cites, *e);
    }
    return cites;
  }
  if (rule.builtin == "no-return-to-start") {
    for (const ModelEdge* e : find_cycle(model)) cite_edge(cites, *e);
    return cites;
  }
  throw EngineError("KB-UNKNOWN-BUILTIN", "rule `" + rule.id + "` uses unknown builtin `" +
                                              rule.builtin + "`");
}

}  // namespace

std::vector<ViolationReport> check_syntactic(const InterpretationModel& model,
                                             const kb::Domain& target) {
  std::vector<ViolationReport> out;
  auto run_kind = [&](kb::ConstraintKind kind, ViolationKind reported) {
    for (const auto& rule : target.rules) {
      if (rule.kind != kind) continue;
      auto cites = rule_offences(model, target, rule);
      if (cites.empty()) continue;
      ViolationReport v;
      v.kind = reported;
      v.constraint = target.name + "." + rule.id;
      v.message = rule.message;
      v.cites = std::move(cites);
      out.push_back(std::move(v));
    }
  };
  run_kind(kb::ConstraintKind::Syntactic, ViolationKind::Syntactic);
  run_kind(kb::ConstraintKind::Integrity, ViolationKind::Integrity);
  return out;
}

namespace {

struct FactOffences {
  std::vector<std::string> cites;
  std::vector<std::string> evidence;
};

void take_consequence(FactOffences& off, const Consequence& c) {
  push_unique(off.evidence, c.id);
  for (const auto& fact : c.derivation) push_unique(off.cites, fact);
}

FactOffences fact_offences(const InterpretationModel& model, const kb::Domain& target,
                           const kb::WorldFact& fact,
                           const std::vector<Consequence>& cs) {
  FactOffences off;
  if (fact.builtin == "supplying-reservoir-depletes") {
    for (const ModelNode* n : nodes_where(model, target, is_storage)) {
      const Consequence* leaves = find_statement(cs, "energy leaves " + n->id);
      if (!leaves) continue;
      if (find_statement(cs, n->id + " level decreasing")) continue;
      take_consequence(off, *leaves);
      for (const auto& c : cs)
        if (c.statement.rfind(n->id + " level ", 0) == 0) take_consequence(off, c);
    }
    return off;
  }
  if (fact.builtin == "transformer-output-needs-input") {
    for (const ModelNode* n : nodes_where(model, target, is_throughput)) {
      const Consequence* leaves = find_statement(cs, "energy leaves " + n->id);
      if (!leaves) continue;
      if (find_statement(cs, "energy arrives-at " + n->id)) continue;
      push_unique(off.cites, "node:" + n->id);
      take_consequence(off, *leaves);
    }
    return off;
  }
  if (fact.builtin == "modes-require-inflow") {
    for (const auto& e : model.edges) {
      if (!e.directed) continue;
      bool relevant = false;
      for (const auto& p : fact.params)
        if (e.modes.count(p)) relevant = true;
      if (!relevant) continue;
      if (find_statement(cs, "energy arrives-at " + e.from)) continue;
      push_unique(off.cites, "edge:" + e.id);
      push_unique(off.cites, "attr:" + e.id + ".mode");
      for (const auto& c : cs) {
        bool derived_from_edge =
            std::find(c.derivation.begin(), c.derivation.end(), "edge:" + e.id) !=
            c.derivation.end();
        if (derived_from_edge) take_consequence(off, c);
      }
    }
    return off;
  }
  throw EngineError("KB-UNKNOWN-CONSEQUENCE", "fact `" + fact.id +
                                                  "` uses unknown builtin `" +
                                                  fact.builtin + "`");
}

}  // namespace

std::vector<ViolationReport> check_adequacy(const InterpretationModel& model,
                                            const kb::Domain& target,
                                            const std::vector<Consequence>& consequences) {
  std::vector<ViolationReport> out;
  for (const auto& fact : target.facts) {
    auto off = fact_offences(model, target, fact, consequences);
    if (off.cites.empty()) continue;
    ViolationReport v;
    v.kind = ViolationKind::Adequacy;
    v.constraint = target.name + "." + fact.id;
    v.message = fact.message;
    v.cites = std::move(off.cites);
    v.evidence = std::move(off.evidence);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> implicate(const ViolationReport& violation,
                                   const InterpretationModel& model) {
  std::vector<std::string> borrowed;
  std::vector<std::string> rest;
  for (const auto& fact : violation.cites) {
    auto it = model.provenance.find(fact);
    if (it == model.provenance.end())
      throw EngineError("CHECK-STALE", "violation `" + violation.constraint +
                                           "` cites `" + fact +
                                           "`, which is not in the model");
    for (const auto& tag : builder::provenance_tags(fact, it->second)) {
      bool is_borrowed = tag.rfind("janus:", 0) == 0 || tag.rfind("demon:", 0) == 0;
      push_unique(is_borrowed ? borrowed : rest, tag);
    }
  }
  std::sort(borrowed.begin(), borrowed.end());
  std::sort(rest.begin(), rest.end());
  borrowed.insert(borrowed.end(), rest.begin(), rest.end());
  return borrowed;
}

CheckReport check_all(const InterpretationModel& model, const kb::Domain& target) {
  CheckReport report;
  report.consequences = reinterpret(model, target);
  report.violations = check_syntactic(model, target);
  auto adequacy = check_adequacy(model, target, report.consequences);
  for (auto& v : adequacy) report.violations.push_back(std::move(v));
  for (std::size_t i = 0; i < report.violations.size(); ++i) {
    report.violations[i].id = "v" + std::to_string(i + 1);
    report.violations[i].implicated = implicate(report.violations[i], model);
  }
  return report;
}

}  // namespace janus::checker
