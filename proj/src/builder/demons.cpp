#include <algorithm>
#include <deque>

#include "internal.hpp"

namespace janus::builder::detail {

SceneIndex SceneIndex::build(const kb::SceneGraph& scene, const kb::KbState& kb) {
  SceneIndex idx;
  idx.scene = &scene;
  idx.kb = &kb;
  // An entity that relates to two or more distinct others is a connector;
  // a relation whose first endpoint links only one other is direct contact.
  std::map<std::string, std::vector<std::string>> outgoing;
  for (const auto& rel : scene.relations) {
    auto& targets = outgoing[rel.from];
    if (std::find(targets.begin(), targets.end(), rel.to) == targets.end())
      targets.push_back(rel.to);
  }
  for (const auto& e : scene.entities) {
    auto it = outgoing.find(e.id);
    if (it == outgoing.end()) continue;
    if (it->second.size() >= 2) {
      idx.connectors.push_back(e.id);
      idx.linked[e.id] = it->second;
    } else {
      idx.direct.emplace_back(e.id, it->second.front());
    }
  }
  return idx;
}

bool SceneIndex::is_connector(const std::string& id) const {
  return linked.count(id) > 0;
}

FeatureSet SceneIndex::category_core(const std::string& entity_id) const {
  for (const auto& e : scene->entities) {
    if (e.id != entity_id) continue;
    try {
      return kb->notional_core(e.category);
    } catch (const EngineError&) {
      return {};
    }
  }
  return {};
}

bool SceneIndex::entity_has_feature(const std::string& entity_id,
                                    const std::string& feature) const {
  return category_core(entity_id).count(feature) > 0;
}

bool SceneIndex::adjacent(const std::string& a, const std::string& b) const {
  for (const auto& [x, y] : direct)
    if ((x == a && y == b) || (x == b && y == a)) return true;
  return !means_between(a, b).empty();
}

std::vector<std::string> SceneIndex::means_between(const std::string& a,
                                                   const std::string& b) const {
  std::vector<std::string> out;
  for (const auto& c : connectors) {
    const auto& ends = linked.at(c);
    bool has_a = std::find(ends.begin(), ends.end(), a) != ends.end();
    bool has_b = std::find(ends.begin(), ends.end(), b) != ends.end();
    if (has_a && has_b) out.push_back(c);
  }
  return out;
}

std::vector<SceneIndex::LoopEdge> SceneIndex::loop_connectors(
    const std::string& feature) const {
  // Multigraph: vertices are non-connector entities, edges are two-ended
  // feature-bearing connectors. A connector lies on a cycle iff it is not a
  // bridge: its endpoints stay connected after removing it.
  std::vector<LoopEdge> candidates;
  for (const auto& c : connectors) {
    if (!entity_has_feature(c, feature)) continue;
    const auto& ends = linked.at(c);
    if (ends.size() != 2 || ends[0] == ends[1]) continue;
    candidates.push_back({c, ends[0], ends[1]});
  }
  std::vector<LoopEdge> out;
  for (const auto& cand : candidates) {
    std::deque<std::string> frontier{cand.a};
    std::set<std::string> seen{cand.a};
    bool reconnected = false;
    while (!frontier.empty() && !reconnected) {
      std::string cur = frontier.front();
      frontier.pop_front();
      for (const auto& other : candidates) {
        if (other.connector == cand.connector) continue;
        std::string next;
        if (other.a == cur) next = other.b;
        else if (other.b == cur) next = other.a;
        else continue;
        if (next == cand.b) {
          reconnected = true;
          break;
        }
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
    if (reconnected) out.push_back(cand);
  }
  return out;
}

namespace {

bool admissible(const kb::Slot& slot, const std::string& concept_name) {
  if (slot.constraint.kind != kb::SlotConstraint::Kind::Names) return true;
  const auto& names = slot.constraint.names;
  return std::find(names.begin(), names.end(), concept_name) != names.end();
}

/// True when the node gives energy away on its own account: its category
/// carries `causal-source`, or the scene observes `supplies(entity)`.
bool supplies_evidence(const FireContext& ctx, const ModelNode& node) {
  if (node.bound_entity.empty()) return false;
  if (ctx.index->entity_has_feature(node.bound_entity, "causal-source")) return true;
  for (const auto& obs : ctx.scene->observations)
    if (obs.predicate == "supplies" && !obs.args.empty() &&
        obs.args[0] == node.bound_entity)
      return true;
  return false;
}

/// incident-transfer: a directed edge already touching the owner settles the
/// slot — the unique far endpoint, admissible for the constraint.
std::optional<FillValue> incident_transfer(const ModelNode& owner, const kb::Slot& slot,
                                           const FireContext& ctx) {
  std::vector<std::string> found;
  for (const auto& e : ctx.model->edges) {
    if (!e.directed) continue;
    std::string far;
    if (slot.flow == kb::Flow::In && e.to == owner.id) far = e.from;
    if (slot.flow == kb::Flow::Out && e.from == owner.id) far = e.to;
    if (far.empty()) continue;
    if (std::find(found.begin(), found.end(), far) == found.end()) found.push_back(far);
  }
  if (found.size() != 1) return std::nullopt;
  const ModelNode* far = ctx.model->find_node(found[0]);
  if (!far || !admissible(slot, far->concept_name)) return std::nullopt;
  FillValue v;
  v.value = found[0];
  return v;
}

/// supplier-reservoir: the unique adjacent reservoir that visibly supplies;
/// materializes the incoming transfer if it is not already in the model.
/// The reservoir concept defaults to `Reservoir`; a `value` parameter on the
/// demon overrides it for domains that name theirs differently.
std::optional<FillValue> supplier_reservoir(const kb::Demon& demon, const ModelNode& owner,
                                            const kb::Slot& slot, const FireContext& ctx) {
  if (owner.bound_entity.empty()) return std::nullopt;
  std::string reservoir =
      demon.value_param.empty() ? "Reservoir" : demon.value_param;
  std::vector<const ModelNode*> found;
  for (const auto& n : ctx.model->nodes) {
    if (n.id == owner.id || n.bound_entity.empty()) continue;
    if (n.concept_name != reservoir) continue;
    if (!ctx.index->adjacent(owner.bound_entity, n.bound_entity)) continue;
    if (!supplies_evidence(ctx, n)) continue;
    if (!admissible(slot, n.concept_name)) continue;
    found.push_back(&n);
  }
  if (found.size() != 1) return std::nullopt;
  FillValue v;
  v.value = found[0]->id;
  bool covered = false;
  for (const auto& e : ctx.model->edges)
    if (e.directed && e.from == found[0]->id && e.to == owner.id) covered = true;
  if (!covered) {
    v.materialize = true;
    v.mat_from = found[0]->id;
    v.mat_to = owner.id;
    v.mat_means = ctx.index->means_between(found[0]->bound_entity, owner.bound_entity);
  }
  return v;
}

/// receiver-node: the unique adjacent element that is neither the owner's
/// source nor itself supplying; materializes the outgoing transfer.
std::optional<FillValue> receiver_node(const ModelNode& owner, const kb::Slot& slot,
                                       const FireContext& ctx) {
  if (owner.bound_entity.empty()) return std::nullopt;
  auto source_it = ctx.model->slots.find(owner.id + ".source");
  std::string source = source_it == ctx.model->slots.end() ? "" : source_it->second;
  std::vector<const ModelNode*> found;
  for (const auto& n : ctx.model->nodes) {
    if (n.id == owner.id || n.bound_entity.empty()) continue;
    if (n.id == source) continue;
    if (!ctx.index->adjacent(owner.bound_entity, n.bound_entity)) continue;
    if (supplies_evidence(ctx, n)) continue;
    if (!admissible(slot, n.concept_name)) continue;
    found.push_back(&n);
  }
  if (found.size() != 1) return std::nullopt;
  FillValue v;
  v.value = found[0]->id;
  bool covered = false;
  for (const auto& e : ctx.model->edges)
    if (e.directed && e.from == owner.id && e.to == found[0]->id) covered = true;
  if (!covered) {
    v.materialize = true;
    v.mat_from = owner.id;
    v.mat_to = found[0]->id;
    v.mat_means = ctx.index->means_between(owner.bound_entity, found[0]->bound_entity);
  }
  return v;
}

/// mode-from-means: a carrying entity whose category bears the demon's
/// feature fixes the mode to the demon's value parameter.
std::optional<FillValue> mode_from_means(const kb::Demon& demon, const ModelEdge& owner,
                                         const kb::Slot& slot, const FireContext& ctx) {
  if (demon.feature_param.empty() || demon.value_param.empty()) return std::nullopt;
  if (!admissible(slot, demon.value_param)) return std::nullopt;
  for (const auto& m : owner.means) {
    if (!ctx.index->entity_has_feature(m, demon.feature_param)) continue;
    FillValue v;
    v.value = demon.value_param;
    return v;
  }
  return std::nullopt;
}

/// mode-from-emission: what the sending node is observed to emit, read
/// through the target lexicon, names the transfer's modes.
std::optional<FillValue> mode_from_emission(const ModelEdge& owner, const kb::Slot& slot,
                                            const FireContext& ctx) {
  const ModelNode* from = ctx.model->find_node(owner.from);
  if (!from || from->bound_entity.empty()) return std::nullopt;
  std::set<std::string> modes;
  for (const auto& obs : ctx.scene->observations) {
    if (obs.predicate != "emits" || obs.args.size() < 2) continue;
    if (obs.args[0] != from->bound_entity) continue;
    for (const auto& entry : ctx.target->lexicon) {
      if (entry.word != obs.args[1]) continue;
      if (admissible(slot, entry.concept_name)) modes.insert(entry.concept_name);
    }
  }
  if (modes.empty()) return std::nullopt;
  FillValue v;
  std::string joined;
  for (const auto& m : modes) {
    if (!joined.empty()) joined += ",";
    joined += m;
  }
  v.value = joined;
  return v;
}

/// circuit-orientation: walk the loop of same-concept edges from the unique
/// terminal-bearing node, taking the smallest unvisited carrier first; the
/// walk's direction for the owner edge is the fill.
std::optional<FillValue> circuit_orientation(const kb::Demon& demon, const ModelEdge& owner,
                                             const FireContext& ctx) {
  if (demon.feature_param.empty()) return std::nullopt;
  struct WalkEdge {
    const ModelEdge* edge;
    std::string key;  // ordering key: first carrier, else edge id
    bool visited = false;
  };
  std::vector<WalkEdge> walk;
  for (const auto& e : ctx.model->edges) {
    if (e.concept_name != owner.concept_name) continue;
    walk.push_back({&e, e.means.empty() ? e.id : e.means[0], false});
  }
  // Anchor: the smallest-id node in the owner's component whose entity has
  // the terminal feature.
  std::set<std::string> component{owner.from, owner.to};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& w : walk) {
      bool touches = component.count(w.edge->from) || component.count(w.edge->to);
      if (!touches) continue;
      if (component.insert(w.edge->from).second) grew = true;
      if (component.insert(w.edge->to).second) grew = true;
    }
  }
  std::string anchor;
  for (const auto& id : component) {
    const ModelNode* n = ctx.model->find_node(id);
    if (!n || n->bound_entity.empty()) continue;
    if (!ctx.index->entity_has_feature(n->bound_entity, demon.feature_param)) continue;
    if (anchor.empty() || id < anchor) anchor = id;
  }
  if (anchor.empty()) return std::nullopt;

  std::string cur = anchor;
  std::map<std::string, std::pair<std::string, std::string>> oriented;
  while (true) {
    WalkEdge* next = nullptr;
    for (auto& w : walk) {
      if (w.visited) continue;
      if (w.edge->from != cur && w.edge->to != cur) continue;
      if (!next || w.key < next->key) next = &w;
    }
    if (!next) break;
    next->visited = true;
    std::string far = next->edge->from == cur ? next->edge->to : next->edge->from;
    oriented[next->edge->id] = {cur, far};
    cur = far;
  }
  auto it = oriented.find(owner.id);
  if (it == oriented.end()) return std::nullopt;
  FillValue v;
  v.value = it->second.first + "->" + it->second.second;
  v.orients = true;
  return v;
}

}  // namespace

std::optional<FillValue> run_slot_builtin(const kb::Demon& demon, const ModelNode* node,
                                          const ModelEdge* edge, const kb::Slot& slot,
                                          const FireContext& ctx) {
  if (demon.builtin == "incident-transfer")
    return node ? incident_transfer(*node, slot, ctx) : std::nullopt;
  if (demon.builtin == "supplier-reservoir")
    return node ? supplier_reservoir(demon, *node, slot, ctx) : std::nullopt;
  if (demon.builtin == "receiver-node")
    return node ? receiver_node(*node, slot, ctx) : std::nullopt;
  if (demon.builtin == "mode-from-means")
    return edge ? mode_from_means(demon, *edge, slot, ctx) : std::nullopt;
  if (demon.builtin == "mode-from-emission")
    return edge ? mode_from_emission(*edge, slot, ctx) : std::nullopt;
  if (demon.builtin == "circuit-orientation")
    return edge ? circuit_orientation(demon, *edge, ctx) : std::nullopt;
  if (demon.builtin == "currents-in-circuit") return std::nullopt;  // projection only
  throw EngineError("KB-UNKNOWN-BUILTIN",
                    "demon `" + demon.id + "` uses unknown builtin `" + demon.builtin + "`");
}

std::vector<SceneIndex::LoopEdge> run_projection_builtin(const kb::Demon& demon,
                                                         const FireContext& ctx) {
  if (demon.builtin == "currents-in-circuit") {
    if (demon.feature_param.empty()) return {};
    return ctx.index->loop_connectors(demon.feature_param);
  }
  throw EngineError("KB-UNKNOWN-BUILTIN",
                    "demon `" + demon.id + "` uses unknown builtin `" + demon.builtin + "`");
}

}  // namespace janus::builder::detail
