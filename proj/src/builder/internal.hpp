#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "janus/builder/builder.hpp"

namespace janus::builder::detail {

/// Perceptual substrate of a scene: connector detection, adjacency, and
/// conducting-loop analysis. Built over the full scene — saliency gates
/// binding, not structure.
struct SceneIndex {
  const kb::SceneGraph* scene = nullptr;
  const kb::KbState* kb = nullptr;

  // Entities linking >= 2 distinct others through relations, in declaration
  // order, with their linked endpoints.
  std::vector<std::string> connectors;
  std::map<std::string, std::vector<std::string>> linked;
  // Relations between two non-connector entities count as direct contact.
  std::vector<std::pair<std::string, std::string>> direct;

  static SceneIndex build(const kb::SceneGraph& scene, const kb::KbState& kb);

  bool is_connector(const std::string& id) const;
  /// Notional features of the entity's category; empty when unknown.
  FeatureSet category_core(const std::string& entity_id) const;
  bool entity_has_feature(const std::string& entity_id, const std::string& feature) const;
  /// Adjacent through direct contact or any shared connector.
  bool adjacent(const std::string& a, const std::string& b) const;
  /// Connectors linking both entities, in declaration order.
  std::vector<std::string> means_between(const std::string& a, const std::string& b) const;
  /// Connectors carrying `feature` that lie on a cycle of the multigraph of
  /// feature-bearing connectors (i.e. are not bridges), with their two
  /// endpoints; declaration order.
  struct LoopEdge {
    std::string connector;
    std::string a, b;
  };
  std::vector<LoopEdge> loop_connectors(const std::string& feature) const;
};

/// Everything a demon builtin may consult when deciding whether to fire.
struct FireContext {
  const InterpretationModel* model = nullptr;
  const kb::SceneGraph* scene = nullptr;
  const kb::KbState* kb = nullptr;
  const kb::Domain* target = nullptr;
  const SceneIndex* index = nullptr;
};

/// Outcome of a slot-filling builtin.
struct FillValue {
  std::string value;  // slot value: node id, concept name(s), or "a->b"
  bool orients = false;  // value is an orientation to apply to the owner edge
  // A flow fill may require a transfer edge that does not exist yet.
  bool materialize = false;
  std::string mat_from, mat_to;        // node ids of the new edge
  std::vector<std::string> mat_means;  // scene entities carrying it
};

/// Runs a slot-filling builtin for `demon` on a node or edge owner (exactly
/// one non-null). Returns nothing when the demon does not fire; never
/// mutates. Unknown builtins throw KB-UNKNOWN-BUILTIN.
std::optional<FillValue> run_slot_builtin(const kb::Demon& demon, const ModelNode* node,
                                          const ModelEdge* edge, const kb::Slot& slot,
                                          const FireContext& ctx);

/// Instances recognized by a projection builtin: (connector, endpoint
/// entities) triples, in scene declaration order.
std::vector<SceneIndex::LoopEdge> run_projection_builtin(const kb::Demon& demon,
                                                         const FireContext& ctx);

}  // namespace janus::builder::detail
