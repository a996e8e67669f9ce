#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "janus/assoc/assoc.hpp"
#include "janus/config.hpp"
#include "janus/kb/kb.hpp"

namespace janus::builder {

/// Per-fact origin record: the smuggling ledger. Every node, edge, slot
/// value, and edge attribute in a model carries exactly one of these.
struct Provenance {
  enum class Tag { Native, Borrowed, Default, Postulated };
  Tag tag = Tag::Native;
  std::string domain;  // native: target domain; borrowed: lender domain/table
  std::string demon;   // demon id when one fired ("lexicon" for word binds)
  std::string janus;   // janus entity id for borrowed facts
  bool operator==(const Provenance&) const = default;
};

/// Renders a provenance as attributable tag strings ("janus:<id>",
/// "demon:<domain>.<id>", "native:<domain>.<demon>", "default:<fact>",
/// "postulated:<fact>"). Borrowed facts yield both their janus and demon tag.
std::vector<std::string> provenance_tags(const std::string& fact_id, const Provenance& p);

struct ModelNode {
  std::string id;            // scene entity id, or postulate name
  std::string concept_name;  // target node concept
  std::string bound_entity;  // scene entity ("" when postulated)
  bool postulated = false;
  bool operator==(const ModelNode&) const = default;
};

struct ModelEdge {
  std::string id;            // "t1", "t2", ... in creation order
  std::string concept_name;  // target edge concept
  std::string from;          // node id
  std::string to;            // node id
  bool directed = false;
  std::set<std::string> modes;     // mode concept names
  std::vector<std::string> means;  // scene entities carrying the transfer
  bool operator==(const ModelEdge&) const = default;
};

struct ModelAux {
  std::string id;            // scene entity id
  std::string concept_name;  // target aux concept
  bool operator==(const ModelAux&) const = default;
};

/// A scene interpreted in target vocabulary. Fact ids: "node:<id>",
/// "edge:<id>", "aux:<id>", "slot:<node>.<role>", "attr:<edge>.<role>".
struct InterpretationModel {
  std::string scene;
  std::string target;
  std::vector<ModelNode> nodes;
  std::vector<ModelEdge> edges;
  std::vector<ModelAux> aux;
  std::map<std::string, std::string> slots;  // "<owner>.<role>" -> value
  std::vector<std::string> unbound;          // salient entities left unbound
  std::vector<std::string> unfilled;         // required "<owner>.<role>" left empty
  bool complete = false;
  std::map<std::string, Provenance> provenance;  // fact id -> origin
  bool operator==(const InterpretationModel&) const = default;

  const ModelNode* find_node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
  const ModelEdge* find_edge(const std::string& id) const {
    for (const auto& e : edges)
      if (e.id == id) return &e;
    return nullptr;
  }
};

struct BuildEvent {
  int step = 0;
  enum class Kind { Bind, Fill, BorrowFire, Default, Postulate };
  Kind kind = Kind::Bind;
  std::map<std::string, std::string> detail;  // flat, lists comma-joined
  bool operator==(const BuildEvent&) const = default;
};

struct BuildTrace {
  std::vector<BuildEvent> events;
  bool operator==(const BuildTrace&) const = default;
};

/// Count of demon firings (any home domain) on this thread; the checker uses
/// it to prove reinterpretation consults no demon at all.
long& demon_firings();

/// Proposes janus entities for every target concept against the scene's
/// categories and the source domains' surface words, ranked per concept.
std::vector<assoc::JanusEntity> form_registry(const kb::SceneGraph& scene,
                                              const kb::Domain& target,
                                              const std::vector<const kb::Domain*>& sources,
                                              const Score& threshold,
                                              const kb::KbState& kb);

/// Binds salient entities to target concepts (override, then native lexicon,
/// then best active janus) and imports edges projected by borrowed
/// recognizer demons. Unbound entities are data, not errors.
InterpretationModel bind_roles(const kb::SceneGraph& scene, const kb::Domain& target,
                               const kb::KbState& kb, const RunConfig& config,
                               BuildTrace& trace, std::vector<assoc::Borrowing>& borrowings);

/// Fills empty slots in strict priority order — native demon, borrowed demon,
/// default, postulation — recording a provenance tag and trace event per
/// fill; remaining required slots are listed unfilled.
void fill_slots(InterpretationModel& model, const kb::SceneGraph& scene,
                const kb::KbState& kb, const kb::Domain& target, const RunConfig& config,
                BuildTrace& trace, std::vector<assoc::Borrowing>& borrowings);

struct BuildOutput {
  InterpretationModel model;
  BuildTrace trace;
  std::vector<assoc::Borrowing> borrowings;
  kb::KbState kb;  // input snapshot, plus the registry-forming edit when new
  bool operator==(const BuildOutput&) const = default;
};

/// Registry formation (first build only) + bind_roles + fill_slots.
/// Deterministic for fixed inputs and config.
BuildOutput build_model(const kb::SceneGraph& scene, const std::string& target,
                        const std::vector<std::string>& sources, const kb::KbState& kb,
                        const RunConfig& config);

/// Folds a trace back into a model; reproduces build output exactly.
InterpretationModel replay(const BuildTrace& trace, const kb::Domain& target,
                           const std::string& scene_name);

/// One-line-per-component rendering in target vocabulary, e.g.
/// `[battery:Reservoir] -(electrical work)-> [bulb:Transformer]`;
/// `*` marks postulated nodes, `-(m)-` an undirected edge.
std::string chain_notation(const InterpretationModel& model, const kb::Domain& target);

}  // namespace janus::builder
