#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "janus/builder/builder.hpp"
#include "janus/checker/checker.hpp"
#include "janus/config.hpp"
#include "janus/kb/kb.hpp"

namespace janus::learn {

/// A single proposed repair. Differentiate splits a janus entity and blocks
/// the demons that were borrowed through it; Rebind overrides one scene
/// entity's binding ("" = leave unbound); Specialize is never synthesized by
/// diagnosis — it is the standalone schema-tightening operation below.
struct RepairAction {
  enum class Kind { Differentiate, Rebind, Specialize };
  Kind kind = Kind::Differentiate;
  std::string id;  // "differentiate:<janus>" or "rebind:<entity>:<concept>"

  // Differentiate
  std::string janus_id;
  std::string target_domain;                // context the demons get blocked in
  std::vector<std::string> blocked_demons;  // sorted demon ids

  // Rebind
  std::string entity;
  std::string from_concept;
  std::string to_concept;  // "" = unbind

  std::vector<std::string> justification;  // ids of the violations covered
  bool operator==(const RepairAction&) const = default;
};

/// Turns a violation set into ranked repair proposals. Every janus entity
/// whose tag (or whose borrowed demons' tags) appears in some violation's
/// implicated set yields one action: Differentiate when inference was
/// borrowed through it, Rebind to the next-best association otherwise.
/// Ranked by violations covered (desc), then Differentiate before Rebind,
/// then id. Violations implicating only native/default/postulated facts
/// yield nothing — there is no association to blame.
std::vector<RepairAction> diagnose(const std::vector<checker::ViolationReport>& violations,
                                   const builder::InterpretationModel& model,
                                   const kb::KbState& kb);

/// Applies a Differentiate or Rebind action as a versioned knowledge-base
/// edit. Re-differentiating a split janus throws LEARN-ALREADY-SPLIT; a
/// Specialize action carries no edit and throws CONFIG.
kb::KbState apply_action(const RepairAction& action, const kb::KbState& kb);

/// Kind-checked convenience over apply_action for Differentiate actions.
kb::KbState differentiate(const RepairAction& action, const kb::KbState& kb);

/// One concrete, positive filling of a notional schema's roles, read off a
/// validated model together with the hosting scene's measurements.
struct PositiveInstance {
  std::string node;  // model node the instance was read from
  std::map<std::string, std::vector<std::string>> fillers;  // role -> categories
  std::vector<kb::Observation> measurements;  // e.g. equal(energy, before, after)
  bool operator==(const PositiveInstance&) const = default;
};

/// Reads a throughput instance off a model node: the node's concept fills
/// `transformer`, the upstream store fills `transformee`, incoming and
/// outgoing transfer modes fill `initial_state`/`final_state`, and the
/// scene's equality observations become the measurements.
PositiveInstance instance_from_node(const builder::InterpretationModel& model,
                                    const kb::SceneGraph& scene,
                                    const std::string& node_id);

/// Tightens a notional schema around a positive instance: each filled role's
/// constraint narrows to exactly the instance's filler categories, and every
/// quantity measured equal across before/after states becomes an invariance
/// condition. Throws LEARN-NOT-POSITIVE when the instance breaks one of the
/// notional schema's own loose constraints (e.g. final state == initial).
kb::Schema specialize(const kb::Schema& notional, const PositiveInstance& instance);

/// Does the instance satisfy the schema's role constraints and attest all of
/// its invariance conditions?
bool accepts(const kb::Schema& schema, const PositiveInstance& instance);

/// One build-check-repair round.
struct Iteration {
  int kb_version = 0;
  builder::InterpretationModel model;
  builder::BuildTrace trace;
  std::vector<assoc::Borrowing> borrowings;
  checker::CheckReport report;
  std::optional<RepairAction> action;  // absent on the final iteration
  bool operator==(const Iteration&) const = default;
};

enum class Outcome { ValidModel, Stuck, BudgetExhausted };

struct Episode {
  std::vector<Iteration> iterations;
  Outcome outcome = Outcome::Stuck;
  std::vector<kb::KbEdit> edits;  // full log: replays from version 0
  kb::KbState final_kb;
  bool operator==(const Episode&) const = default;
};

const char* outcome_name(Outcome o);

/// Drives build -> check -> diagnose -> repair until the model checks out
/// (valid-model requires a complete model), diagnosis runs dry (stuck), or
/// the iteration budget is spent (budget-exhausted).
Episode repair_loop(const kb::SceneGraph& scene, const std::string& target,
                    const std::vector<std::string>& sources, const kb::KbState& kb,
                    const RunConfig& config);

}  // namespace janus::learn
