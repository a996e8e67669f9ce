#pragma once

#include <string>
#include <vector>

#include "janus/builder/builder.hpp"
#include "janus/kb/kb.hpp"

namespace janus::checker {

/// Grounded statement derived by reinterpreting the model strictly inside the
/// target domain, with the model facts the derivation used.
struct Consequence {
  std::string id;         // "c1", "c2", ... in derivation order
  std::string statement;  // target vocabulary only
  std::vector<std::string> derivation;  // model fact ids
  bool operator==(const Consequence&) const = default;
};

enum class ViolationKind { Syntactic, Integrity, Adequacy };

struct ViolationReport {
  std::string id;  // "v1", "v2", ... in report order
  ViolationKind kind = ViolationKind::Syntactic;
  std::string constraint;  // "<domain>.<rule or fact id>"
  std::string message;
  std::vector<std::string> cites;       // model fact ids backing the violation
  std::vector<std::string> evidence;    // consequence ids (adequacy only)
  std::vector<std::string> implicated;  // provenance tags, borrowed first
  bool operator==(const ViolationReport&) const = default;
};

/// Derives flow and level consequences from directed transfers: leave/arrive
/// statements per edge, receive statements for pure sinks, level trends for
/// storage concepts. Consults no demon — native or borrowed.
std::vector<Consequence> reinterpret(const builder::InterpretationModel& model,
                                     const kb::Domain& target);

/// Evaluates the target's syntactic and integrity meta-constraints; one
/// report per violated rule, citing every offending model fact.
std::vector<ViolationReport> check_syntactic(const builder::InterpretationModel& model,
                                             const kb::Domain& target);

/// Tests the target's world facts against the consequence set; one report per
/// failing fact, citing the model facts its evidence derives from.
std::vector<ViolationReport> check_adequacy(const builder::InterpretationModel& model,
                                            const kb::Domain& target,
                                            const std::vector<Consequence>& consequences);

/// Transitive closure from a violation's cited facts down to their provenance
/// tags; borrowed tags (janus/demon) sort first. Throws CHECK-STALE when a
/// cited fact is not in the model.
std::vector<std::string> implicate(const ViolationReport& violation,
                                   const builder::InterpretationModel& model);

struct CheckReport {
  std::vector<Consequence> consequences;
  std::vector<ViolationReport> violations;  // syntactic, integrity, adequacy
  bool operator==(const CheckReport&) const = default;
};

/// reinterpret + both check passes; violations ordered syntactic, integrity,
/// adequacy with stable ids and implications filled in.
CheckReport check_all(const builder::InterpretationModel& model, const kb::Domain& target);

}  // namespace janus::checker
