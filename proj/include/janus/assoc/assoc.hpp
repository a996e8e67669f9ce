#pragma once

#include <optional>
#include <string>
#include <vector>

#include "janus/assoc/types.hpp"
#include "janus/kb/kb.hpp"

namespace janus::assoc {

/// Jaccard overlap |a∩b| / |a∪b| as an exact rational; 0 when both empty.
Score overlap(const FeatureSet& a, const FeatureSet& b);

/// Candidates scoring >= threshold against the target concept's notional
/// core, descending by score, ties lexicographic by candidate name.
/// Throws KB-UNKNOWN-TERM when a term has no notional core.
std::vector<JanusEntity> propose_janus(const std::string& target_concept,
                                       const std::vector<std::string>& candidates,
                                       const Score& threshold, const kb::KbState& kb);

/// Records an active janus entity in the registry; idempotent per pair.
/// Throws EngineError("ASSOC-NO-OVERLAP") when the cores share nothing.
const JanusEntity& form(const std::string& target, const std::string& source,
                        kb::KbState& kb);

/// Demand-driven borrowing across an active janus entity. For a Slot need,
/// returns a demon Borrowing when the source face's schema owns a demon
/// writing an identically named slot; for an Aspect need, an aspect
/// Borrowing when exactly one face carries the feature. Returns nothing
/// when the janus cannot help. Throws ASSOC-DIFFERENTIATED on a split one.
std::optional<Borrowing> borrow(const JanusEntity& janus, const Need& need,
                                const kb::KbState& kb);

/// The source-domain concept a janus source face resolves to, if any.
const kb::Schema* source_schema(const JanusEntity& janus, const kb::KbState& kb,
                                const kb::Domain** home = nullptr);

}  // namespace janus::assoc
