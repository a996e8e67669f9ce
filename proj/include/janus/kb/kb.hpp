#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "janus/assoc/types.hpp"
#include "janus/kb/types.hpp"

namespace janus::kb {

/// Seeds the janus registry: one edit bundles every entity proposed for a
/// scene so the registry's birth is itself a versioned, replayable mutation.
struct EditFormRegistry {
  std::vector<assoc::JanusEntity> entities;
  bool operator==(const EditFormRegistry&) const = default;
};

/// Splits a janus entity and blocks its demons in the target context.
struct EditDifferentiate {
  std::string janus_id;
  std::string target_domain;
  std::vector<std::string> blocked_demons;
  bool operator==(const EditDifferentiate&) const = default;
};

/// Overrides a scene entity's binding ("" = leave unbound).
struct EditRebind {
  std::string entity;
  std::string from_concept;
  std::string to_concept;
  bool operator==(const EditRebind&) const = default;
};

/// Adds a specialized conceptual schema to a domain.
struct EditSpecialize {
  std::string domain;
  Schema schema;
  bool operator==(const EditSpecialize&) const = default;
};

using KbEdit = std::variant<EditFormRegistry, EditDifferentiate, EditRebind, EditSpecialize>;

/// Immutable-by-convention knowledge-base snapshot. Successor versions are
/// produced exclusively through apply_edit; the edit log replays from an
/// empty version-0 state to reproduce any later version exactly.
struct KbState {
  std::vector<Domain> domains;
  std::vector<FeatureTable> tables;
  std::vector<assoc::JanusEntity> registry;
  std::map<std::string, std::string> bind_overrides;  // entity -> concept ("" = unbound)
  std::vector<std::pair<std::string, std::string>> rebinds_tried;
  int version = 0;
  std::vector<KbEdit> edits;
  bool operator==(const KbState&) const = default;

  const Domain* find_domain(const std::string& name) const;
  const FeatureTable* find_table(const std::string& name) const;
  const assoc::JanusEntity* find_janus(const std::string& id) const;
  const Demon* find_demon_anywhere(const std::string& id) const;

  /// Registers a lowered domain; throws EngineError("KB-DUP") on a name clash.
  void register_domain(Domain d);
  /// Registers a feature table; throws KB-DUP on a table-name clash and
  /// KB-FEATURE-MISMATCH when a term is already declared by another table.
  void register_features(FeatureTable t);

  /// Union of feature entries for a term: direct entry first, else the term
  /// is resolved through domain lexicons (word -> concept -> all words of
  /// that concept -> entries), else the term is tried as a concept name.
  /// Throws EngineError("KB-UNKNOWN-TERM") when nothing matches.
  FeatureSet notional_core(const std::string& term) const;

  /// Cross-reference sweep; empty result means the snapshot is sound.
  std::vector<Diagnostic> validate() const;
};

/// Builtin catalogs: the decidable trigger/effect vocabulary demons, rules,
/// and world facts may draw from. validate() rejects anything outside them.
bool is_demon_builtin(const std::string& name);
bool is_rule_builtin(const std::string& name);
bool is_fact_builtin(const std::string& name);

/// Returns a successor snapshot with the edit applied, version + 1, and the
/// edit appended to the log. Throws on edits that do not apply cleanly.
KbState apply_edit(const KbState& base, const KbEdit& edit);

/// Nearest exact decimal rational to a threshold knob (9 places), so that
/// fixture scores like 2/5 compare against 0.4 without float wobble.
Score threshold_score(double value);

/// Sorted top-level corpus files (.domain/.scene/.features) of a directory.
/// Throws EngineError("IO-READ") when the directory cannot be read.
std::vector<std::string> corpus_files(const std::string& dir);

struct LoadResult {
  KbState kb;
  std::vector<SceneGraph> scenes;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
  const SceneGraph* find_scene(const std::string& name) const {
    for (const auto& s : scenes)
      if (s.name == name) return &s;
    return nullptr;
  }
};

/// Parses, lowers, registers, and validates a set of files. Registration
/// failures (KB-DUP, KB-FEATURE-MISMATCH) become diagnostics; unreadable
/// paths throw EngineError("IO-READ").
LoadResult load_files(const std::vector<std::string>& paths);

/// Replays an edit log from a pristine base (same domains/tables, version 0,
/// empty registry/log); used to audit that versions reconstruct exactly.
KbState replay_edits(KbState base, const std::vector<KbEdit>& edits);

}  // namespace janus::kb
