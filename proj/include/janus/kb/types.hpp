#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "janus/core.hpp"

namespace janus::kb {

enum class Level { Notional, Conceptual };
enum class ConceptKind { Node, Edge, Aux };
enum class Necessity { Required, Optional };

/// Admissible-filler predicate of a slot.
struct SlotConstraint {
  enum class Kind { Any, Names, DistinctFrom };
  Kind kind = Kind::Names;
  std::vector<std::string> names;  // concept or category names (Kind::Names)
  std::string other_role;          // Kind::DistinctFrom
  bool operator==(const SlotConstraint&) const = default;
};

enum class Flow { None, In, Out };

struct Slot {
  std::string name;
  SlotConstraint constraint;
  Necessity necessity = Necessity::Required;
  std::optional<std::string> default_value;
  Flow flow = Flow::None;
  bool postulation_allowed = false;  // may be satisfied by postulating a concept
  bool operator==(const Slot&) const = default;
};

/// Condition→assignment rule. The trigger/effect pair is drawn from a fixed
/// builtin catalog so firing stays decidable and attributable.
struct Demon {
  std::string id;
  std::string home_domain;
  std::string schema;            // concept whose slot it writes / projects
  std::string slot;              // empty for projection demons
  bool projects = false;         // true: recognizes instances of `schema`
  std::string builtin;           // catalog id, e.g. "circuit-orientation"
  std::string feature_param;     // optional category-feature argument
  std::string value_param;       // optional value argument (concept name)
  std::vector<std::string> blocked_contexts;  // target domains it may not fire in
  bool operator==(const Demon&) const = default;
};

struct Schema {
  std::string name;
  Level level = Level::Conceptual;
  ConceptKind kind = ConceptKind::Node;
  bool postulable = false;
  std::string postulate_name;    // instance name used when postulated
  std::vector<std::string> required_features;  // notional features a bound entity must carry
  std::vector<std::string> invariance;  // quantities that must stay equal across states
  std::vector<Slot> slots;
  bool operator==(const Schema&) const = default;
  const Slot* find_slot(const std::string& n) const {
    for (const auto& s : slots)
      if (s.name == n) return &s;
    return nullptr;
  }
};

enum class ConstraintKind { Syntactic, Integrity };

struct MetaConstraint {
  std::string id;
  ConstraintKind kind = ConstraintKind::Syntactic;
  std::string builtin;                  // catalog id, e.g. "no-return-to-start"
  std::vector<std::string> params;      // concept names the builtin is scoped to
  std::string message;
  bool operator==(const MetaConstraint&) const = default;
};

/// Piece of world knowledge checked against reinterpretation consequences.
struct WorldFact {
  std::string id;
  std::string builtin;
  std::vector<std::string> params;
  std::string message;
  bool operator==(const WorldFact&) const = default;
};

struct LexiconEntry {
  std::string word;          // surface word, e.g. "electrical work"
  std::string concept_name;  // concept it names
  bool operator==(const LexiconEntry&) const = default;
};

struct Domain {
  std::string name;
  Level level_default = Level::Conceptual;
  bool operational = false;
  std::vector<Schema> concepts;
  std::vector<Demon> demons;
  std::vector<MetaConstraint> rules;
  std::vector<WorldFact> facts;
  std::vector<LexiconEntry> lexicon;
  bool operator==(const Domain&) const = default;

  const Schema* find_concept(const std::string& n) const {
    for (const auto& c : concepts)
      if (c.name == n) return &c;
    return nullptr;
  }
  const Demon* find_demon(const std::string& id) const {
    for (const auto& d : demons)
      if (d.id == id) return &d;
    return nullptr;
  }
  /// First lexicon word naming the concept, or the concept name itself.
  std::string surface_word(const std::string& concept_name) const {
    for (const auto& e : lexicon)
      if (e.concept_name == concept_name) return e.word;
    return concept_name;
  }
  /// All lexicon words mapping to the concept, in declaration order.
  std::vector<std::string> words_for(const std::string& concept_name) const {
    std::vector<std::string> out;
    for (const auto& e : lexicon)
      if (e.concept_name == concept_name) out.push_back(e.word);
    return out;
  }
};

struct FeatureEntry {
  std::string term;
  std::optional<std::string> parent;  // optional isa link to another term
  FeatureSet features;
  bool operator==(const FeatureEntry&) const = default;
};

struct FeatureTable {
  std::string name;
  std::vector<std::string> vocabulary;  // declaration order
  std::vector<FeatureEntry> entries;
  bool operator==(const FeatureTable&) const = default;
  const FeatureEntry* find(const std::string& term) const {
    for (const auto& e : entries)
      if (e.term == term) return &e;
    return nullptr;
  }
};

struct SceneEntity {
  std::string id;
  std::string category;  // everyday surface word
  double saliency = 1.0;
  bool operator==(const SceneEntity&) const = default;
};

struct SceneRelation {
  std::string label;
  std::string from;
  std::string to;
  bool operator==(const SceneRelation&) const = default;
};

/// Grounded fact observed in the scene, e.g. emits(bulb, "light").
struct Observation {
  std::string predicate;
  std::vector<std::string> args;
  bool operator==(const Observation&) const = default;
};

struct SceneGraph {
  std::string name;
  std::vector<SceneEntity> entities;
  std::vector<SceneRelation> relations;
  std::vector<Observation> observations;
  bool operator==(const SceneGraph&) const = default;
  const SceneEntity* find_entity(const std::string& id) const {
    for (const auto& e : entities)
      if (e.id == id) return &e;
    return nullptr;
  }
};

}  // namespace janus::kb
