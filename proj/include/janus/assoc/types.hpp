#pragma once

#include <string>

#include "janus/core.hpp"

namespace janus::assoc {

/// Two-faced association between a target concept and an everyday category or
/// source-domain term, justified purely by notional feature overlap. While
/// active it is a conduit for borrowed demons and aspects; differentiation is
/// absorbing.
struct JanusEntity {
  std::string id;           // "<target_face>~<source_face>"
  std::string target_face;  // concept name in the target domain
  std::string source_face;  // scene category or source-domain surface word
  FeatureSet shared_features;
  Score score;
  bool differentiated = false;
  bool operator==(const JanusEntity&) const = default;
};

inline std::string janus_id(const std::string& target, const std::string& source) {
  return target + "~" + source;
}

/// One act of smuggling across a janus entity: either a source-face demon
/// fires on the target's behalf, or a notional aspect (feature) is copied
/// onto the face that lacks it.
struct Borrowing {
  std::string janus;  // JanusEntity id
  enum class Kind { Demon, Aspect };
  Kind kind = Kind::Demon;
  std::string payload;  // demon id, or the borrowed feature name
  std::string from;     // face supplying the payload
  std::string to;       // face receiving it
  bool operator==(const Borrowing&) const = default;
};

/// What a borrow request is trying to satisfy.
struct Need {
  enum class Kind { Slot, Aspect };
  Kind kind = Kind::Slot;
  std::string name;  // slot name, or missing feature name
};

}  // namespace janus::assoc
