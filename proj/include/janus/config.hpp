#pragma once

#include <string>

#include "janus/core.hpp"

namespace janus {

enum class OutputMode { Json, Text, Both };

/// Knobs shared by every interpretation/repair run. Defaults are calibrated
/// against the shipped corpus; see docs/dsl.md for the tuning notes.
struct RunConfig {
  double saliency_threshold = 0.5;  // entities below it are ignored by binding
  double janus_threshold = 0.4;     // minimal notional overlap to associate
  int budget = 16;                  // repair-loop iteration cap
  long seed = 0;                    // reserved for future stochastic modes
  OutputMode output = OutputMode::Json;
  bool operator==(const RunConfig&) const = default;
};

/// Throws EngineError("CONFIG", ...) when a field is out of range.
inline void validate_config(const RunConfig& c) {
  if (c.saliency_threshold < 0.0 || c.saliency_threshold > 1.0)
    throw EngineError("CONFIG", "saliency threshold must lie in [0, 1]");
  if (c.janus_threshold < 0.0 || c.janus_threshold > 1.0)
    throw EngineError("CONFIG", "janus threshold must lie in [0, 1]");
  if (c.budget < 1) throw EngineError("CONFIG", "iteration budget must be at least 1");
}

}  // namespace janus
