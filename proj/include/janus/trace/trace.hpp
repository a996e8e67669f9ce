#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "janus/checker/checker.hpp"
#include "janus/config.hpp"
#include "janus/learn/learn.hpp"

namespace janus::trace {

using Json = nlohmann::json;

/// FNV-1a 64-bit content digest; hex form is 16 lowercase digits.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_hex(std::string_view data);

/// An input file pinned into a trace: path as given plus content digest.
struct InputFile {
  std::string path;
  std::string content;
};

/// Reads a file for digesting; throws EngineError("IO-READ") on failure.
InputFile read_input(const std::string& path);

// Section serializers. All output is deterministic: nlohmann::json objects
// keep keys sorted and no section carries a timestamp.
Json score_json(const Score& s);
Json registry_json(const std::vector<assoc::JanusEntity>& registry);
Json model_json(const builder::InterpretationModel& model);  // "model/1"
Json events_json(const builder::BuildTrace& trace);
Json borrowings_json(const std::vector<assoc::Borrowing>& borrowings);
Json consequences_json(const std::vector<checker::Consequence>& consequences);
Json violations_json(const std::vector<checker::ViolationReport>& violations);
Json edits_json(const std::vector<kb::KbEdit>& edits);
Json action_json(const learn::RepairAction& action);
Json episode_json(const learn::Episode& episode);  // "episode/1"
Json config_json(const RunConfig& config);

/// Full document ("trace/1") for a single interpret run; outcome is "clean"
/// or "violations".
Json interpret_document(const std::vector<InputFile>& inputs, const std::string& scene,
                        const std::string& target, const std::vector<std::string>& sources,
                        const RunConfig& config, const builder::BuildOutput& build,
                        const checker::CheckReport& report);

/// Full document ("trace/1") for a repair episode; the top-level model,
/// build, and violation sections mirror the final iteration.
Json repair_document(const std::vector<InputFile>& inputs, const std::string& scene,
                     const std::string& target, const std::vector<std::string>& sources,
                     const RunConfig& config, const learn::Episode& episode);

/// Canonical rendering: two-space indent, sorted keys, trailing newline.
std::string render(const Json& doc);

/// Human-readable rendering: chain notation plus a violation summary.
std::string render_text(const builder::InterpretationModel& model,
                        const std::vector<checker::ViolationReport>& violations,
                        const kb::Domain& target);

/// Validates a document against a schema written in the JSON-Schema subset
/// used under schemas/ (type, properties, required, items, enum, const,
/// additionalProperties). Returns human-readable mismatches; empty = valid.
std::vector<std::string> schema_errors(const Json& doc, const Json& schema);

}  // namespace janus::trace
