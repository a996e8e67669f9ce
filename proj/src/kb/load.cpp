#include <algorithm>
#include <cmath>
#include <filesystem>

#include "janus/dsl/dsl.hpp"
#include "janus/kb/kb.hpp"

namespace janus::kb {

Score threshold_score(double value) {
  constexpr std::uint64_t kDen = 1000000000ull;
  if (value < 0.0) return Score{0, 1};
  auto num = static_cast<std::uint64_t>(std::llround(value * static_cast<double>(kDen)));
  return Score{num, kDen};
}

std::vector<std::string> corpus_files(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  std::vector<std::string> out;
  fs::directory_iterator it(dir, ec);
  if (ec) throw EngineError("IO-READ", "cannot read directory `" + dir + "`: " + ec.message());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext == ".domain" || ext == ".scene" || ext == ".features")
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

LoadResult load_files(const std::vector<std::string>& paths) {
  LoadResult result;
  for (const auto& path : paths) {
    auto kind = dsl::kind_from_path(path);
    if (!kind)
      throw EngineError("IO-READ", "unrecognized corpus extension on `" + path + "`");
    dsl::SourceFile file;
    file.path = path;
    file.text = read_file(path);
    file.kind = *kind;
    auto parsed = dsl::parse(file);
    for (auto& d : parsed.diagnostics) result.diagnostics.push_back(d);
    if (!parsed.ok()) continue;
    auto lowered = dsl::lower(parsed.ast, file.kind, path);
    for (auto& d : lowered.diagnostics) result.diagnostics.push_back(d);
    if (!lowered.ok()) continue;
    try {
      if (lowered.domain) result.kb.register_domain(*lowered.domain);
      if (lowered.features) result.kb.register_features(*lowered.features);
      if (lowered.scene) result.scenes.push_back(*lowered.scene);
    } catch (const EngineError& e) {
      Diagnostic diag;
      diag.code = e.code();
      diag.severity = Severity::Error;
      diag.message = e.what();
      diag.file = path;
      result.diagnostics.push_back(diag);
    }
  }
  auto validation = result.kb.validate();
  for (auto& d : validation) result.diagnostics.push_back(d);
  return result;
}

}  // namespace janus::kb
