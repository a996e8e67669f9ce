#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace janus {

/// Half-open byte range into a source file.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
  bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
};

enum class Severity { Error, Warning };

/// A diagnostic attached to a span of one source file.
struct Diagnostic {
  std::string code;     // stable identifier, e.g. "DSL-004"
  Severity severity = Severity::Error;
  std::string message;
  std::string file;     // path or logical name of the source
  Span span;
  bool operator==(const Diagnostic&) const = default;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

/// Engine error carrying a stable code (KB-*, ASSOC-*, LEARN-*).
class EngineError : public std::runtime_error {
 public:
  EngineError(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Exact rational score in [0, 1]; kept as a fraction so equality against an
/// independently computed value is never at the mercy of rounding.
struct Score {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Score& o) const {
    // Compare as exact rationals (cross-multiplied).
    return static_cast<unsigned __int128>(num) * o.den ==
           static_cast<unsigned __int128>(o.num) * den;
  }
  bool operator<(const Score& o) const {
    return static_cast<unsigned __int128>(num) * o.den <
           static_cast<unsigned __int128>(o.num) * den;
  }
};

using FeatureSet = std::set<std::string>;

/// FNV-1a 64-bit digest, printed as 16 hex digits. Used to fingerprint input
/// files in traces; stability matters more than collision resistance here.
std::string fnv1a_hex(const std::string& bytes);

/// Reads a whole file; throws EngineError("IO-READ") on failure.
std::string read_file(const std::string& path);

/// Writes a whole file; throws EngineError("IO-WRITE") on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace janus
