#pragma once

#include <string>
#include <vector>

#include "janus/core.hpp"

namespace janus::dsl {

enum class TokKind { Ident, Number, String, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;  // for String: decoded payload without quotes
  Span span;
  bool operator==(const Token&) const = default;
};

/// One node per grammar production; `atoms` carries the production's flat
/// payload in a fixed per-kind layout, `children` the nested productions.
struct AstNode {
  std::string kind;
  Span span;
  std::vector<std::string> atoms;
  std::vector<std::size_t> children;
  bool operator==(const AstNode&) const = default;
};

struct Ast {
  std::vector<AstNode> nodes;  // nodes[0] is the "file" root when non-empty
  bool empty() const { return nodes.empty(); }
  const AstNode& root() const { return nodes.front(); }
  bool operator==(const Ast&) const = default;
};

}  // namespace janus::dsl
