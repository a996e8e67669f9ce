#pragma once

#include <optional>
#include <string>
#include <vector>

#include "janus/dsl/ast.hpp"
#include "janus/kb/types.hpp"

namespace janus::dsl {

enum class FileKind { Domain, Scene, Features };

struct SourceFile {
  std::string path;   // used in diagnostics
  std::string text;   // UTF-8, LF or CRLF
  FileKind kind = FileKind::Domain;
};

/// Guesses the file kind from the path extension (.domain/.scene/.features).
std::optional<FileKind> kind_from_path(const std::string& path);

struct ParseResult {
  Ast ast;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

/// Tokenizes `text`; lexical problems become diagnostics, never exceptions.
std::vector<Token> lex(const std::string& text, const std::string& file,
                       std::vector<Diagnostic>& diags);

/// Total parser: malformed input yields diagnostics with the smallest
/// enclosing span and recovery resumes at block boundaries.
ParseResult parse(const SourceFile& src);

struct LowerResult {
  std::optional<kb::Domain> domain;
  std::optional<kb::SceneGraph> scene;
  std::optional<kb::FeatureTable> features;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

/// Resolves names and produces the typed entity for `kind`. The Ast header
/// keyword must agree with `kind`.
LowerResult lower(const Ast& ast, FileKind kind, const std::string& file);

/// Canonical text renderings; serialize∘lower∘parse is a fixpoint.
std::string serialize(const kb::Domain& d);
std::string serialize(const kb::SceneGraph& s);
std::string serialize(const kb::FeatureTable& t);

}  // namespace janus::dsl
