#include <cctype>

#include "janus/dsl/dsl.hpp"

namespace janus::dsl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// Validates UTF-8 well-formedness without decoding code points.
bool valid_utf8(const std::string& s, std::size_t& bad_at) {
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    std::size_t extra;
    if (c < 0x80) extra = 0;
    else if ((c >> 5) == 0x6) extra = 1;
    else if ((c >> 4) == 0xE) extra = 2;
    else if ((c >> 3) == 0x1E) extra = 3;
    else { bad_at = i; return false; }
    if (i + extra >= s.size() && extra > 0) { bad_at = i; return false; }
    for (std::size_t k = 1; k <= extra; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) { bad_at = i; return false; }
    i += extra + 1;
  }
  return true;
}

}  // namespace

std::vector<Token> lex(const std::string& text, const std::string& file,
                       std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  std::size_t bad_at = 0;
  if (!valid_utf8(text, bad_at)) {
    diags.push_back({"DSL-000", Severity::Error, "source is not valid UTF-8", file,
                     {bad_at, bad_at + 1}});
    out.push_back({TokKind::End, "", {text.size(), text.size()}});
    return out;
  }
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
    if (c == '#') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      ++i;
      // `-` continues an identifier unless it opens an `->` arrow.
      while (i < n && ident_cont(text[i]) &&
             !(text[i] == '-' && i + 1 < n && text[i + 1] == '>'))
        ++i;
      out.push_back({TokKind::Ident, text.substr(start, i - start), {start, i}});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++i;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i < n && text[i] == '.' && i + 1 < n &&
          std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      out.push_back({TokKind::Number, text.substr(start, i - start), {start, i}});
      continue;
    }
    if (c == '"') {
      ++i;
      std::string payload;
      bool closed = false;
      while (i < n) {
        if (text[i] == '"') { closed = true; ++i; break; }
        if (text[i] == '\n') break;
        payload += text[i++];
      }
      if (!closed) {
        diags.push_back({"DSL-001", Severity::Error, "unterminated string literal", file,
                         {start, i}});
      }
      out.push_back({TokKind::String, payload, {start, i}});
      continue;
    }
    if (c == '-' && i + 1 < n && text[i + 1] == '>') {
      out.push_back({TokKind::Punct, "->", {start, i + 2}});
      i += 2;
      continue;
    }
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ':' || c == ',' ||
        c == '|' || c == '.') {
      out.push_back({TokKind::Punct, std::string(1, c), {start, i + 1}});
      ++i;
      continue;
    }
    diags.push_back({"DSL-001", Severity::Error,
                     std::string("unexpected character `") + c + "`", file, {start, start + 1}});
    ++i;
  }
  out.push_back({TokKind::End, "", {n, n}});
  return out;
}

}  // namespace janus::dsl
