#include "janus/dsl/dsl.hpp"

namespace janus::dsl {

std::optional<FileKind> kind_from_path(const std::string& path) {
  auto ends_with = [&](const char* suf) {
    std::string s(suf);
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".domain")) return FileKind::Domain;
  if (ends_with(".scene")) return FileKind::Scene;
  if (ends_with(".features")) return FileKind::Features;
  return std::nullopt;
}

namespace {

// Recursive-descent parser. Every production makes exactly one AstNode; on a
// syntax error the offending item is dropped, a diagnostic is recorded with
// the smallest enclosing span, and scanning resumes at the next block
// boundary (matching `}` or the next item keyword at the same depth).
class Parser {
 public:
  Parser(const std::vector<Token>& toks, const std::string& file, Ast& ast,
         std::vector<Diagnostic>& diags)
      : t_(toks), file_(file), ast_(ast), diags_(diags) {}

  void run() {
    std::size_t root = make("file", cur().span);
    if (cur().kind == TokKind::End) {
      error("DSL-004", "missing top-level declaration", {0, 0});
      return;
    }
    std::size_t child = npos;
    if (is_kw("domain")) child = parse_domain();
    else if (is_kw("scene")) child = parse_scene();
    else if (is_kw("features")) child = parse_features();
    else {
      error("DSL-003", "unknown declaration `" + cur().text + "`", cur().span);
      return;
    }
    if (child != npos) ast_.nodes[root].children.push_back(child);
    if (cur().kind != TokKind::End)
      error("DSL-002", "expected end of file after top-level declaration", cur().span);
    ast_.nodes[root].span = {0, t_.empty() ? 0 : t_.back().span.end};
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const Token& cur() const { return t_[pos_]; }
  const Token& peek(std::size_t k = 1) const {
    return t_[pos_ + k < t_.size() ? pos_ + k : t_.size() - 1];
  }
  void advance() { if (pos_ + 1 < t_.size()) ++pos_; }

  bool is_kw(const char* w) const { return cur().kind == TokKind::Ident && cur().text == w; }
  bool is_punct(const char* p) const { return cur().kind == TokKind::Punct && cur().text == p; }

  bool eat_kw(const char* w) {
    if (!is_kw(w)) return false;
    advance();
    return true;
  }
  bool eat_punct(const char* p) {
    if (!is_punct(p)) return false;
    advance();
    return true;
  }

  void error(const char* code, const std::string& msg, Span span) {
    diags_.push_back({code, Severity::Error, msg, file_, span});
  }

  bool expect_punct(const char* p) {
    if (eat_punct(p)) return true;
    error("DSL-002", std::string("expected `") + p + "`", cur().span);
    return false;
  }

  // Returns ident text or empty string on failure (diagnostic recorded).
  std::string expect_ident(const char* what) {
    if (cur().kind == TokKind::Ident) {
      std::string s = cur().text;
      advance();
      return s;
    }
    error("DSL-002", std::string("expected ") + what, cur().span);
    return "";
  }

  std::string expect_string(const char* what) {
    if (cur().kind == TokKind::String) {
      std::string s = cur().text;
      advance();
      return s;
    }
    error("DSL-002", std::string("expected ") + what, cur().span);
    return "";
  }

  std::size_t make(const std::string& kind, Span span) {
    ast_.nodes.push_back({kind, span, {}, {}});
    return ast_.nodes.size() - 1;
  }

  void close(std::size_t node, std::size_t begin_tok) {
    Span s = t_[begin_tok].span;
    Span e = pos_ > 0 ? t_[pos_ - 1].span : s;
    ast_.nodes[node].span = {s.begin, e.end > s.begin ? e.end : s.end};
  }

  // Skips to the next item keyword at the current depth or the closing `}`.
  void synchronize() {
    int depth = 0;
    while (cur().kind != TokKind::End) {
      if (is_punct("{")) { ++depth; advance(); continue; }
      if (is_punct("}")) {
        if (depth == 0) return;  // caller consumes the closer
        --depth;
        advance();
        continue;
      }
      if (depth == 0 && cur().kind == TokKind::Ident) {
        static const char* kws[] = {"level", "operational", "concept", "demon",
                                    "rule", "fact", "lexicon", "entity",
                                    "relation", "observe", "vocabulary", "term",
                                    "requires", "invariant", "role"};
        for (const char* k : kws)
          if (cur().text == k) return;
      }
      advance();
    }
  }

  std::vector<std::string> ident_list(const char* what) {
    std::vector<std::string> out;
    std::string first = expect_ident(what);
    if (first.empty()) return out;
    out.push_back(first);
    while (eat_punct(",")) {
      std::string next = expect_ident(what);
      if (next.empty()) break;
      out.push_back(next);
    }
    return out;
  }

  std::size_t parse_domain() {
    std::size_t begin = pos_;
    advance();  // domain
    std::size_t node = make("domain", cur().span);
    ast_.nodes[node].atoms.push_back(expect_ident("domain name"));
    if (!expect_punct("{")) { close(node, begin); return node; }
    while (!is_punct("}") && cur().kind != TokKind::End) {
      std::size_t item = npos;
      if (is_kw("level")) item = parse_level();
      else if (is_kw("operational")) item = parse_operational();
      else if (is_kw("concept")) item = parse_concept();
      else if (is_kw("demon")) item = parse_demon();
      else if (is_kw("rule")) item = parse_rule(true);
      else if (is_kw("fact")) item = parse_rule(false);
      else if (is_kw("lexicon")) item = parse_lexicon();
      else {
        error("DSL-003", "unknown declaration `" + cur().text + "`", cur().span);
        advance();
        synchronize();
        continue;
      }
      if (item != npos) ast_.nodes[node].children.push_back(item);
    }
    expect_punct("}");
    close(node, begin);
    return node;
  }

  std::size_t parse_level() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("level", cur().span);
    std::string w = expect_ident("`notional` or `conceptual`");
    if (w != "notional" && w != "conceptual")
      error("DSL-002", "expected `notional` or `conceptual`", t_[begin + 1].span);
    ast_.nodes[node].atoms.push_back(w);
    close(node, begin);
    return node;
  }

  std::size_t parse_operational() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("operational", cur().span);
    std::string w = expect_ident("`true` or `false`");
    if (w != "true" && w != "false")
      error("DSL-002", "expected `true` or `false`", t_[begin + 1].span);
    ast_.nodes[node].atoms.push_back(w);
    close(node, begin);
    return node;
  }

  std::size_t parse_concept() {
    std::size_t begin = pos_;
    advance();  // concept
    std::size_t node = make("concept", cur().span);
    auto& atoms = ast_.nodes[node].atoms;
    atoms.resize(4);
    atoms[0] = expect_ident("concept name");
    if (is_kw("node") || is_kw("edge") || is_kw("aux")) {
      atoms[1] = cur().text;
      advance();
    }
    if (eat_kw("postulable")) {
      atoms[2] = "1";
      if (eat_kw("as")) atoms[3] = expect_ident("postulated instance name");
    }
    if (!expect_punct("{")) { synchronize(); close(node, begin); return node; }
    while (!is_punct("}") && cur().kind != TokKind::End) {
      std::size_t item = npos;
      if (is_kw("requires")) item = parse_requires();
      else if (is_kw("invariant")) item = parse_invariant();
      else if (is_kw("role")) item = parse_role();
      else {
        error("DSL-003", "unknown declaration `" + cur().text + "`", cur().span);
        advance();
        synchronize();
        continue;
      }
      if (item != npos) ast_.nodes[node].children.push_back(item);
    }
    expect_punct("}");
    close(node, begin);
    return node;
  }

  std::size_t parse_requires() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("requires", cur().span);
    auto names = ident_list("feature name");
    ast_.nodes[node].atoms = names;
    close(node, begin);
    return node;
  }

  std::size_t parse_invariant() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("invariant", cur().span);
    auto names = ident_list("quantity name");
    ast_.nodes[node].atoms = names;
    close(node, begin);
    return node;
  }

  std::size_t parse_role() {
    std::size_t begin = pos_;
    advance();  // role
    std::size_t node = make("role", cur().span);
    std::string name = expect_ident("role name");
    expect_punct(":");
    // parse_constraint() may grow the node pool, so resolve the child index
    // first and only then take references into ast_.nodes.
    std::size_t cons = parse_constraint();
    ast_.nodes[node].children.push_back(cons);
    auto& atoms = ast_.nodes[node].atoms;
    atoms.assign({name, "", "", "0", "0", ""});
    for (;;) {
      if (eat_kw("flow")) {
        std::string f = expect_ident("`in` or `out`");
        if (f != "in" && f != "out")
          error("DSL-002", "expected `in` or `out`", cur().span);
        atoms[1] = f;
      } else if (eat_kw("default")) {
        atoms[2] = expect_ident("default concept name");
        atoms[5] = "ident";
      } else if (eat_kw("optional")) {
        atoms[3] = "1";
      } else if (eat_kw("postulable-ok")) {
        atoms[4] = "1";
      } else {
        break;
      }
    }
    close(node, begin);
    return node;
  }

  std::size_t parse_constraint() {
    std::size_t begin = pos_;
    std::size_t node = make("constraint", cur().span);
    auto& atoms = ast_.nodes[node].atoms;
    if (eat_kw("any")) {
      atoms.push_back("any");
    } else if (eat_kw("distinct-from")) {
      atoms.push_back("distinct");
      atoms.push_back(expect_ident("role name"));
    } else {
      atoms.push_back("names");
      atoms.push_back(expect_ident("concept or category name"));
      while (eat_punct("|")) atoms.push_back(expect_ident("concept or category name"));
    }
    close(node, begin);
    return node;
  }

  std::size_t parse_demon() {
    std::size_t begin = pos_;
    advance();  // demon
    std::size_t node = make("demon", cur().span);
    auto& atoms = ast_.nodes[node].atoms;
    atoms.resize(7);
    atoms[0] = expect_ident("demon name");
    if (!expect_punct("{")) { synchronize(); close(node, begin); return node; }
    if (eat_kw("fills")) {
      atoms[1] = "fills";
      atoms[2] = expect_ident("concept name");
      expect_punct(".");
      atoms[3] = expect_ident("slot name");
    } else if (eat_kw("projects")) {
      atoms[1] = "projects";
      atoms[2] = expect_ident("concept name");
    } else {
      error("DSL-002", "expected `fills` or `projects`", cur().span);
      synchronize();
      expect_punct("}");
      close(node, begin);
      return node;
    }
    if (eat_kw("via")) atoms[4] = expect_ident("builtin name");
    else error("DSL-002", "expected `via`", cur().span);
    if (eat_kw("feature")) atoms[5] = expect_ident("feature name");
    if (eat_kw("value")) atoms[6] = expect_ident("value name");
    if (eat_kw("blocked")) {
      if (!eat_kw("in")) error("DSL-002", "expected `in`", cur().span);
      std::size_t blocked = make("blocked", cur().span);
      ast_.nodes[blocked].atoms = ident_list("domain name");
      ast_.nodes[node].children.push_back(blocked);
    }
    expect_punct("}");
    close(node, begin);
    return node;
  }

  std::size_t parse_rule(bool is_rule) {
    std::size_t begin = pos_;
    advance();  // rule | fact
    std::size_t node = make(is_rule ? "rule" : "fact", cur().span);
    // make("with") below may grow the node pool, so go through fresh
    // ast_.nodes[node] lookups rather than a held reference.
    ast_.nodes[node].atoms.push_back(expect_ident(is_rule ? "rule name" : "fact name"));
    if (is_rule) {
      std::string k = expect_ident("`syntactic` or `integrity`");
      if (k != "syntactic" && k != "integrity")
        error("DSL-002", "expected `syntactic` or `integrity`", cur().span);
      ast_.nodes[node].atoms.push_back(k);
    }
    if (!expect_punct("{")) { synchronize(); close(node, begin); return node; }
    if (eat_kw("asserts")) {
      ast_.nodes[node].atoms.push_back(expect_ident("assertion name"));
    } else {
      error("DSL-002", "expected `asserts`", cur().span);
      ast_.nodes[node].atoms.push_back("");
    }
    if (eat_kw("with")) {
      std::size_t with = make("with", cur().span);
      auto params = ident_list("concept name");
      ast_.nodes[with].atoms = params;
      ast_.nodes[node].children.push_back(with);
    }
    if (eat_kw("message")) {
      ast_.nodes[node].atoms.push_back(expect_string("message string"));
    } else {
      error("DSL-002", "expected `message`", cur().span);
      ast_.nodes[node].atoms.push_back("");
    }
    expect_punct("}");
    close(node, begin);
    return node;
  }

  std::size_t parse_lexicon() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("lexicon", cur().span);
    if (!expect_punct("{")) { synchronize(); close(node, begin); return node; }
    while (!is_punct("}") && cur().kind != TokKind::End) {
      std::size_t ebgn = pos_;
      std::size_t entry = make("lexentry", cur().span);
      ast_.nodes[entry].atoms.push_back(expect_string("surface word"));
      if (!eat_punct("->")) {
        error("DSL-002", "expected `->`", cur().span);
        synchronize();
        continue;
      }
      ast_.nodes[entry].atoms.push_back(expect_ident("concept name"));
      close(entry, ebgn);
      ast_.nodes[node].children.push_back(entry);
    }
    expect_punct("}");
    close(node, begin);
    return node;
  }

  std::size_t parse_scene() {
    std::size_t begin = pos_;
    advance();  // scene
    std::size_t node = make("scene", cur().span);
    ast_.nodes[node].atoms.push_back(expect_ident("scene name"));
    if (!expect_punct("{")) { close(node, begin); return node; }
    while (!is_punct("}") && cur().kind != TokKind::End) {
      std::size_t item = npos;
      if (is_kw("entity")) item = parse_entity();
      else if (is_kw("relation")) item = parse_relation();
      else if (is_kw("observe")) item = parse_observe();
      else {
        error("DSL-003", "unknown declaration `" + cur().text + "`", cur().span);
        advance();
        synchronize();
        continue;
      }
      if (item != npos) ast_.nodes[node].children.push_back(item);
    }
    expect_punct("}");
    close(node, begin);
    return node;
  }

  std::size_t parse_entity() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("entity", cur().span);
    auto& atoms = ast_.nodes[node].atoms;
    atoms.push_back(expect_ident("entity id"));
    expect_punct(":");
    atoms.push_back(expect_string("category word"));
    if (eat_kw("saliency")) {
      if (cur().kind == TokKind::Number) {
        atoms.push_back(cur().text);
        advance();
      } else {
        error("DSL-002", "expected saliency number", cur().span);
        atoms.push_back("");
      }
    } else {
      atoms.push_back("");
    }
    close(node, begin);
    return node;
  }

  std::size_t parse_relation() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("relation", cur().span);
    auto& atoms = ast_.nodes[node].atoms;
    atoms.push_back(expect_ident("relation label"));
    expect_punct("(");
    atoms.push_back(expect_ident("entity id"));
    expect_punct(",");
    atoms.push_back(expect_ident("entity id"));
    expect_punct(")");
    close(node, begin);
    return node;
  }

  std::size_t parse_observe() {
    std::size_t begin = pos_;
    advance();
    std::size_t node = make("observe", cur().span);
    ast_.nodes[node].atoms.push_back(expect_ident("observation predicate"));
    expect_punct("(");
    if (!is_punct(")")) {
      do {
        std::size_t arg = make("arg", cur().span);
        if (cur().kind == TokKind::String) {
          ast_.nodes[arg].atoms = {cur().text, "1"};
          advance();
        } else if (cur().kind == TokKind::Ident) {
          ast_.nodes[arg].atoms = {cur().text, "0"};
          advance();
        } else {
          error("DSL-002", "expected observation argument", cur().span);
          break;
        }
        ast_.nodes[node].children.push_back(arg);
      } while (eat_punct(","));
    }
    expect_punct(")");
    close(node, begin);
    return node;
  }

  std::size_t parse_features() {
    std::size_t begin = pos_;
    advance();  // features
    std::size_t node = make("features", cur().span);
    ast_.nodes[node].atoms.push_back(expect_ident("feature table name"));
    if (!expect_punct("{")) { close(node, begin); return node; }
    while (!is_punct("}") && cur().kind != TokKind::End) {
      std::size_t item = npos;
      if (is_kw("vocabulary")) {
        std::size_t vbgn = pos_;
        advance();
        item = make("vocabulary", cur().span);
        ast_.nodes[item].atoms = ident_list("feature name");
        close(item, vbgn);
      } else if (is_kw("term")) {
        std::size_t tbgn = pos_;
        advance();
        item = make("term", cur().span);
        auto& atoms = ast_.nodes[item].atoms;
        atoms.push_back(expect_string("term"));
        atoms.push_back(eat_kw("isa") ? expect_string("parent term") : "");
        expect_punct(":");
        auto feats = ident_list("feature name");
        atoms.insert(atoms.end(), feats.begin(), feats.end());
        close(item, tbgn);
      } else {
        error("DSL-003", "unknown declaration `" + cur().text + "`", cur().span);
        advance();
        synchronize();
        continue;
      }
      if (item != npos) ast_.nodes[node].children.push_back(item);
    }
    expect_punct("}");
    close(node, begin);
    return node;
  }

  const std::vector<Token>& t_;
  const std::string& file_;
  Ast& ast_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse(const SourceFile& src) {
  ParseResult result;
  auto tokens = lex(src.text, src.path, result.diagnostics);
  if (has_errors(result.diagnostics) && tokens.size() == 1) {
    // Lexing aborted outright (invalid UTF-8); nothing to parse.
    return result;
  }
  Parser p(tokens, src.path, result.ast, result.diagnostics);
  p.run();
  return result;
}

}  // namespace janus::dsl
