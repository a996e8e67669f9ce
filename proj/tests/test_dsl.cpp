#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "janus/dsl/dsl.hpp"

using namespace janus;
using namespace janus::dsl;

namespace {

std::string corpus(const std::string& name) {
  return read_file(std::string(JANUS_CORPUS_DIR) + "/" + name);
}

const std::vector<std::pair<std::string, FileKind>> kCorpusFiles = {
    {"energy_seed.domain", FileKind::Domain},
    {"electricity.domain", FileKind::Domain},
    {"notions.domain", FileKind::Domain},
    {"variants/energy_stripped.domain", FileKind::Domain},
    {"battery_bulb.scene", FileKind::Scene},
    {"weight_generator.scene", FileKind::Scene},
    {"two_batteries.scene", FileKind::Scene},
    {"tank_heater.scene", FileKind::Scene},
    {"notional.features", FileKind::Features},
};

ParseResult parse_text(const std::string& text, FileKind kind = FileKind::Domain) {
  return parse(SourceFile{"test-input", text, kind});
}

LowerResult lower_text(const std::string& text, FileKind kind) {
  auto p = parse_text(text, kind);
  REQUIRE(p.ok());
  return lower(p.ast, kind, "test-input");
}

bool has_code(const std::vector<Diagnostic>& diags, const std::string& code) {
  for (const auto& d : diags)
    if (d.code == code) return true;
  return false;
}

std::size_t count_code(const std::vector<Diagnostic>& diags, const std::string& code) {
  std::size_t n = 0;
  for (const auto& d : diags) n += d.code == code;
  return n;
}

}  // namespace

TEST_CASE("lexer: identifiers, puncts, comments, spans") {
  const std::string text = "demon a-b {\n  # note with { braces }\n  fills T.x\n}\n";
  std::vector<Diagnostic> diags;
  auto toks = lex(text, "t", diags);
  CHECK(diags.empty());
  std::vector<std::pair<TokKind, std::string>> expect = {
      {TokKind::Ident, "demon"}, {TokKind::Ident, "a-b"},  {TokKind::Punct, "{"},
      {TokKind::Ident, "fills"}, {TokKind::Ident, "T"},    {TokKind::Punct, "."},
      {TokKind::Ident, "x"},     {TokKind::Punct, "}"},    {TokKind::End, ""},
  };
  REQUIRE(toks.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(toks[i].kind == expect[i].first);
    CHECK(toks[i].text == expect[i].second);
  }
  // Spans point at the exact lexeme bytes (oracle: find the lexeme).
  CHECK(toks[1].span.begin == text.find("a-b"));
  CHECK(toks[1].span.end == text.find("a-b") + 3);
  CHECK(toks[3].span.begin == text.find("fills"));
  CHECK(toks.back().span == Span{text.size(), text.size()});
}

TEST_CASE("lexer: strings, numbers, arrow") {
  std::vector<Diagnostic> diags;
  auto toks = lex("\"a b\" -> X 0.75 12", "t", diags);
  CHECK(diags.empty());
  REQUIRE(toks.size() == 6);
  CHECK(toks[0].kind == TokKind::String);
  CHECK(toks[0].text == "a b");
  CHECK(toks[1].kind == TokKind::Punct);
  CHECK(toks[1].text == "->");
  CHECK(toks[3].kind == TokKind::Number);
  CHECK(toks[3].text == "0.75");
  CHECK(toks[4].kind == TokKind::Number);
  CHECK(toks[4].text == "12");
}

TEST_CASE("lexer: arrow splits a trailing identifier hyphen") {
  std::vector<Diagnostic> diags;
  auto toks = lex("x->y", "t", diags);
  CHECK(diags.empty());
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].text == "x");
  CHECK(toks[1].text == "->");
  CHECK(toks[2].text == "y");
}

TEST_CASE("lexer: unterminated string is a lexical error with a sound span") {
  const std::string text = "lexicon { \"open\n}";
  std::vector<Diagnostic> diags;
  auto toks = lex(text, "t", diags);
  REQUIRE(has_code(diags, "DSL-001"));
  for (const auto& d : diags) {
    CHECK(d.span.begin <= d.span.end);
    CHECK(d.span.end <= text.size());
  }
  CHECK(toks.back().kind == TokKind::End);
}

TEST_CASE("lexer: invalid UTF-8 aborts with DSL-000") {
  std::string text = "domain d { }";
  text += static_cast<char>(0x80);
  std::vector<Diagnostic> diags;
  auto toks = lex(text, "t", diags);
  CHECK(has_code(diags, "DSL-000"));
  CHECK(toks.size() == 1);  // just the end marker
}

TEST_CASE("parse: minimal domain yields one domain node with one concept child") {
  auto p = parse_text("domain energy { concept Reservoir { role stores : Energy } }");
  REQUIRE(p.ok());
  const auto& root = p.ast.root();
  REQUIRE(root.children.size() == 1);
  const auto& dom = p.ast.nodes[root.children[0]];
  CHECK(dom.kind == "domain");
  CHECK(dom.atoms[0] == "energy");
  REQUIRE(dom.children.size() == 1);
  const auto& con = p.ast.nodes[dom.children[0]];
  CHECK(con.kind == "concept");
  CHECK(con.atoms[0] == "Reservoir");
  REQUIRE(con.children.size() == 1);
  CHECK(p.ast.nodes[con.children[0]].kind == "role");
}

TEST_CASE("parse: empty file reports a missing declaration at 0..0") {
  for (const char* text : {"", "# only a comment\n"}) {
    auto p = parse_text(text);
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].message == "missing top-level declaration");
    CHECK(p.diagnostics[0].code == "DSL-004");
    CHECK(p.diagnostics[0].span == Span{0, 0});
  }
}

TEST_CASE("parse: unknown top-level keyword") {
  auto p = parse_text("module x { }");
  CHECK(has_code(p.diagnostics, "DSL-003"));
}

TEST_CASE("parse: recovery reports every bad block and keeps the good ones") {
  auto p = parse_text(
      "domain d {\n"
      "  concpt A { }\n"
      "  concept B node { }\n"
      "  demno x { }\n"
      "}\n");
  CHECK(count_code(p.diagnostics, "DSL-003") == 2);
  const auto& dom = p.ast.nodes[p.ast.root().children[0]];
  REQUIRE(dom.children.size() == 1);
  CHECK(p.ast.nodes[dom.children[0]].atoms[0] == "B");
}

TEST_CASE("parse: unbalanced block terminates with diagnostics") {
  auto p = parse_text("domain d { concept A {");
  CHECK(has_errors(p.diagnostics));
  CHECK(!p.ast.empty());
}

TEST_CASE("parse: span invariants hold on every corpus file") {
  for (const auto& [name, kind] : kCorpusFiles) {
    CAPTURE(name);
    const std::string text = corpus(name);
    auto p = parse(SourceFile{name, text, kind});
    REQUIRE(p.ok());
    for (const auto& node : p.ast.nodes) {
      CHECK(node.span.begin <= node.span.end);
      CHECK(node.span.end <= text.size());
      Span prev{0, 0};
      bool first = true;
      for (std::size_t ci : node.children) {
        const auto& child = p.ast.nodes[ci];
        CHECK(node.span.contains(child.span));
        if (!first) CHECK(prev.end <= child.span.begin);  // siblings do not overlap
        prev = child.span;
        first = false;
      }
    }
  }
}

TEST_CASE("parse: identical bytes give identical trees and diagnostics") {
  const std::string text = corpus("energy_seed.domain");
  auto a = parse(SourceFile{"f", text, FileKind::Domain});
  auto b = parse(SourceFile{"f", text, FileKind::Domain});
  CHECK(a.ast == b.ast);
  CHECK(a.diagnostics == b.diagnostics);
}

TEST_CASE("lower: energy seed domain structure") {
  auto r = lower_text(corpus("energy_seed.domain"), FileKind::Domain);
  REQUIRE(r.ok());
  REQUIRE(r.domain.has_value());
  const kb::Domain& d = *r.domain;
  CHECK(d.name == "energy");
  CHECK(d.level_default == kb::Level::Conceptual);
  CHECK(!d.operational);
  CHECK(d.concepts.size() == 11);

  const kb::Schema* res = d.find_concept("Reservoir");
  REQUIRE(res);
  CHECK(res->kind == kb::ConceptKind::Node);
  CHECK(res->postulable);
  CHECK(res->postulate_name == "environment");
  CHECK(res->required_features == std::vector<std::string>{"fillable", "emptyable"});
  REQUIRE(res->slots.size() == 1);
  CHECK(res->slots[0].name == "stores");
  CHECK(res->slots[0].constraint.names == std::vector<std::string>{"Energy"});
  CHECK(res->slots[0].default_value == "Energy");

  const kb::Schema* tr = d.find_concept("Transformer");
  REQUIRE(tr);
  REQUIRE(tr->slots.size() == 2);
  CHECK(tr->slots[0].name == "source");
  CHECK(tr->slots[0].flow == kb::Flow::In);
  CHECK(tr->slots[0].constraint.names ==
        std::vector<std::string>{"Reservoir", "Transformer"});
  CHECK(tr->slots[1].name == "sink");
  CHECK(tr->slots[1].flow == kb::Flow::Out);
  CHECK(tr->slots[1].postulation_allowed);

  const kb::Schema* xf = d.find_concept("Transfer");
  REQUIRE(xf);
  CHECK(xf->kind == kb::ConceptKind::Edge);
  REQUIRE(xf->slots.size() == 2);
  CHECK(xf->slots[1].name == "mode");
  CHECK(xf->slots[1].constraint.names.size() == 5);
  CHECK(xf->slots[1].default_value == "Work");

  REQUIRE(d.demons.size() == 7);
  CHECK(d.demons[0].id == "source-from-incident");
  CHECK(d.demons[0].home_domain == "energy");
  CHECK(d.demons[0].schema == "Transformer");
  CHECK(d.demons[0].slot == "source");
  CHECK(d.demons[0].builtin == "incident-transfer");
  const kb::Demon* me = d.find_demon("mode-electrical");
  REQUIRE(me);
  CHECK(me->feature_param == "conducts-electricity");
  CHECK(me->value_param == "ElectricalWork");

  REQUIRE(d.rules.size() == 4);
  const kb::MetaConstraint& chain = d.rules[2];
  CHECK(chain.id == "ChainEndpoints");
  CHECK(chain.kind == kb::ConstraintKind::Integrity);
  CHECK(chain.builtin == "chain-endpoints-are-reservoirs");
  CHECK(chain.message == "a complete energy chain starts and ends with a reservoir");
  CHECK(d.rules[3].id == "DistinctEndpoints");
  CHECK(d.rules[3].message == "the initial and final reservoirs must be different");

  REQUIRE(d.facts.size() == 3);
  CHECK(d.facts[0].id == "WearOut");
  CHECK(d.facts[2].params == std::vector<std::string>{"Heat", "Radiation"});

  CHECK(d.lexicon.size() == 12);
  CHECK(d.surface_word("Transfer") == "transfer");
  CHECK(d.words_for("Transfer") == std::vector<std::string>{"transfer", "energy"});
  CHECK(d.words_for("Heat") == std::vector<std::string>{"heat", "warmth"});
}

TEST_CASE("lower: battery-bulb scene has the four salient entities") {
  auto r = lower_text(corpus("battery_bulb.scene"), FileKind::Scene);
  REQUIRE(r.ok());
  const kb::SceneGraph& s = *r.scene;
  CHECK(s.name == "battery_bulb");
  REQUIRE(s.entities.size() == 4);
  CHECK(s.entities[0].id == "battery");
  CHECK(s.entities[0].category == "battery");
  CHECK(s.entities[0].saliency == doctest::Approx(0.9));
  CHECK(s.find_entity("wire1"));
  CHECK(s.find_entity("wire2"));
  CHECK(s.find_entity("bulb"));
  CHECK(s.relations.size() == 4);
  CHECK(s.relations[0] == kb::SceneRelation{"connects", "wire1", "battery"});
  REQUIRE(s.observations.size() == 4);
  CHECK(s.observations[3].predicate == "equal");
  CHECK(s.observations[3].args == std::vector<std::string>{"energy", "before", "after"});
}

TEST_CASE("lower: notional feature table entries are literal sets") {
  auto r = lower_text(corpus("notional.features"), FileKind::Features);
  REQUIRE(r.ok());
  const kb::FeatureTable& t = *r.features;
  CHECK(t.name == "everyday");
  CHECK(t.vocabulary.size() == 25);
  CHECK(t.entries.size() == 12);
  const kb::FeatureEntry* energy = t.find("energy");
  REQUIRE(energy);
  CHECK(energy->features ==
        FeatureSet{"fluid", "circulates", "storable", "carries-causality", "consumable"});
  const kb::FeatureEntry* current = t.find("electrical current");
  REQUIRE(current);
  CHECK(current->features ==
        FeatureSet{"fluid", "circulates", "carries-causality", "returns-to-source"});
  const kb::FeatureEntry* weight = t.find("weight");
  REQUIRE(weight);
  CHECK(!weight->features.count("fillable"));  // the aspect a reservoir must borrow
}

TEST_CASE("lower: kind mismatch between header and expected kind") {
  auto p = parse_text("domain d { }", FileKind::Domain);
  REQUIRE(p.ok());
  auto r = lower(p.ast, FileKind::Scene, "t");
  CHECK(has_code(r.diagnostics, "DSL-005"));
}

TEST_CASE("lower: undefined concept reference message matches the contract") {
  auto r = lower_text(
      "domain d { rule R syntactic { asserts x with Conduit message \"m\" } }",
      FileKind::Domain);
  REQUIRE(count_code(r.diagnostics, "DSL-010") == 1);
  for (const auto& diag : r.diagnostics)
    if (diag.code == "DSL-010") CHECK(diag.message == "undefined concept `Conduit`");
}

TEST_CASE("lower: diagnostic code per malformation") {
  struct Row {
    const char* code;
    const char* text;
    FileKind kind;
  };
  const std::vector<Row> rows = {
      {"DSL-011", "domain d { concept A node { role r : A role r : A } }", FileKind::Domain},
      {"DSL-012", "domain d { concept A node { } concept A node { } }", FileKind::Domain},
      {"DSL-013", "domain d { level conceptual concept A node { role r : any } }",
       FileKind::Domain},
      {"DSL-014", "domain d { concept A node { } concept C node { } concept B node { role r : A default C } }",
       FileKind::Domain},
      {"DSL-015", "features f { vocabulary a, b term \"t\" : a, zz }", FileKind::Features},
      {"DSL-016", "features f { vocabulary a term \"t\" : a term \"t\" : a }",
       FileKind::Features},
      {"DSL-017", "scene s { entity e : \"w\" relation r(e, ghost) }", FileKind::Scene},
      {"DSL-017", "scene s { entity e : \"w\" observe p(ghost) }", FileKind::Scene},
      {"DSL-018", "scene s { entity e : \"w\" saliency 1.5 }", FileKind::Scene},
      {"DSL-019",
       "domain d { concept A node { } lexicon { \"w\" -> A \"w\" -> A } }",
       FileKind::Domain},
      {"DSL-020",
       "domain d { concept A node { role r : A } demon x { fills A.r via b } demon x { fills A.r via b } }",
       FileKind::Domain},
      {"DSL-021", "domain d { concept A node { } demon x { fills A.r via b } }",
       FileKind::Domain},
      {"DSL-022",
       "domain d { level notional concept A { role x : any role y : distinct-from z } }",
       FileKind::Domain},
      {"DSL-023", "scene s { entity e : \"w\" entity e : \"w\" }", FileKind::Scene},
      {"DSL-024", "features f { vocabulary a, a }", FileKind::Features},
      {"DSL-025", "features f { vocabulary a term \"t\" isa \"nope\" : a }",
       FileKind::Features},
  };
  for (const auto& row : rows) {
    CAPTURE(row.code);
    CAPTURE(row.text);
    auto r = lower_text(row.text, row.kind);
    CHECK(has_code(r.diagnostics, row.code));
  }
}

TEST_CASE("lower: diagnostics carry sound spans") {
  const std::string text = "domain d { concept A node { } concept A node { } }";
  auto r = lower_text(text, FileKind::Domain);
  REQUIRE(has_errors(r.diagnostics));
  for (const auto& diag : r.diagnostics) {
    CHECK(diag.span.begin <= diag.span.end);
    CHECK(diag.span.end <= text.size());
  }
}

TEST_CASE("serialize: round-trip is a fixpoint on every corpus file") {
  for (const auto& [name, kind] : kCorpusFiles) {
    CAPTURE(name);
    auto first = lower_text(corpus(name), kind);
    REQUIRE(first.ok());
    std::string s1;
    if (kind == FileKind::Domain) s1 = serialize(*first.domain);
    else if (kind == FileKind::Scene) s1 = serialize(*first.scene);
    else s1 = serialize(*first.features);

    auto second = lower_text(s1, kind);
    REQUIRE(second.ok());
    if (kind == FileKind::Domain) CHECK(*first.domain == *second.domain);
    else if (kind == FileKind::Scene) CHECK(*first.scene == *second.scene);
    else CHECK(*first.features == *second.features);

    std::string s2;
    if (kind == FileKind::Domain) s2 = serialize(*second.domain);
    else if (kind == FileKind::Scene) s2 = serialize(*second.scene);
    else s2 = serialize(*second.features);
    CHECK(s1 == s2);
  }
}

TEST_CASE("serialize: canonical text is LF-only and stable across calls") {
  auto r = lower_text(corpus("electricity.domain"), FileKind::Domain);
  std::string a = serialize(*r.domain);
  std::string b = serialize(*r.domain);
  CHECK(a == b);
  CHECK(a.find('\r') == std::string::npos);
  CHECK(!a.empty());
  CHECK(a.back() == '\n');
}

TEST_CASE("serialize: empty scene prints the compact form") {
  kb::SceneGraph s;
  s.name = "void";
  CHECK(serialize(s) == "scene void { }\n");
}

TEST_CASE("invariant items parse, lower, and round-trip") {
  auto r = lower_text(
      "domain d { level notional concept T { invariant energy role x : any } }",
      FileKind::Domain);
  REQUIRE(r.ok());
  REQUIRE(r.domain->concepts.size() == 1);
  CHECK(r.domain->concepts[0].invariance == std::vector<std::string>{"energy"});
  auto again = lower_text(serialize(*r.domain), FileKind::Domain);
  REQUIRE(again.ok());
  CHECK(*r.domain == *again.domain);
}

TEST_CASE("kind_from_path maps extensions") {
  CHECK(kind_from_path("a/b/x.domain") == FileKind::Domain);
  CHECK(kind_from_path("x.scene") == FileKind::Scene);
  CHECK(kind_from_path("deep/notional.features") == FileKind::Features);
  CHECK(!kind_from_path("x.txt").has_value());
}
