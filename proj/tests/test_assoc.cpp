#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "corpus_fixture.hpp"
#include "doctest.h"
#include "janus/assoc/assoc.hpp"

using namespace janus;
using namespace janus::assoc;

namespace {

// Independent oracle: counts via std::set algorithms instead of the
// engine's single-pass membership walk.
Score oracle_overlap(const FeatureSet& a, const FeatureSet& b) {
  std::vector<std::string> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  if (uni.empty()) return Score{0, 1};
  return Score{inter.size(), uni.size()};
}

FeatureSet random_set(std::mt19937& rng, const std::vector<std::string>& vocab) {
  FeatureSet out;
  std::uniform_int_distribution<int> coin(0, 1);
  for (const auto& f : vocab)
    if (coin(rng)) out.insert(f);
  return out;
}

}  // namespace

TEST_CASE("overlap: identity, disjointness, empty-empty convention") {
  FeatureSet a{"x", "y", "z"};
  CHECK(overlap(a, a) == Score{1, 1});
  CHECK(overlap(a, {}) == Score{0, 1});
  CHECK(overlap({}, a) == Score{0, 1});
  CHECK(overlap({}, {}) == Score{0, 1});
  CHECK(overlap({}, {}).value() == 0.0);
  CHECK(overlap(a, {"p", "q"}) == Score{0, 1});
}

TEST_CASE("overlap: corpus pairs match hand-counted ratios exactly") {
  const auto& kb = testing::corpus().kb;
  auto score = [&](const char* t, const char* s) {
    return overlap(kb.notional_core(t), kb.notional_core(s));
  };
  CHECK(score("energy", "electrical current") == Score{3, 6});
  CHECK(score("reservoir", "battery") == Score{3, 7});
  CHECK(score("transformer", "bulb") == Score{2, 5});
  CHECK(score("means of transfer", "wire") == Score{3, 5});
  CHECK(score("reservoir", "weight") == Score{3, 6});
  CHECK(score("transformer", "generator") == Score{3, 4});
  CHECK(score("transformer", "environment") == Score{0, 1});
  CHECK(score("transformer", "environment").num == 0);
}

TEST_CASE("overlap: exact-rational comparisons dodge float wobble") {
  // 3/6 and 1/2 are the same rational even though the stored pairs differ.
  CHECK(Score{3, 6} == Score{1, 2});
  CHECK(Score{2, 5} == Score{4, 10});
  CHECK(Score{1, 3} < Score{2, 5});
  // A third of a big denominator still compares exactly (no double rounding).
  CHECK(Score{333333333, 1000000000} < Score{1, 3});
  CHECK(Score{1, 3} < Score{333333334, 1000000000});
}

TEST_CASE("overlap: 1000 random pairs agree with a set-algebra oracle") {
  std::vector<std::string> vocab;
  for (int i = 0; i < 16; ++i) vocab.push_back("f" + std::to_string(i));
  std::mt19937 rng(20260815u);
  for (int trial = 0; trial < 1000; ++trial) {
    FeatureSet a = random_set(rng, vocab);
    FeatureSet b = random_set(rng, vocab);
    Score engine = overlap(a, b);
    Score oracle = oracle_overlap(a, b);
    REQUIRE(engine == oracle);
    // Properties: symmetry and unit range.
    REQUIRE(overlap(b, a) == engine);
    REQUIRE_FALSE(engine < Score{0, 1});
    REQUIRE_FALSE(Score{1, 1} < engine);
  }
}

TEST_CASE("overlap: growing the intersection never lowers the score") {
  std::vector<std::string> vocab;
  for (int i = 0; i < 12; ++i) vocab.push_back("f" + std::to_string(i));
  std::mt19937 rng(7u);
  for (int trial = 0; trial < 200; ++trial) {
    FeatureSet a = random_set(rng, vocab);
    FeatureSet b = random_set(rng, vocab);
    // Move one element of a\b into b: intersection grows, union is unchanged.
    std::string moved;
    for (const auto& f : a)
      if (!b.count(f)) {
        moved = f;
        break;
      }
    if (moved.empty()) continue;
    Score before = overlap(a, b);
    b.insert(moved);
    Score after = overlap(a, b);
    REQUIRE_FALSE(after < before);
    REQUIRE(before < after);  // strictly better: union did not grow
  }
}

TEST_CASE("propose_janus: ranked admissions above the threshold") {
  const auto& kb = testing::corpus().kb;
  auto th = kb::threshold_score(0.4);

  auto picks = propose_janus("Reservoir", {"battery", "wire", "bulb"}, th, kb);
  REQUIRE(picks.size() == 1);
  CHECK(picks[0].id == "Reservoir~battery");
  CHECK(picks[0].target_face == "Reservoir");
  CHECK(picks[0].source_face == "battery");
  CHECK(picks[0].score == Score{3, 7});
  CHECK(picks[0].shared_features == FeatureSet{"stores-fluid", "fillable", "emptyable"});
  CHECK_FALSE(picks[0].differentiated);

  // Nothing survives an unreachable threshold.
  CHECK(propose_janus("Transfer", {"battery"}, kb::threshold_score(0.99), kb).empty());

  // Zero-overlap candidates are silently dropped, not errors.
  auto t = propose_janus("Transfer", {"electrical current", "environment"}, th, kb);
  REQUIRE(t.size() == 1);
  CHECK(t[0].id == "Transfer~electrical current");
  CHECK(t[0].score == Score{3, 6});
  CHECK(t[0].shared_features == FeatureSet{"fluid", "circulates", "carries-causality"});
}

TEST_CASE("propose_janus: boundary scores are admitted, order is total") {
  const auto& kb = testing::corpus().kb;
  // bulb~Transformer sits exactly on 0.4 = 2/5 and must be included.
  auto picks = propose_janus("Transformer", {"bulb", "generator", "environment"},
                             kb::threshold_score(0.4), kb);
  REQUIRE(picks.size() == 2);
  CHECK(picks[0].source_face == "generator");  // 3/4 beats 2/5
  CHECK(picks[0].score == Score{3, 4});
  CHECK(picks[1].source_face == "bulb");
  CHECK(picks[1].score == Score{2, 5});

  // Equal scores fall back to candidate-name order.
  auto tie = propose_janus("Transfer", {"current", "electrical current"},
                           kb::threshold_score(0.4), kb);
  REQUIRE(tie.size() == 2);
  CHECK(tie[0].source_face == "current");
  CHECK(tie[1].source_face == "electrical current");
  CHECK(tie[0].score == tie[1].score);

  CHECK_THROWS_AS(propose_janus("Transfer", {"zzz"}, kb::threshold_score(0.4), kb),
                  EngineError);
}

TEST_CASE("form: records an active entity once, idempotently") {
  auto kb = testing::corpus_kb();
  const JanusEntity& j = form("Transfer", "electrical current", kb);
  CHECK(j.id == "Transfer~electrical current");
  CHECK(j.score == Score{3, 6});
  CHECK_FALSE(j.differentiated);
  CHECK(kb.registry.size() == 1);

  const JanusEntity& again = form("Transfer", "electrical current", kb);
  CHECK(&again == &kb.registry[0]);
  CHECK(kb.registry.size() == 1);

  // Self-association is the degenerate full overlap.
  const JanusEntity& self = form("Reservoir", "reservoir", kb);
  CHECK(self.score == Score{1, 1});
  CHECK(kb.registry.size() == 2);
}

TEST_CASE("form: refuses a bridge with no shared notion") {
  auto kb = testing::corpus_kb();
  try {
    form("Transformer", "environment", kb);
    FAIL("expected ASSOC-NO-OVERLAP");
  } catch (const EngineError& e) {
    CHECK(e.code() == "ASSOC-NO-OVERLAP");
  }
  CHECK(kb.registry.empty());
}

TEST_CASE("borrow: a slot need pulls the source face's filling demon") {
  auto kb = testing::corpus_kb();
  const JanusEntity& j = form("Transfer", "electrical current", kb);

  auto b = borrow(j, Need{Need::Kind::Slot, "direction"}, kb);
  REQUIRE(b.has_value());
  CHECK(b->janus == "Transfer~electrical current");
  CHECK(b->kind == Borrowing::Kind::Demon);
  CHECK(b->payload == "direction-from-terminals");
  CHECK(b->from == "electrical current");
  CHECK(b->to == "Transfer");

  // No identically named slot on the source face: the janus cannot help.
  CHECK_FALSE(borrow(j, Need{Need::Kind::Slot, "mode"}, kb).has_value());
  CHECK_FALSE(borrow(j, Need{Need::Kind::Slot, "nosuch"}, kb).has_value());
}

TEST_CASE("borrow: an aspect need copies the feature toward the bare face") {
  auto kb = testing::corpus_kb();
  const JanusEntity& j = form("Reservoir", "weight", kb);
  CHECK(j.score == Score{3, 6});

  // Reservoir's core carries `fillable`; weight's does not.
  auto b = borrow(j, Need{Need::Kind::Aspect, "fillable"}, kb);
  REQUIRE(b.has_value());
  CHECK(b->kind == Borrowing::Kind::Aspect);
  CHECK(b->payload == "fillable");
  CHECK(b->from == "Reservoir");
  CHECK(b->to == "weight");

  // Feature present on both faces (or neither): nothing to copy.
  CHECK_FALSE(borrow(j, Need{Need::Kind::Aspect, "emptyable"}, kb).has_value());
  CHECK_FALSE(borrow(j, Need{Need::Kind::Aspect, "transforms"}, kb).has_value());

  // The copy can also flow target -> source when the scene term is richer.
  auto r = borrow(j, Need{Need::Kind::Aspect, "causal-source"}, kb);
  REQUIRE(r.has_value());
  CHECK(r->from == "weight");
  CHECK(r->to == "Reservoir");
}

TEST_CASE("borrow: a differentiated janus refuses to lend") {
  auto kb = testing::corpus_kb();
  form("Transfer", "electrical current", kb);
  kb = kb::apply_edit(kb, kb::EditFormRegistry{{kb.registry[0]}});
  kb = kb::apply_edit(
      kb, kb::EditDifferentiate{"Transfer~electrical current", "energy", {}});
  const JanusEntity* j = kb.find_janus("Transfer~electrical current");
  REQUIRE(j != nullptr);
  REQUIRE(j->differentiated);
  try {
    borrow(*j, Need{Need::Kind::Slot, "direction"}, kb);
    FAIL("expected ASSOC-DIFFERENTIATED");
  } catch (const EngineError& e) {
    CHECK(e.code() == "ASSOC-DIFFERENTIATED");
  }
}

TEST_CASE("source_schema: surface words resolve to their home concept") {
  const auto& kb = testing::corpus().kb;
  JanusEntity j;
  j.target_face = "Transfer";
  j.source_face = "electrical current";
  const kb::Domain* home = nullptr;
  const kb::Schema* s = source_schema(j, kb, &home);
  REQUIRE(s != nullptr);
  CHECK(s->name == "ElectricalCurrent");
  REQUIRE(home != nullptr);
  CHECK(home->name == "electricity");

  // Scene categories with no lexicon entry have no source schema.
  JanusEntity bare;
  bare.target_face = "Reservoir";
  bare.source_face = "battery";
  CHECK(source_schema(bare, kb) == nullptr);
}
