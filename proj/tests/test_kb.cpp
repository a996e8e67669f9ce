#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "corpus_fixture.hpp"
#include "doctest.h"
#include "janus/dsl/dsl.hpp"
#include "janus/kb/kb.hpp"

using namespace janus;
using namespace janus::kb;

namespace {

Domain parse_domain(const std::string& text) {
  dsl::SourceFile file{"inline.domain", text, dsl::FileKind::Domain};
  auto parsed = dsl::parse(file);
  REQUIRE(parsed.ok());
  auto lowered = dsl::lower(parsed.ast, file.kind, file.path);
  REQUIRE(lowered.ok());
  REQUIRE(lowered.domain.has_value());
  return *lowered.domain;
}

FeatureTable parse_features(const std::string& text) {
  dsl::SourceFile file{"inline.features", text, dsl::FileKind::Features};
  auto parsed = dsl::parse(file);
  REQUIRE(parsed.ok());
  auto lowered = dsl::lower(parsed.ast, file.kind, file.path);
  REQUIRE(lowered.ok());
  REQUIRE(lowered.features.has_value());
  return *lowered.features;
}

std::vector<std::string> codes_of(const std::vector<Diagnostic>& diags) {
  std::vector<std::string> out;
  for (const auto& d : diags) out.push_back(d.code);
  return out;
}

}  // namespace

TEST_CASE("corpus loads clean: three domains, one table, four scenes") {
  const auto& loaded = testing::corpus();
  CHECK(loaded.diagnostics.empty());
  REQUIRE(loaded.kb.domains.size() == 3);
  CHECK(loaded.kb.find_domain("energy") != nullptr);
  CHECK(loaded.kb.find_domain("electricity") != nullptr);
  CHECK(loaded.kb.find_domain("notions") != nullptr);
  REQUIRE(loaded.kb.tables.size() == 1);
  CHECK(loaded.kb.tables[0].name == "everyday");
  CHECK(loaded.scenes.size() == 4);
  CHECK(loaded.find_scene("battery_bulb") != nullptr);
  CHECK(loaded.find_scene("weight_generator") != nullptr);
  CHECK(loaded.find_scene("two_batteries") != nullptr);
  CHECK(loaded.find_scene("tank_heater") != nullptr);
  CHECK(loaded.kb.version == 0);
  CHECK(loaded.kb.registry.empty());
  CHECK(loaded.kb.edits.empty());
}

TEST_CASE("corpus_files: sorted, top-level only, known extensions") {
  auto files = kb::corpus_files(testing::corpus_dir());
  REQUIRE(files.size() == 8);
  CHECK(std::is_sorted(files.begin(), files.end()));
  for (const auto& f : files) CHECK(f.find("variants") == std::string::npos);
  CHECK_THROWS_AS(kb::corpus_files(testing::corpus_dir() + "/no-such-dir"), EngineError);
  try {
    kb::corpus_files(testing::corpus_dir() + "/no-such-dir");
  } catch (const EngineError& e) {
    CHECK(e.code() == "IO-READ");
  }
}

TEST_CASE("register_domain rejects a duplicate name with KB-DUP") {
  auto kb = testing::corpus_kb();
  Domain dup;
  dup.name = "energy";
  CHECK_THROWS_WITH_AS(kb.register_domain(dup),
                       "KB-DUP: domain `energy` is already registered", EngineError);
  CHECK(kb.domains.size() == 3);  // rejected registration must not mutate
}

TEST_CASE("register_features rejects duplicate tables and cross-table terms") {
  auto kb = testing::corpus_kb();

  FeatureTable dup_name;
  dup_name.name = "everyday";
  CHECK_THROWS_AS(kb.register_features(dup_name), EngineError);

  // A second table re-declaring an existing term is a mismatch even when the
  // feature sets agree: every term has exactly one home table.
  auto second = parse_features(
      "features lab {\n"
      "  vocabulary fluid, circulates\n"
      "  term \"energy\" : fluid, circulates\n"
      "}\n");
  try {
    kb.register_features(second);
    FAIL("expected KB-FEATURE-MISMATCH");
  } catch (const EngineError& e) {
    CHECK(e.code() == "KB-FEATURE-MISMATCH");
  }
  CHECK(kb.tables.size() == 1);

  auto fresh = parse_features(
      "features lab {\n"
      "  vocabulary viscous\n"
      "  term \"syrup\" : viscous\n"
      "}\n");
  kb.register_features(fresh);
  CHECK(kb.tables.size() == 2);
  CHECK(kb.notional_core("syrup") == FeatureSet{"viscous"});
}

TEST_CASE("notional_core: direct terms match the table literally") {
  const auto& kb = testing::corpus().kb;
  CHECK(kb.notional_core("energy") ==
        FeatureSet{"fluid", "circulates", "storable", "carries-causality", "consumable"});
  CHECK(kb.notional_core("electrical current") ==
        FeatureSet{"fluid", "circulates", "carries-causality", "returns-to-source"});
  CHECK(kb.notional_core("weight") ==
        FeatureSet{"stores-fluid", "emptyable", "keeps-reserve", "causal-source"});
  CHECK(kb.notional_core("weight").count("fillable") == 0);
  CHECK(kb.notional_core("reservoir").count("fillable") == 1);
}

TEST_CASE("notional_core: concept names resolve through the lexicon") {
  const auto& kb = testing::corpus().kb;
  // Transfer is named by the words "transfer" and "energy"; only "energy"
  // carries features, so the concept inherits exactly that entry.
  CHECK(kb.notional_core("Transfer") == kb.notional_core("energy"));
  CHECK(kb.notional_core("Reservoir") == kb.notional_core("reservoir"));
  CHECK(kb.notional_core("Transformer") == kb.notional_core("transformer"));
  CHECK(kb.notional_core("MeansOfTransfer") == kb.notional_core("means of transfer"));
  CHECK(kb.notional_core("ElectricalCurrent") == kb.notional_core("electrical current"));
  // A featureless surface word borrows its concept's union too.
  CHECK(kb.notional_core("current") == kb.notional_core("electrical current"));
}

TEST_CASE("notional_core: unknown term raises KB-UNKNOWN-TERM") {
  const auto& kb = testing::corpus().kb;
  CHECK_THROWS_AS(kb.notional_core("zzz"), EngineError);
  try {
    kb.notional_core("zzz");
  } catch (const EngineError& e) {
    CHECK(e.code() == "KB-UNKNOWN-TERM");
    CHECK(std::string(e.what()).find("zzz") != std::string::npos);
  }
  // Words with a lexicon entry but no features anywhere are still unknown
  // notionally: nothing to overlap on.
  CHECK_THROWS_AS(kb.notional_core("work"), EngineError);
}

TEST_CASE("intersection oracle: shared features computed two independent ways") {
  const auto& kb = testing::corpus().kb;
  auto battery = kb.notional_core("battery");
  auto reservoir = kb.notional_core("reservoir");
  FeatureSet via_algorithm;
  std::set_intersection(battery.begin(), battery.end(), reservoir.begin(), reservoir.end(),
                        std::inserter(via_algorithm, via_algorithm.begin()));
  CHECK(via_algorithm == FeatureSet{"stores-fluid", "fillable", "emptyable"});
}

TEST_CASE("validate: flags dangling demon slots") {
  // The surface language already refuses a demon aimed at a missing slot, so
  // drift after lowering (e.g. a rename applied to the schema only) is staged
  // by hand to prove the knowledge base re-checks what it stores.
  auto d = parse_domain(
      "domain broken {\n"
      "  concept Course aux { }\n"
      "  concept Pipe edge { role direction : Course }\n"
      "  demon orient { fills Pipe.direction via circuit-orientation }\n"
      "}\n");
  d.demons[0].slot = "flowrate";
  KbState kb;
  kb.register_domain(d);
  auto diags = kb.validate();
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == "KB-DANGLING-SLOT");
  CHECK(diags[0].message.find("Pipe.flowrate") != std::string::npos);
  CHECK(diags[0].file == "broken");
}

TEST_CASE("validate: flags unknown builtins and consequence kinds") {
  auto d = parse_domain(
      "domain broken {\n"
      "  concept Course aux { }\n"
      "  concept Pipe edge { role direction : Course }\n"
      "  demon orient { fills Pipe.direction via telepathy }\n"
      "  rule Tidy syntactic { asserts always-tidy message \"untidy\" }\n"
      "  fact Leaks { asserts pipes-leak message \"leaky\" }\n"
      "}\n");
  KbState kb;
  kb.register_domain(d);
  auto codes = codes_of(kb.validate());
  CHECK(codes == std::vector<std::string>{"KB-UNKNOWN-BUILTIN", "KB-UNKNOWN-BUILTIN",
                                          "KB-UNKNOWN-CONSEQUENCE"});
}

TEST_CASE("validate: empty feature sets are mismatches") {
  KbState kb;
  FeatureTable t;
  t.name = "sparse";
  t.vocabulary = {"x"};
  t.entries.push_back({"hollow", std::nullopt, {}});
  kb.register_features(t);
  auto diags = kb.validate();
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == "KB-FEATURE-MISMATCH");
  CHECK(diags[0].file == "sparse");
}

TEST_CASE("builtin catalogs are closed") {
  for (const char* name : {"incident-transfer", "supplier-reservoir", "receiver-node",
                           "mode-from-means", "mode-from-emission", "currents-in-circuit",
                           "circuit-orientation"})
    CHECK(is_demon_builtin(name));
  for (const char* name : {"required-slots-filled", "transformer-has-throughput",
                           "chain-endpoints-are-reservoirs", "no-return-to-start"})
    CHECK(is_rule_builtin(name));
  for (const char* name : {"supplying-reservoir-depletes", "transformer-output-needs-input",
                           "modes-require-inflow"})
    CHECK(is_fact_builtin(name));
  CHECK_FALSE(is_demon_builtin("required-slots-filled"));
  CHECK_FALSE(is_rule_builtin("incident-transfer"));
  CHECK_FALSE(is_fact_builtin("no-return-to-start"));
  CHECK_FALSE(is_demon_builtin(""));
}

TEST_CASE("apply_edit: versions advance, base snapshot never mutates") {
  auto base = testing::corpus_kb();
  assoc::JanusEntity j;
  j.id = "Transfer~electrical current";
  j.target_face = "Transfer";
  j.source_face = "electrical current";
  j.shared_features = {"fluid", "circulates", "carries-causality"};
  j.score = Score{3, 6};

  auto v1 = apply_edit(base, EditFormRegistry{{j}});
  CHECK(v1.version == 1);
  CHECK(v1.registry.size() == 1);
  CHECK(v1.edits.size() == 1);
  CHECK(base.version == 0);
  CHECK(base.registry.empty());

  // Idempotent registry seeding: re-forming the same pair adds nothing.
  auto v2 = apply_edit(v1, EditFormRegistry{{j}});
  CHECK(v2.version == 2);
  CHECK(v2.registry.size() == 1);
}

TEST_CASE("apply_edit: differentiation is absorbing and blocks demons") {
  auto base = testing::corpus_kb();
  assoc::JanusEntity j;
  j.id = "Transfer~electrical current";
  j.target_face = "Transfer";
  j.source_face = "electrical current";
  j.score = Score{3, 6};
  auto v1 = apply_edit(base, EditFormRegistry{{j}});

  EditDifferentiate split;
  split.janus_id = j.id;
  split.target_domain = "energy";
  split.blocked_demons = {"recognize-currents", "direction-from-terminals"};
  auto v2 = apply_edit(v1, split);

  REQUIRE(v2.find_janus(j.id) != nullptr);
  CHECK(v2.find_janus(j.id)->differentiated);
  CHECK_FALSE(v1.find_janus(j.id)->differentiated);
  const Demon* rec = v2.find_demon_anywhere("recognize-currents");
  REQUIRE(rec != nullptr);
  CHECK(rec->blocked_contexts == std::vector<std::string>{"energy"});
  const Demon* dir = v2.find_demon_anywhere("direction-from-terminals");
  REQUIRE(dir != nullptr);
  CHECK(dir->blocked_contexts == std::vector<std::string>{"energy"});

  // Splitting twice, or splitting an unknown id, refuses cleanly.
  try {
    apply_edit(v2, split);
    FAIL("expected LEARN-ALREADY-SPLIT");
  } catch (const EngineError& e) {
    CHECK(e.code() == "LEARN-ALREADY-SPLIT");
  }
  EditDifferentiate ghost;
  ghost.janus_id = "Ghost~nothing";
  CHECK_THROWS_AS(apply_edit(v1, ghost), EngineError);
}

TEST_CASE("apply_edit: rebind records overrides and the attempts ledger") {
  auto base = testing::corpus_kb();
  auto v1 = apply_edit(base, EditRebind{"weight", "Reservoir", "Transformer"});
  CHECK(v1.bind_overrides.at("weight") == "Transformer");
  CHECK(v1.rebinds_tried ==
        std::vector<std::pair<std::string, std::string>>{{"weight", "Transformer"}});
  auto v2 = apply_edit(v1, EditRebind{"weight", "Transformer", ""});
  CHECK(v2.bind_overrides.at("weight") == "");  // unbound
  CHECK(v2.rebinds_tried.size() == 2);
}

TEST_CASE("apply_edit: specialize adds a schema once") {
  auto base = testing::corpus_kb();
  Schema s;
  s.name = "EnergyTransform";
  s.level = Level::Notional;
  s.kind = ConceptKind::Aux;
  auto v1 = apply_edit(base, EditSpecialize{"notions", s});
  REQUIRE(v1.find_domain("notions") != nullptr);
  CHECK(v1.find_domain("notions")->find_concept("EnergyTransform") != nullptr);
  CHECK(base.find_domain("notions")->find_concept("EnergyTransform") == nullptr);

  CHECK_THROWS_AS(apply_edit(v1, EditSpecialize{"notions", s}), EngineError);
  CHECK_THROWS_AS(apply_edit(v1, EditSpecialize{"no-such-domain", s}), EngineError);
}

TEST_CASE("replay_edits reconstructs any version exactly") {
  auto base = testing::corpus_kb();
  assoc::JanusEntity j;
  j.id = "Transfer~electrical current";
  j.target_face = "Transfer";
  j.source_face = "electrical current";
  j.score = Score{3, 6};
  Schema s;
  s.name = "EnergyTransform";
  s.kind = ConceptKind::Aux;

  auto final_state = base;
  final_state = apply_edit(final_state, EditFormRegistry{{j}});
  final_state = apply_edit(final_state,
                           EditDifferentiate{j.id, "energy", {"recognize-currents"}});
  final_state = apply_edit(final_state, EditRebind{"weight", "", "Reservoir"});
  final_state = apply_edit(final_state, EditSpecialize{"notions", s});
  CHECK(final_state.version == 4);

  auto replayed = replay_edits(base, final_state.edits);
  CHECK(replayed == final_state);

  // Replay is total history, not a diff: a truncated log lands elsewhere.
  auto partial = replay_edits(
      base, {final_state.edits.begin(), final_state.edits.begin() + 2});
  CHECK(partial != final_state);
  CHECK(partial.version == 2);
}

TEST_CASE("threshold_score: decimal knobs compare exactly against fixture ratios") {
  CHECK(kb::threshold_score(0.4) == Score{2, 5});
  CHECK(kb::threshold_score(0.5) == Score{1, 2});
  CHECK(kb::threshold_score(0.0) == Score{0, 1});
  CHECK(kb::threshold_score(1.0) == Score{1, 1});
  CHECK_FALSE(Score{2, 5} < kb::threshold_score(0.4));   // boundary admits equality
  CHECK(Score{39, 100} < kb::threshold_score(0.4));
  CHECK(kb::threshold_score(0.4) < Score{41, 100});
}

TEST_CASE("load_files: registration clashes surface as diagnostics, not crashes") {
  auto path = testing::corpus_path("energy_seed.domain");
  auto result = kb::load_files({path, path});
  CHECK_FALSE(result.ok());
  REQUIRE(result.diagnostics.size() >= 1);
  CHECK(result.diagnostics[0].code == "KB-DUP");
  CHECK(result.diagnostics[0].file == path);
  CHECK(result.kb.domains.size() == 1);  // first registration stands

  CHECK_THROWS_AS(kb::load_files({testing::corpus_path("missing.domain")}), EngineError);
}

TEST_CASE("load_files: the stripped variant forms a loadable alternate corpus") {
  auto result = kb::load_files({
      testing::corpus_path("variants/energy_stripped.domain"),
      testing::corpus_path("electricity.domain"),
      testing::corpus_path("notions.domain"),
      testing::corpus_path("notional.features"),
  });
  CHECK(result.ok());
  const Domain* energy = result.kb.find_domain("energy");
  REQUIRE(energy != nullptr);
  CHECK(energy->rules.empty());
  CHECK(energy->facts.empty());
  // Same conceptual shell as the seed domain otherwise.
  CHECK(energy->find_concept("Transfer") != nullptr);
  CHECK(energy->find_concept("Reservoir") != nullptr);
}
