#include <algorithm>

#include "janus/assoc/assoc.hpp"

namespace janus::assoc {

Score overlap(const FeatureSet& a, const FeatureSet& b) {
  std::size_t shared = 0;
  for (const auto& f : a) shared += b.count(f);
  std::size_t united = a.size() + b.size() - shared;
  if (united == 0) return {0, 1};  // both empty, by convention
  return {shared, united};
}

std::vector<JanusEntity> propose_janus(const std::string& target_concept,
                                       const std::vector<std::string>& candidates,
                                       const Score& threshold, const kb::KbState& kb) {
  FeatureSet target_core = kb.notional_core(target_concept);
  std::vector<JanusEntity> out;
  for (const auto& cand : candidates) {
    FeatureSet cand_core = kb.notional_core(cand);  // throws on unknown term
    Score score = overlap(target_core, cand_core);
    if (score < threshold) continue;
    JanusEntity j;
    j.id = janus_id(target_concept, cand);
    j.target_face = target_concept;
    j.source_face = cand;
    for (const auto& f : target_core)
      if (cand_core.count(f)) j.shared_features.insert(f);
    j.score = score;
    out.push_back(std::move(j));
  }
  std::stable_sort(out.begin(), out.end(), [](const JanusEntity& a, const JanusEntity& b) {
    if (a.score == b.score) return a.source_face < b.source_face;
    return b.score < a.score;  // descending
  });
  return out;
}

const JanusEntity& form(const std::string& target, const std::string& source,
                        kb::KbState& kb) {
  std::string id = janus_id(target, source);
  if (const JanusEntity* existing = kb.find_janus(id)) return *existing;
  FeatureSet tc = kb.notional_core(target);
  FeatureSet sc = kb.notional_core(source);
  Score score = overlap(tc, sc);
  if (score.num == 0)
    throw EngineError("ASSOC-NO-OVERLAP", "no notional bridge between `" + target +
                                              "` and `" + source + "`");
  JanusEntity j;
  j.id = id;
  j.target_face = target;
  j.source_face = source;
  for (const auto& f : tc)
    if (sc.count(f)) j.shared_features.insert(f);
  j.score = score;
  kb.registry.push_back(std::move(j));
  return kb.registry.back();
}

const kb::Schema* source_schema(const JanusEntity& janus, const kb::KbState& kb,
                                const kb::Domain** home) {
  for (const auto& d : kb.domains) {
    for (const auto& entry : d.lexicon) {
      if (entry.word != janus.source_face) continue;
      if (const kb::Schema* s = d.find_concept(entry.concept_name)) {
        if (home) *home = &d;
        return s;
      }
    }
    if (const kb::Schema* s = d.find_concept(janus.source_face)) {
      if (home) *home = &d;
      return s;
    }
  }
  return nullptr;
}

std::optional<Borrowing> borrow(const JanusEntity& janus, const Need& need,
                                const kb::KbState& kb) {
  if (janus.differentiated)
    throw EngineError("ASSOC-DIFFERENTIATED",
                      "janus entity `" + janus.id + "` is differentiated");
  if (need.kind == Need::Kind::Slot) {
    const kb::Domain* home = nullptr;
    const kb::Schema* schema = source_schema(janus, kb, &home);
    if (!schema) return std::nullopt;
    for (const auto& demon : home->demons) {
      if (demon.schema != schema->name || demon.projects) continue;
      if (demon.slot != need.name) continue;  // exact names post-lexicon
      Borrowing b;
      b.janus = janus.id;
      b.kind = Borrowing::Kind::Demon;
      b.payload = demon.id;
      b.from = janus.source_face;
      b.to = janus.target_face;
      return b;
    }
    return std::nullopt;
  }
  // Aspect: copy the feature from whichever face has it to the one lacking it.
  auto try_core = [&](const std::string& term) -> FeatureSet {
    try {
      return kb.notional_core(term);
    } catch (const EngineError&) {
      return {};
    }
  };
  FeatureSet target_core = try_core(janus.target_face);
  FeatureSet source_core = try_core(janus.source_face);
  bool in_target = target_core.count(need.name) > 0;
  bool in_source = source_core.count(need.name) > 0;
  if (in_target == in_source) return std::nullopt;  // both or neither: nothing to copy
  Borrowing b;
  b.janus = janus.id;
  b.kind = Borrowing::Kind::Aspect;
  b.payload = need.name;
  b.from = in_target ? janus.target_face : janus.source_face;
  b.to = in_target ? janus.source_face : janus.target_face;
  return b;
}

}  // namespace janus::assoc
