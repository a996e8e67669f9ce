#include <set>

#include "janus/dsl/dsl.hpp"

namespace janus::dsl {

namespace {

using kb::ConceptKind;
using kb::ConstraintKind;
using kb::Flow;
using kb::Level;
using kb::Necessity;

class Lowerer {
 public:
  Lowerer(const Ast& ast, const std::string& file, std::vector<Diagnostic>& diags)
      : ast_(ast), file_(file), diags_(diags) {}

  kb::Domain lower_domain(const AstNode& top) {
    kb::Domain d;
    d.name = top.atoms[0];
    // Concept names may be referenced before their declaration, so collect
    // them before resolving anything.
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind != "concept") continue;
      if (!concept_names_.insert(item.atoms[0]).second)
        error("DSL-012", "duplicate concept `" + item.atoms[0] + "`", item.span);
    }
    std::set<std::string> item_ids;
    std::set<std::string> lex_words;
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind == "level") {
        if (item.atoms[0] == "notional") d.level_default = Level::Notional;
        else if (item.atoms[0] == "conceptual") d.level_default = Level::Conceptual;
      } else if (item.kind == "operational") {
        d.operational = item.atoms[0] == "true";
      } else if (item.kind == "concept") {
        d.concepts.push_back(lower_concept(item));
      } else if (item.kind == "demon") {
        if (!item_ids.insert(item.atoms[0]).second)
          error("DSL-020", "duplicate declaration id `" + item.atoms[0] + "`", item.span);
        d.demons.push_back(lower_demon(item, d.name));
      } else if (item.kind == "rule") {
        if (!item_ids.insert(item.atoms[0]).second)
          error("DSL-020", "duplicate declaration id `" + item.atoms[0] + "`", item.span);
        d.rules.push_back(lower_rule(item));
      } else if (item.kind == "fact") {
        if (!item_ids.insert(item.atoms[0]).second)
          error("DSL-020", "duplicate declaration id `" + item.atoms[0] + "`", item.span);
        d.facts.push_back(lower_fact(item));
      } else if (item.kind == "lexicon") {
        for (std::size_t ei : item.children) {
          const AstNode& entry = ast_.nodes[ei];
          if (entry.atoms.size() < 2) continue;
          if (!lex_words.insert(entry.atoms[0]).second)
            error("DSL-019", "duplicate lexicon word `" + entry.atoms[0] + "`", entry.span);
          require_concept(entry.atoms[1], entry.span);
          d.lexicon.push_back({entry.atoms[0], entry.atoms[1]});
        }
      }
    }
    for (auto& c : d.concepts) c.level = d.level_default;
    // A conceptual-level schema must pin down what may fill each slot.
    if (d.level_default == Level::Conceptual) {
      for (std::size_t ci : top.children) {
        const AstNode& item = ast_.nodes[ci];
        if (item.kind != "concept") continue;
        for (std::size_t ri : item.children) {
          const AstNode& role = ast_.nodes[ri];
          if (role.kind != "role") continue;
          const AstNode& cons = ast_.nodes[role.children[0]];
          if (cons.atoms[0] != "names")
            error("DSL-013",
                  "role `" + role.atoms[0] + "` of conceptual concept `" + item.atoms[0] +
                      "` must name its admissible fillers",
                  role.span);
        }
      }
    }
    check_demon_targets(d, top);
    return d;
  }

  kb::SceneGraph lower_scene(const AstNode& top) {
    kb::SceneGraph s;
    s.name = top.atoms[0];
    std::set<std::string> ids;
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind != "entity") continue;
      if (!ids.insert(item.atoms[0]).second)
        error("DSL-023", "duplicate entity `" + item.atoms[0] + "`", item.span);
      kb::SceneEntity e;
      e.id = item.atoms[0];
      e.category = item.atoms[1];
      if (!item.atoms[2].empty()) {
        e.saliency = std::stod(item.atoms[2]);
        if (e.saliency < 0.0 || e.saliency > 1.0)
          error("DSL-018", "saliency must lie in [0, 1]", item.span);
      }
      s.entities.push_back(e);
    }
    auto require_entity = [&](const std::string& id, Span span) {
      if (!ids.count(id))
        error("DSL-017", "undeclared entity `" + id + "`", span);
    };
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind == "relation") {
        require_entity(item.atoms[1], item.span);
        require_entity(item.atoms[2], item.span);
        s.relations.push_back({item.atoms[0], item.atoms[1], item.atoms[2]});
      } else if (item.kind == "observe") {
        kb::Observation o;
        o.predicate = item.atoms[0];
        for (std::size_t ai : item.children) {
          const AstNode& arg = ast_.nodes[ai];
          if (arg.atoms[1] == "0") require_entity(arg.atoms[0], arg.span);
          o.args.push_back(arg.atoms[0]);
        }
        s.observations.push_back(o);
      }
    }
    return s;
  }

  kb::FeatureTable lower_features(const AstNode& top) {
    kb::FeatureTable t;
    t.name = top.atoms[0];
    std::set<std::string> vocab;
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind != "vocabulary") continue;
      for (const auto& f : item.atoms) {
        if (!vocab.insert(f).second)
          error("DSL-024", "duplicate vocabulary feature `" + f + "`", item.span);
        t.vocabulary.push_back(f);
      }
    }
    std::set<std::string> terms;
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind != "term") continue;
      if (!terms.insert(item.atoms[0]).second)
        error("DSL-016", "duplicate term `" + item.atoms[0] + "`", item.span);
    }
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind != "term") continue;
      kb::FeatureEntry e;
      e.term = item.atoms[0];
      if (!item.atoms[1].empty()) {
        if (!terms.count(item.atoms[1]))
          error("DSL-025", "unknown parent term `" + item.atoms[1] + "`", item.span);
        e.parent = item.atoms[1];
      }
      for (std::size_t i = 2; i < item.atoms.size(); ++i) {
        if (!vocab.count(item.atoms[i]))
          error("DSL-015", "unknown feature `" + item.atoms[i] + "`", item.span);
        e.features.insert(item.atoms[i]);
      }
      t.entries.push_back(e);
    }
    return t;
  }

 private:
  void error(const char* code, const std::string& msg, Span span) {
    diags_.push_back({code, Severity::Error, msg, file_, span});
  }

  void require_concept(const std::string& name, Span span) {
    if (!concept_names_.count(name))
      error("DSL-010", "undefined concept `" + name + "`", span);
  }

  kb::Schema lower_concept(const AstNode& item) {
    kb::Schema c;
    c.name = item.atoms[0];
    c.kind = item.atoms[1] == "edge"  ? ConceptKind::Edge
             : item.atoms[1] == "aux" ? ConceptKind::Aux
                                      : ConceptKind::Node;
    c.postulable = item.atoms[2] == "1";
    c.postulate_name = item.atoms[3];
    std::set<std::string> role_names;
    for (std::size_t ri : item.children) {
      const AstNode& sub = ast_.nodes[ri];
      if (sub.kind == "role" && !role_names.insert(sub.atoms[0]).second)
        error("DSL-011", "duplicate role `" + sub.atoms[0] + "`", sub.span);
    }
    for (std::size_t ri : item.children) {
      const AstNode& sub = ast_.nodes[ri];
      if (sub.kind == "requires") {
        for (const auto& f : sub.atoms) c.required_features.push_back(f);
      } else if (sub.kind == "invariant") {
        for (const auto& q : sub.atoms) c.invariance.push_back(q);
      } else if (sub.kind == "role") {
        c.slots.push_back(lower_role(sub, role_names));
      }
    }
    return c;
  }

  kb::Slot lower_role(const AstNode& role, const std::set<std::string>& role_names) {
    kb::Slot s;
    s.name = role.atoms[0];
    s.flow = role.atoms[1] == "in" ? Flow::In : role.atoms[1] == "out" ? Flow::Out : Flow::None;
    s.necessity = role.atoms[3] == "1" ? Necessity::Optional : Necessity::Required;
    s.postulation_allowed = role.atoms[4] == "1";
    const AstNode& cons = ast_.nodes[role.children[0]];
    if (cons.atoms[0] == "any") {
      s.constraint.kind = kb::SlotConstraint::Kind::Any;
    } else if (cons.atoms[0] == "distinct") {
      s.constraint.kind = kb::SlotConstraint::Kind::DistinctFrom;
      s.constraint.other_role = cons.atoms.size() > 1 ? cons.atoms[1] : "";
      if (!role_names.count(s.constraint.other_role))
        error("DSL-022", "distinct-from references unknown role `" + s.constraint.other_role + "`",
              cons.span);
    } else {
      s.constraint.kind = kb::SlotConstraint::Kind::Names;
      for (std::size_t i = 1; i < cons.atoms.size(); ++i) {
        require_concept(cons.atoms[i], cons.span);
        s.constraint.names.push_back(cons.atoms[i]);
      }
    }
    if (!role.atoms[2].empty()) {
      s.default_value = role.atoms[2];
      if (role.atoms[5] == "ident") {
        require_concept(role.atoms[2], role.span);
        if (s.constraint.kind == kb::SlotConstraint::Kind::Names) {
          bool admissible = false;
          for (const auto& n : s.constraint.names) admissible |= n == role.atoms[2];
          if (!admissible)
            error("DSL-014", "default `" + role.atoms[2] + "` violates the role constraint",
                  role.span);
        }
      }
    }
    return s;
  }

  kb::Demon lower_demon(const AstNode& item, const std::string& domain_name) {
    kb::Demon d;
    d.id = item.atoms[0];
    d.home_domain = domain_name;
    d.projects = item.atoms[1] == "projects";
    d.schema = item.atoms[2];
    d.slot = item.atoms[3];
    d.builtin = item.atoms[4];
    d.feature_param = item.atoms[5];
    d.value_param = item.atoms[6];
    require_concept(d.schema, item.span);
    if (!d.value_param.empty()) require_concept(d.value_param, item.span);
    for (std::size_t bi : item.children) {
      const AstNode& blocked = ast_.nodes[bi];
      if (blocked.kind == "blocked") d.blocked_contexts = blocked.atoms;
    }
    return d;
  }

  // The filled slot must exist on the demon's schema; checked after all
  // concepts are lowered so declaration order never matters.
  void check_demon_targets(const kb::Domain& d, const AstNode& top) {
    std::size_t demon_idx = 0;
    for (std::size_t ci : top.children) {
      const AstNode& item = ast_.nodes[ci];
      if (item.kind != "demon") continue;
      const kb::Demon& demon = d.demons[demon_idx++];
      if (demon.projects || demon.slot.empty()) continue;
      const kb::Schema* schema = d.find_concept(demon.schema);
      if (schema && !schema->find_slot(demon.slot))
        error("DSL-021", "unknown role `" + demon.slot + "` on concept `" + demon.schema + "`",
              item.span);
    }
  }

  kb::MetaConstraint lower_rule(const AstNode& item) {
    kb::MetaConstraint r;
    r.id = item.atoms[0];
    r.kind = item.atoms[1] == "integrity" ? ConstraintKind::Integrity : ConstraintKind::Syntactic;
    r.builtin = item.atoms[2];
    r.message = item.atoms[3];
    for (std::size_t wi : item.children) {
      const AstNode& with = ast_.nodes[wi];
      if (with.kind != "with") continue;
      for (const auto& p : with.atoms) {
        require_concept(p, with.span);
        r.params.push_back(p);
      }
    }
    return r;
  }

  kb::WorldFact lower_fact(const AstNode& item) {
    kb::WorldFact f;
    f.id = item.atoms[0];
    f.builtin = item.atoms[1];
    f.message = item.atoms[2];
    for (std::size_t wi : item.children) {
      const AstNode& with = ast_.nodes[wi];
      if (with.kind != "with") continue;
      for (const auto& p : with.atoms) {
        require_concept(p, with.span);
        f.params.push_back(p);
      }
    }
    return f;
  }

  const Ast& ast_;
  const std::string& file_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string> concept_names_;
};

}  // namespace

LowerResult lower(const Ast& ast, FileKind kind, const std::string& file) {
  LowerResult r;
  if (ast.empty() || ast.root().children.empty()) {
    r.diagnostics.push_back(
        {"DSL-004", Severity::Error, "missing top-level declaration", file, {0, 0}});
    return r;
  }
  const AstNode& top = ast.nodes[ast.root().children[0]];
  const char* want = kind == FileKind::Domain  ? "domain"
                     : kind == FileKind::Scene ? "scene"
                                               : "features";
  if (top.kind != want) {
    r.diagnostics.push_back({"DSL-005", Severity::Error,
                             "file declares a `" + top.kind + "`, expected a `" + want + "`",
                             file, top.span});
    return r;
  }
  Lowerer lw(ast, file, r.diagnostics);
  if (kind == FileKind::Domain) r.domain = lw.lower_domain(top);
  else if (kind == FileKind::Scene) r.scene = lw.lower_scene(top);
  else r.features = lw.lower_features(top);
  return r;
}

}  // namespace janus::dsl
