#pragma once

// Logical relations on morphisms: checking, and extension of a theory by
// starred witness constants along a relation (raw, or after removing dead
// argument positions).

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "soften/error.hpp"
#include "soften/kernel.hpp"
#include "soften/modsys.hpp"
#include "soften/morphisms.hpp"
#include "soften/paramdrop.hpp"
#include "soften/translate.hpp"

namespace soften {

/// Each case r(c) must have type r̄(A) m(c) (or the witness type when m(c) is
/// undefined); unless the relation is partial, every constant whose type is a
/// type with a defined witness type needs a case.
inline void check_logrel(const Diagram& diagram, const LogicalRelation& r) {
  const Morphism& over = diagram.morphism(r.over);
  Signature source = signature_of(diagram, over.domain);
  Signature target = signature_of(diagram, over.codomain);
  Mapping m = resolve_morphism(diagram, over);
  Mapping rel = resolve_relation(diagram, r);
  for (const auto& item : r.body) {
    if (const auto* a = std::get_if<Assignment>(&item); a != nullptr && !source.contains(a->constant)) {
      throw TypeError(a->location.to_string() + ": relation case for unknown constant '" + a->constant + "' (not in " +
                      over.domain + ")");
    }
  }
  for (const auto& info : source.constants()) {
    auto value = rel.find(info.name);
    auto expected = witness_type(m, rel, info.type, m.find(info.name));
    if (value) {
      if (!expected) {
        throw TypeError("relation " + r.name + " has a case for '" + info.name + "' but its type has no relation image");
      }
      try {
        check_type(target, Context{}, *value, *expected);
      } catch (const TypeError& e) {
        throw TypeError("case " + info.name + " := " + print_expr(*value) + " in " + r.name + ": " + e.what());
      }
    } else if (!r.partial && expected) {
      Expr sort = weak_head_normalize(source, infer_type(source, Context{}, info.type));
      if (sort->tag == Tag::type) {
        throw TypeError("term-totality violation in " + r.name + ": no case for '" + info.name + "' although " +
                        print_expr(*expected) + " is defined");
      }
    }
  }
}

enum class ExtendMode { raw, cleaned };

struct ExtendState {
  PushoutState pushout;
  std::string relation;
  ExtendMode mode = ExtendMode::raw;
  std::function<std::string(const std::string&)> relation_name;
  std::map<std::string, std::string> relation_image;  // E -> r_E
  std::map<std::string, Mapping> relation_map;
  PositionSet removed;                       // keyed by output theory
  std::map<std::string, std::string> star;   // qualified source constant -> witness name
  std::vector<std::string> no_witness;       // dropped constants without a witness

  std::string name_relation(const std::string& e) const {
    return relation_name ? relation_name(e) : relation + "_" + e;
  }
};

inline ExtendState start_extend(const Diagram& diagram, const std::string& morphism, const std::string& relation,
                                ExtendMode mode) {
  ExtendState s;
  s.pushout = start_pushout(diagram, diagram.morphism(morphism));
  const LogicalRelation& r = diagram.relation(relation);
  if (r.over != morphism) throw TranslationError("relation " + relation + " is not on morphism " + morphism);
  s.relation = relation;
  s.mode = mode;
  s.relation_image[s.pushout.domain] = relation;
  s.relation_map[s.pushout.domain] = resolve_relation(diagram, r);
  if (mode == ExtendMode::raw) s.pushout.theory_name = [](const std::string& e) { return e + "_lr"; };
  return s;
}

namespace detail {

inline bool declares(const Diagram& diagram, const Theory& theory, const std::string& name) {
  Signature sig = signature_of(diagram, theory);
  return sig.contains(name);
}

}  // namespace detail

/// Pushout of E along m, cleaned in mode `cleaned`, then every declaration
/// c : A [:= t] with a defined witness type gains c* : r̄(A) m(c) [:= r̄(t)]
/// right after c (or in its place if c was dropped). Appends E^m, m_E and
/// r_E to `work`; included theories are extended first.
inline void lr_extend_theory(Diagram& work, ExtendState& state, const std::string& theory) {
  PushoutState& po = state.pushout;
  if (po.theory_image.count(theory) != 0) return;
  const Theory source = work.theory(theory);
  if (!includes_theory(work, theory, po.domain)) {
    throw TranslationError("theory " + theory + " does not include " + po.domain);
  }
  for (const auto& target : source.includes()) {
    if (target != po.domain && includes_theory(work, target, po.domain)) lr_extend_theory(work, state, target);
  }
  pushout_theory(work, po, theory);
  const std::string out_name = po.theory_image.at(theory);
  const std::string witness_name = po.witness_image.at(theory);

  LogicalRelation relation{state.name_relation(theory), witness_name, {}, false, source.location};
  detail::fresh_or_throw(work, relation.name);
  Mapping rel{relation.name, theory, out_name, {}, {}, false};
  for (const auto& target : source.includes()) {
    auto it = state.relation_image.find(target);
    if (it == state.relation_image.end()) continue;
    relation.body.push_back(Include{it->second, {}});
    detail::merge(rel, state.relation_map.at(target));
  }

  if (state.mode == ExtendMode::cleaned) {
    const Mapping uncleaned = po.witness.at(theory);
    ProtectPredicate protect = [&](const Declaration& original, std::size_t position) {
      auto witnessed = witnessed_binders(uncleaned, rel, original.type);
      return position <= witnessed.size() && witnessed[position - 1];
    };
    PositionSet positions = choose_theory_positions(work, work.theory(out_name), &source, protect);
    Theory cleaned = remove_positions_in_theory(work, work.theory(out_name), positions);
    Morphism witness = remove_positions_in_morphism(work, work.morphism(witness_name), positions);
    work.replace(cleaned);
    work.replace(witness);
    for (auto& [k, v] : positions) state.removed[k] = v;
    po.witness[theory] = resolve_morphism(work, witness);
  }
  const Mapping& m = po.witness.at(theory);

  const Theory pushed = work.theory(out_name);
  Theory out{pushed.name, {}, pushed.location};
  std::size_t k = 0;
  for (const auto& item : source.body) {
    if (std::holds_alternative<Include>(item)) {
      out.body.push_back(pushed.body.at(k++));
      continue;
    }
    const auto& d = std::get<Declaration>(item);
    bool survived = false;
    if (k < pushed.body.size()) {
      const auto* pd = std::get_if<Declaration>(&pushed.body[k]);
      if (pd != nullptr && pd->name == d.name) {
        out.body.push_back(*pd);
        ++k;
        survived = true;
      }
    }
    auto image = survived ? m.find(d.name) : std::nullopt;
    auto type = witness_type(m, rel, d.type, image);
    if (!type) {
      if (!survived) state.no_witness.push_back(qualified(theory, d.name));
      continue;
    }
    std::string star = detail::star_name(d.name);
    bool taken = detail::declares(work, source, star);
    for (const auto& i : out.body) {
      if (const auto* od = std::get_if<Declaration>(&i); od != nullptr && od->name == star) taken = true;
    }
    if (taken) throw TranslationError("witness name '" + star + "' for " + theory + "/" + d.name + " is already taken");
    std::optional<Expr> def;
    if (d.definiens) {
      def = apply_logrel(m, rel, *d.definiens);
      if (!def) {
        throw TranslationError("definiens of " + theory + "/" + d.name +
                               " has no relation image although its type has one");
      }
    }
    out.body.push_back(Declaration{star, *type, def, {}, d.location});
    rel.set(d.name, constant(star));
    relation.body.push_back(Assignment{d.name, constant(star), d.location});
    state.star[qualified(theory, d.name)] = star;
  }
  work.replace(out);
  work.add(relation);
  state.relation_image[theory] = relation.name;
  state.relation_map[theory] = rel;
}

struct ExtendResult {
  Theory theory;
  Morphism morphism;
  LogicalRelation relation;
  Diagram generated;  // everything produced, included theories first
};

/// Extends `theory` (and what it includes) along `relation` on `morphism`.
inline ExtendResult lr_extend(const Diagram& diagram, const std::string& morphism, const std::string& relation,
                              const std::string& theory, ExtendMode mode) {
  Diagram work = diagram;
  ExtendState state = start_extend(diagram, morphism, relation, mode);
  lr_extend_theory(work, state, theory);
  ExtendResult out{work.theory(state.pushout.theory_image.at(theory)),
                   work.morphism(state.pushout.witness_image.at(theory)),
                   work.relation(state.relation_image.at(theory)),
                   {}};
  for (std::size_t i = diagram.size(); i < work.size(); ++i) out.generated.add(work.items()[i]);
  return out;
}

}  // namespace soften
