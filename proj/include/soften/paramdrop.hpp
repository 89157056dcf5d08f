#pragma once

// Argument positions c^i are 1-based over the leading Π binders of c's type.
// A set of unused positions can be removed from a whole diagram.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "soften/error.hpp"
#include "soften/expr.hpp"
#include "soften/kernel.hpp"
#include "soften/modsys.hpp"
#include "soften/morphisms.hpp"

namespace soften {

/// Positions per constant, keyed by qualified name `Theory/constant`.
using PositionSet = std::map<std::string, std::set<std::size_t>>;

inline std::string qualified(const std::string& theory, const std::string& constant) {
  return theory + "/" + constant;
}

/// Positions of a constant as seen from some scope; nullptr if none.
using PositionLookup = std::function<const std::set<std::size_t>*(const std::string&)>;

inline std::size_t arity(const Diagram& diagram, const std::string& theory, const std::string& constant) {
  Signature sig = signature_of(diagram, theory);
  const ConstantInfo* info = sig.find(constant);
  if (info == nullptr) throw TypeError("unknown constant '" + constant + "' in " + theory);
  return pi_arity(normalize(&sig, info->type, false));
}

namespace detail {

/// Resolves constant names through the signature of `theory`.
inline PositionLookup scope_lookup(const Signature& sig, const PositionSet& positions) {
  return [&sig, &positions](const std::string& name) -> const std::set<std::size_t>* {
    const ConstantInfo* info = sig.find(name);
    if (info == nullptr) return nullptr;
    auto it = positions.find(qualified(info->origin, name));
    return it == positions.end() || it->second.empty() ? nullptr : &it->second;
  };
}

/// True iff variable `index` occurs in `e` other than inside an argument at
/// a position the lookup reports as removed.
inline bool occurs_outside(const Expr& e, std::size_t index, const PositionLookup& removed) {
  switch (e->tag) {
    case Tag::variable:
      return e->index == index;
    case Tag::pi:
    case Tag::lambda:
      return occurs_outside(e->first, index, removed) || occurs_outside(e->second, index + 1, removed);
    case Tag::app: {
      Spine s = spine(e);
      const std::set<std::size_t>* skip = s.head->tag == Tag::constant ? removed(s.head->name) : nullptr;
      if (occurs_outside(s.head, index, removed)) return true;
      for (std::size_t i = 0; i < s.args.size(); ++i) {
        if (skip != nullptr && skip->count(i + 1) != 0) continue;
        if (occurs_outside(s.args[i], index, removed)) return true;
      }
      return false;
    }
    default:
      return false;
  }
}

/// Deletes arguments at removed positions. Occurrences must be applied to at
/// least the highest removed position (see eta_expand_applications).
inline Expr remove_arguments(const Expr& e, const PositionLookup& removed) {
  switch (e->tag) {
    case Tag::pi:
    case Tag::lambda:
      return rebuild_binder(e, remove_arguments(e->first, removed), remove_arguments(e->second, removed));
    case Tag::constant:
    case Tag::app: {
      Spine s = spine(e);
      const std::set<std::size_t>* skip = s.head->tag == Tag::constant ? removed(s.head->name) : nullptr;
      if (skip != nullptr && s.args.size() < *skip->rbegin()) {
        throw TranslationError("occurrence of '" + s.head->name + "' is under-applied; η-expand first");
      }
      Expr head = s.head->tag == Tag::constant ? s.head : remove_arguments(s.head, removed);
      std::vector<Expr> args;
      for (std::size_t i = 0; i < s.args.size(); ++i) {
        if (skip != nullptr && skip->count(i + 1) != 0) continue;
        args.push_back(remove_arguments(s.args[i], removed));
      }
      return apply_args(head, args);
    }
    default:
      return e;
  }
}

/// Checks that the variable of binder `position` in a telescope of `tag`
/// binders is unused, skipping the binder types of other positions in `own`.
inline bool position_unused(const Expr& e, std::size_t position, const std::set<std::size_t>& own, Tag tag,
                            const PositionLookup& removed) {
  Expr t = e;
  for (std::size_t j = 1; j < position; ++j) {
    if (t->tag != tag) return false;
    t = t->second;
  }
  if (t->tag != tag) return false;
  t = t->second;
  std::size_t index = 0;
  for (std::size_t j = position + 1; t->tag == tag; ++j, ++index) {
    if (own.count(j) == 0 && occurs_outside(t->first, index, removed)) return false;
    t = t->second;
  }
  return !occurs_outside(t, index, removed);
}

/// Removes the binders at `positions` from a telescope; throws if one of
/// their variables is still used.
inline Expr strip_binders(const Expr& e, const std::set<std::size_t>& positions, Tag tag, std::size_t current = 1) {
  if (positions.empty() || current > *positions.rbegin()) return e;
  if (e->tag != tag) throw TranslationError("cannot remove position " + std::to_string(current) + ": too few binders");
  Expr inner = strip_binders(e->second, positions, tag, current + 1);
  if (positions.count(current) == 0) return rebuild_binder(e, e->first, inner);
  if (occurs(inner, 0)) {
    throw TranslationError("cannot remove position " + std::to_string(current) + ": its variable '" + e->name +
                           "' is still used");
  }
  return strengthen(inner, 0);
}

inline std::map<std::string, std::size_t> removal_arities(const Signature& sig, const PositionSet& positions) {
  std::map<std::string, std::size_t> out;
  for (const auto& info : sig.constants()) {
    auto it = positions.find(qualified(info.origin, info.name));
    if (it != positions.end() && !it->second.empty()) out[info.name] = *it->second.rbegin();
  }
  return out;
}

/// η-expands occurrences of affected constants, deletes removed arguments, normalizes.
inline Expr clean(const Signature& sig, const PositionSet& positions, const Expr& e) {
  auto arities = removal_arities(sig, positions);
  if (arities.empty()) return e;
  Expr expanded = eta_expand_applications(sig, e, arities);
  return beta_normalize(remove_arguments(expanded, scope_lookup(sig, positions)));
}

/// `value` (of type `type`) with at least `count` leading λ binders.
inline Expr with_lambdas(const Expr& value, const Expr& type, std::size_t count) {
  if (lambda_arity(value) >= count) return value;
  return beta_normalize(eta_expand(value, type, count));
}

inline std::vector<Annotation> renumber(const std::vector<Annotation>& annotations,
                                        const std::set<std::size_t>& removed) {
  std::vector<Annotation> out;
  for (const auto& a : annotations) {
    if (const auto* keep = std::get_if<KeepParam>(&a)) {
      if (removed.count(keep->index) != 0) continue;
      std::size_t shift_by = std::count_if(removed.begin(), removed.end(), [&](std::size_t r) { return r < keep->index; });
      out.push_back(KeepParam{keep->index - shift_by});
    } else {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace detail

/// Rewrites one theory of `diagram` (which must contain it) for `positions`.
inline Theory remove_positions_in_theory(const Diagram& diagram, const Theory& theory, const PositionSet& positions) {
  Theory out{theory.name, {}, theory.location};
  Signature sig;
  for (const auto& fd : flatten(diagram, theory)) {
    sig.add({fd.declaration->name, fd.origin, fd.declaration->type, fd.declaration->definiens});
  }
  for (const auto& item : theory.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      out.body.push_back(*inc);
      continue;
    }
    const auto& d = std::get<Declaration>(item);
    auto it = positions.find(qualified(theory.name, d.name));
    std::set<std::size_t> own = it == positions.end() ? std::set<std::size_t>{} : it->second;
    Declaration nd = d;
    nd.type = detail::strip_binders(detail::clean(sig, positions, d.type), own, Tag::pi);
    if (d.definiens) {
      Expr def = own.empty() ? *d.definiens : detail::with_lambdas(*d.definiens, d.type, *own.rbegin());
      nd.definiens = detail::strip_binders(detail::clean(sig, positions, def), own, Tag::lambda);
    }
    nd.annotations = detail::renumber(d.annotations, own);
    out.body.push_back(std::move(nd));
  }
  return out;
}

inline Morphism remove_positions_in_morphism(const Diagram& diagram, const Morphism& m, const PositionSet& positions) {
  Signature source = signature_of(diagram, m.domain);
  Signature target = signature_of(diagram, m.codomain);
  Morphism out = m;
  out.body.clear();
  for (const auto& item : m.body) {
    if (const auto* a = std::get_if<Assignment>(&item)) {
      Expr value = detail::clean(target, positions, a->value);
      const ConstantInfo* info = source.find(a->constant);
      if (info != nullptr) {
        auto it = positions.find(qualified(info->origin, a->constant));
        if (it != positions.end() && !it->second.empty()) {
          Expr type = infer_type(target, Context{}, value);
          value = detail::strip_binders(detail::with_lambdas(value, normalize(&target, type, false), *it->second.rbegin()),
                                        it->second, Tag::lambda);
        }
      }
      out.body.push_back(Assignment{a->constant, value, a->location});
    } else {
      out.body.push_back(item);
    }
  }
  return out;
}

/// D \ P: deletes every position in P from its declaration, from every
/// definiens and assignment of its constant, and from every occurrence.
inline Diagram remove_positions(const Diagram& diagram, const PositionSet& positions) {
  Diagram out;
  for (const auto& item : diagram.items()) {
    // Occurrences are resolved against the input signatures.
    if (const auto* t = std::get_if<Theory>(&item)) {
      out.add(remove_positions_in_theory(diagram, *t, positions));
    } else if (const auto* m = std::get_if<Morphism>(&item)) {
      out.add(remove_positions_in_morphism(diagram, *m, positions));
    } else {
      const auto& r = std::get<LogicalRelation>(item);
      LogicalRelation nr = r;
      const Morphism& over = diagram.morphism(r.over);
      Signature target = signature_of(diagram, over.codomain);
      for (auto& i : nr.body) {
        if (auto* a = std::get_if<Assignment>(&i)) a->value = detail::clean(target, positions, a->value);
      }
      out.add(std::move(nr));
    }
  }
  return out;
}

/// Unusedness: the variable of every c^i in P occurs in c's type, c's
/// definiens and every assignment to c only inside removed argument positions.
inline bool is_unused(const Diagram& diagram, const PositionSet& positions) {
  for (const auto& item : diagram.items()) {
    if (const auto* t = std::get_if<Theory>(&item)) {
      Signature sig = signature_of(diagram, *t);
      auto lookup = detail::scope_lookup(sig, positions);
      for (const auto& i : t->body) {
        const auto* d = std::get_if<Declaration>(&i);
        if (d == nullptr) continue;
        auto it = positions.find(qualified(t->name, d->name));
        if (it == positions.end()) continue;
        for (std::size_t p : it->second) {
          if (p == 0 || p > pi_arity(d->type)) return false;
          if (!detail::position_unused(d->type, p, it->second, Tag::pi, lookup)) return false;
          if (d->definiens) {
            Expr def = detail::with_lambdas(*d->definiens, d->type, p);
            if (!detail::position_unused(def, p, it->second, Tag::lambda, lookup)) return false;
          }
        }
      }
    } else if (const auto* m = std::get_if<Morphism>(&item)) {
      Signature source = signature_of(diagram, m->domain);
      Signature target = signature_of(diagram, m->codomain);
      auto lookup = detail::scope_lookup(target, positions);
      for (const auto& i : m->body) {
        const auto* a = std::get_if<Assignment>(&i);
        if (a == nullptr) continue;
        const ConstantInfo* info = source.find(a->constant);
        if (info == nullptr) continue;
        auto it = positions.find(qualified(info->origin, a->constant));
        if (it == positions.end()) continue;
        Expr type = normalize(&target, infer_type(target, Context{}, a->value), false);
        for (std::size_t p : it->second) {
          Expr value = detail::with_lambdas(a->value, type, p);
          if (!detail::position_unused(value, p, it->second, Tag::lambda, lookup)) return false;
        }
      }
    }
  }
  return true;
}

/// Extra veto on a candidate position, given the original declaration.
using ProtectPredicate = std::function<bool(const Declaration& original, std::size_t position)>;

/// The removal heuristic for the local declarations of `pushed`: a position
/// is a candidate if its binder is named in `original` (defaults to the
/// pushed declaration), its variable was used there (when `original` is
/// given), and no #keep or
/// `protect` applies. Candidates are added while their variable occurs only
/// inside positions already chosen.
inline PositionSet choose_theory_positions(const Diagram& diagram, const Theory& pushed, const Theory* original,
                                           const ProtectPredicate& protect = {}) {
  struct Local {
    const Declaration* pushed;
    const Declaration* original;
    std::vector<std::size_t> candidates;
  };
  std::vector<Local> locals;
  for (const auto& item : pushed.body) {
    const auto* d = std::get_if<Declaration>(&item);
    if (d == nullptr) continue;
    const Declaration* o = original != nullptr ? original->find_local(d->name) : d;
    if (o == nullptr) o = d;
    Local l{d, o, {}};
    Expr t = o->type;
    std::size_t n = std::min(pi_arity(o->type), pi_arity(d->type));
    for (std::size_t i = 1; i <= n; ++i, t = t->second) {
      bool named = !t->anonymous && !t->name.empty();
      bool used = original == nullptr || occurs(t->second, 0);
      if (!used && o->definiens && lambda_arity(*o->definiens) >= i) {
        Expr def = *o->definiens;
        for (std::size_t j = 1; j < i; ++j) def = def->second;
        used = occurs(def->second, 0);
      }
      if (named && used && !o->keeps(i) && !(protect && protect(*o, i))) l.candidates.push_back(i);
    }
    locals.push_back(std::move(l));
  }

  Signature sig = signature_of(diagram, pushed);
  PositionSet chosen;
  auto lookup = detail::scope_lookup(sig, chosen);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& l : locals) {
      std::string key = qualified(pushed.name, l.pushed->name);
      for (std::size_t i : l.candidates) {
        std::set<std::size_t>& own = chosen[key];
        if (own.count(i) != 0) continue;
        std::set<std::size_t> trial = own;
        trial.insert(i);
        bool unused = detail::position_unused(l.pushed->type, i, trial, Tag::pi, lookup);
        if (unused && l.pushed->definiens) {
          Expr def = detail::with_lambdas(*l.pushed->definiens, l.pushed->type, i);
          unused = detail::position_unused(def, i, trial, Tag::lambda, lookup);
        }
        if (unused) {
          own.insert(i);
          changed = true;
        }
      }
    }
  }
  for (auto it = chosen.begin(); it != chosen.end();) it = it->second.empty() ? chosen.erase(it) : std::next(it);
  return chosen;
}

/// Heuristic over every theory of `diagram`. `originals` maps a theory name
/// to the theory it was pushed from, if any.
inline PositionSet choose_positions(const Diagram& diagram, const Diagram* original = nullptr,
                                    const std::map<std::string, std::string>& originals = {}) {
  PositionSet out;
  for (const auto& item : diagram.items()) {
    const auto* t = std::get_if<Theory>(&item);
    if (t == nullptr) continue;
    const Theory* o = nullptr;
    if (original != nullptr) {
      auto it = originals.find(t->name);
      if (it != originals.end()) o = original->find_theory(it->second);
    }
    for (auto& [k, v] : choose_theory_positions(diagram, *t, o)) out[k] = v;
  }
  return out;
}

/// PO^c: the pushout along `m` with the heuristic's dead positions removed
/// from every pushed theory; each m_E is rebuilt against the cleaned output.
inline PushoutResult cleaned_pushout(const Diagram& diagram, const std::string& m,
                                     const std::vector<std::string>& roots) {
  PushoutResult r = pushout_diagram(diagram, m, roots);
  Diagram work = diagram;
  work.append(r.output);
  PositionSet positions;
  for (const auto& [from, to] : r.state.theory_image) {
    const Theory* pushed = r.output.find_theory(to);
    if (pushed == nullptr) continue;
    for (auto& [k, v] : choose_theory_positions(work, *pushed, diagram.find_theory(from))) positions[k] = v;
  }
  Diagram cleaned = remove_positions(work, positions);
  r.output = Diagram{};
  for (std::size_t i = diagram.size(); i < cleaned.size(); ++i) r.output.add(cleaned.items()[i]);
  for (const auto& [from, name] : r.state.witness_image) {
    if (const Morphism* w = r.output.find_morphism(name)) r.state.witness[from] = resolve_morphism(cleaned, *w);
  }
  return r;
}

}  // namespace soften
