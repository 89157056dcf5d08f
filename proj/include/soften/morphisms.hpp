#pragma once

// Morphism resolution and checking, and the pushout of theories and
// morphisms along a morphism m : S -> T.

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
#include "soften/translate.hpp"

namespace soften {

namespace detail {

inline void add_identity(Mapping& out, const Diagram& diagram, const Theory& theory) {
  for (const auto& fd : flatten(diagram, theory)) out.set(fd.declaration->name, constant(fd.declaration->name));
}

inline void merge(Mapping& into, const Mapping& from) {
  for (const auto& c : from.order) into.set(c, from.cases.at(c));
}

}  // namespace detail

/// Flat constant map of `m`. Morphism includes are inlined, theory includes
/// contribute the identity, and unassigned defined domain constants map to
/// the image of their definiens where that exists.
inline Mapping resolve_morphism(const Diagram& diagram, const Morphism& m) {
  Mapping out{m.name, m.domain, m.codomain, {}, {}, m.partial};
  for (const auto& item : m.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      if (const Morphism* g = diagram.find_morphism(inc->target)) {
        detail::merge(out, resolve_morphism(diagram, *g));
      } else if (const Theory* t = diagram.find_theory(inc->target)) {
        detail::add_identity(out, diagram, *t);
      } else {
        throw TypeError(inc->location.to_string() + ": unknown include '" + inc->target + "' in morphism " + m.name);
      }
    } else {
      const auto& a = std::get<Assignment>(item);
      out.set(a.constant, a.value);
    }
  }
  for (const auto& fd : flatten(diagram, diagram.theory(m.domain))) {
    const Declaration& d = *fd.declaration;
    if (d.definiens && !out.find(d.name)) {
      if (auto image = apply_morphism(out, *d.definiens)) out.set(d.name, *image);
    }
  }
  return out;
}

inline Mapping resolve_morphism(const Diagram& diagram, const std::string& name) {
  return resolve_morphism(diagram, diagram.morphism(name));
}

/// Flat case map of `r`; relation includes are inlined.
inline Mapping resolve_relation(const Diagram& diagram, const LogicalRelation& r) {
  const Morphism& m = diagram.morphism(r.over);
  Mapping out{r.name, m.domain, m.codomain, {}, {}, r.partial};
  for (const auto& item : r.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      const LogicalRelation* g = diagram.find_relation(inc->target);
      if (g == nullptr) {
        throw TypeError(inc->location.to_string() + ": relation " + r.name + " can only include relations, not '" +
                        inc->target + "'");
      }
      detail::merge(out, resolve_relation(diagram, *g));
    } else {
      const auto& a = std::get<Assignment>(item);
      out.set(a.constant, a.value);
    }
  }
  return out;
}

inline Mapping resolve_relation(const Diagram& diagram, const std::string& name) {
  return resolve_relation(diagram, diagram.relation(name));
}

/// m(c) : m̄(A) for every assigned c whose type translates; coverage for
/// total morphisms. Throws TypeError on the first violation.
inline void check_morphism(const Diagram& diagram, const Morphism& m) {
  const Theory& domain = diagram.theory(m.domain);
  diagram.theory(m.codomain);
  Signature source = signature_of(diagram, domain);
  Signature target = signature_of(diagram, m.codomain);
  Mapping map = resolve_morphism(diagram, m);
  for (const auto& item : m.body) {
    if (const auto* a = std::get_if<Assignment>(&item); a != nullptr && !source.contains(a->constant)) {
      throw TypeError(a->location.to_string() + ": assignment to unknown constant '" + a->constant + "' (not in " +
                      m.domain + ")");
    }
  }
  for (const auto& info : source.constants()) {
    auto value = map.find(info.name);
    if (!value) {
      if (!m.partial) throw TypeError("missing assignment for '" + info.name + "' in total morphism " + m.name);
      continue;
    }
    auto expected = apply_morphism(map, info.type);
    if (!expected) continue;
    try {
      check_type(target, Context{}, *value, *expected);
    } catch (const TypeError& e) {
      throw TypeError("assignment " + info.name + " := " + print_expr(*value) + " in " + m.name + ": " + e.what());
    }
  }
}

/// Pushout bookkeeping: images of theories and morphisms already processed.
struct PushoutState {
  std::string base;  // the morphism pushed along
  std::string domain;
  std::string codomain;
  std::map<std::string, std::string> theory_image;
  std::map<std::string, std::string> witness_image;  // E -> m_E
  std::map<std::string, Mapping> witness;
  std::map<std::string, std::string> morphism_image;
  std::vector<std::string> dropped;
  std::vector<std::string> warnings;
  /// Output names; default to `E_via_m` and `m_E`.
  std::function<std::string(const std::string&)> theory_name;
  std::function<std::string(const std::string&)> witness_name;

  std::string name_theory(const std::string& e) const {
    return theory_name ? theory_name(e) : e + "_via_" + base;
  }
  std::string name_witness(const std::string& e) const {
    return witness_name ? witness_name(e) : base + "_" + e;
  }
};

namespace detail {

inline void fresh_or_throw(const Diagram& d, const std::string& name) {
  if (d.contains(name)) throw TranslationError("generated name '" + name + "' is already taken");
}

}  // namespace detail

inline PushoutState start_pushout(const Diagram& diagram, const Morphism& m) {
  PushoutState s;
  s.base = m.name;
  s.domain = m.domain;
  s.codomain = m.codomain;
  s.theory_image[m.domain] = m.codomain;
  s.witness_image[m.domain] = m.name;
  s.witness[m.domain] = resolve_morphism(diagram, m);
  return s;
}

/// Pushes `theory` (and, first, every included theory that includes the
/// domain) along the base morphism. New items are appended to `work`.
inline void pushout_theory(Diagram& work, PushoutState& state, const std::string& theory) {
  if (state.theory_image.count(theory) != 0) return;
  const Theory& source = work.theory(theory);
  if (!includes_theory(work, theory, state.domain)) {
    throw TranslationError("theory " + theory + " does not include " + state.domain);
  }
  const Mapping& base = state.witness.at(state.domain);
  Theory out{state.name_theory(theory), {}, source.location};
  Morphism witness{state.name_witness(theory), theory, out.name, {}, base.partial, source.location};
  detail::fresh_or_throw(work, out.name);
  detail::fresh_or_throw(work, witness.name);
  Mapping map{witness.name, theory, out.name, {}, {}, base.partial};

  for (const auto& item : source.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      if (inc->target == state.domain || includes_theory(work, inc->target, state.domain)) {
        pushout_theory(work, state, inc->target);
        out.body.push_back(Include{state.theory_image.at(inc->target), inc->location});
        witness.body.push_back(Include{state.witness_image.at(inc->target), inc->location});
        detail::merge(map, state.witness.at(inc->target));
      } else {
        out.body.push_back(*inc);
        witness.body.push_back(*inc);
        detail::add_identity(map, work, work.theory(inc->target));
      }
      continue;
    }
    const auto& d = std::get<Declaration>(item);
    auto type = apply_morphism(map, d.type);
    if (!type) {
      state.dropped.push_back(theory + "/" + d.name);
      continue;
    }
    std::optional<Expr> def;
    if (d.definiens) {
      def = apply_morphism(map, *d.definiens);
      if (!def) state.warnings.push_back(theory + "/" + d.name + ": definiens has no image, kept as undefined");
    }
    out.body.push_back(Declaration{d.name, *type, def, d.annotations, d.location});
    map.set(d.name, constant(d.name));
    witness.body.push_back(Assignment{d.name, constant(d.name), d.location});
  }
  state.theory_image[theory] = out.name;
  state.witness_image[theory] = witness.name;
  state.witness[theory] = map;
  work.add(std::move(out));
  work.add(std::move(witness));
}

/// f : S -> T with S and T already pushed: f^m assigns c := m_T(f(c)).
inline void pushout_morphism(Diagram& work, PushoutState& state, const Morphism& f) {
  if (state.morphism_image.count(f.name) != 0) return;
  const Mapping& target = state.witness.at(f.codomain);
  Morphism out{state.name_theory(f.name), state.theory_image.at(f.domain),
               state.theory_image.at(f.codomain), {}, f.partial || target.partial, f.location};
  detail::fresh_or_throw(work, out.name);
  for (const auto& item : f.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      if (work.find_morphism(inc->target) != nullptr) {
        auto it = state.morphism_image.find(inc->target);
        if (it == state.morphism_image.end()) {
          throw TranslationError("morphism " + f.name + " includes " + inc->target + ", which was not pushed out");
        }
        out.body.push_back(Include{it->second, inc->location});
      } else if (auto it = state.theory_image.find(inc->target); it != state.theory_image.end()) {
        out.body.push_back(Include{it->second, inc->location});
      } else {
        out.body.push_back(*inc);
      }
      continue;
    }
    const auto& a = std::get<Assignment>(item);
    if (auto value = apply_morphism(target, a.value)) {
      out.body.push_back(Assignment{a.constant, *value, a.location});
    } else {
      state.warnings.push_back(f.name + "/" + a.constant + ": assignment has no image, dropped");
    }
  }
  state.morphism_image[f.name] = out.name;
  work.add(std::move(out));
}

struct PushoutResult {
  Diagram output;  // generated items only, in dependency order
  PushoutState state;
};

/// Pushes every root (and what it includes) along `m`, then every morphism of
/// the input between pushed theories.
inline PushoutResult pushout_diagram(const Diagram& diagram, const std::string& m,
                                     const std::vector<std::string>& roots) {
  Diagram work = diagram;
  PushoutState state = start_pushout(diagram, diagram.morphism(m));
  for (const auto& root : roots) pushout_theory(work, state, root);
  for (const auto& item : diagram.items()) {
    const auto* f = std::get_if<Morphism>(&item);
    if (f == nullptr || f->name == m) continue;
    if (state.theory_image.count(f->domain) == 0 || state.theory_image.count(f->codomain) == 0) continue;
    if (f->domain == state.domain && f->codomain == state.domain) continue;
    pushout_morphism(work, state, *f);
  }
  PushoutResult result;
  for (std::size_t i = diagram.size(); i < work.size(); ++i) result.output.add(work.items()[i]);
  result.state = std::move(state);
  return result;
}

}  // namespace soften
