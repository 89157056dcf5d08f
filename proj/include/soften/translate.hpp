#pragma once

// Syntax translations induced by a (partial) morphism m and a (partial)
// logical relation r on m. Partiality is a value: every translation returns
// std::nullopt when some constant on the way has no image.
//
// Relation translation tracks, for every source binder x, whether the target
// scope holds x (its morphism image is defined) and/or its witness x* (its
// relation image is defined). The witness is bound right after x.

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "soften/error.hpp"
#include "soften/expr.hpp"
#include "soften/kernel.hpp"

namespace soften {

/// A resolved, flat constant map (morphism or relation), includes inlined.
struct Mapping {
  std::string name;
  std::string domain;
  std::string codomain;
  std::unordered_map<std::string, Expr> cases;
  std::vector<std::string> order;  // assignment order, for printing
  bool partial = false;

  std::optional<Expr> find(const std::string& constant) const {
    auto it = cases.find(constant);
    if (it == cases.end()) return std::nullopt;
    return it->second;
  }

  void set(const std::string& constant, Expr value) {
    if (cases.insert_or_assign(constant, std::move(value)).second) order.push_back(constant);
  }
};

/// Layout of one source binder in the target scope.
struct BinderImage {
  bool kept = true;
  bool starred = false;
  std::size_t size() const { return (kept ? 1 : 0) + (starred ? 1 : 0); }
};

namespace detail {

inline std::string star_name(const std::string& name) { return (name.empty() ? std::string("x") : name) + "_star"; }

class Translator {
 public:
  Translator(const Mapping& morphism, const Mapping* relation, std::vector<BinderImage> env = {})
      : m_(morphism), r_(relation), env_(std::move(env)) {}

  std::optional<Expr> mor(const Expr& e) {
    switch (e->tag) {
      case Tag::constant:
        return m_.find(e->name);
      case Tag::variable: {
        const BinderImage* b = entry(e->index);
        if (b == nullptr) return var(offset(env_.size()) + (e->index - env_.size()));  // free: m̄(x) = x
        if (!b->kept) return std::nullopt;
        return var(offset(e->index) + (b->starred ? 1 : 0));
      }
      case Tag::type:
      case Tag::kind:
        return e;
      case Tag::pi:
      case Tag::lambda: {
        auto dom = mor(e->first);
        if (!dom) return std::nullopt;
        env_.push_back({true, false});
        auto body = mor(e->second);
        env_.pop_back();
        if (!body) return std::nullopt;
        return rebuild_binder(e, *dom, *body);
      }
      case Tag::app: {
        auto f = mor(e->first);
        if (!f) return std::nullopt;
        auto a = mor(e->second);
        if (!a) return std::nullopt;
        return app(*f, *a);
      }
    }
    return std::nullopt;
  }

  std::optional<Expr> rel(const Expr& e) {
    if (r_ == nullptr) return std::nullopt;
    switch (e->tag) {
      case Tag::constant:
        return r_->find(e->name);
      case Tag::variable: {
        const BinderImage* b = entry(e->index);
        if (b == nullptr || !b->starred) return std::nullopt;
        return var(offset(e->index));
      }
      case Tag::type:
        return lambda("a", type_sort(), pi("", var(0), type_sort(), true));
      case Tag::kind:
        return std::nullopt;
      case Tag::pi: {
        if (auto whole = mor(e)) return rel_pi(e, *whole);
        return telescope(e, [this](const Expr& body) { return rel(body); }, true);
      }
      case Tag::lambda:
        return telescope(e, [this](const Expr& body) { return rel(body); }, false);
      case Tag::app: {
        auto f = rel(e->first);
        if (!f) return std::nullopt;
        auto a = mor(e->second);
        auto a_star = rel(e->second);
        if (!a && !a_star) return std::nullopt;
        Expr out = *f;
        if (a) out = app(out, *a);
        if (a_star) out = app(out, *a_star);
        return out;
      }
    }
    return std::nullopt;
  }

  void bind(BinderImage b) { env_.push_back(b); }
  void unbind() { env_.pop_back(); }

  /// Witness type of a classifier whose morphism image is a kind: the
  /// relation image of its Π telescope ending in `type`.
  std::optional<Expr> rel_type(const Expr& e) {
    if (e->tag == Tag::type) return type_sort();
    if (e->tag != Tag::pi) return std::nullopt;
    return telescope(e, [this](const Expr& body) { return rel_type(body); }, true);
  }

 private:
  const BinderImage* entry(std::size_t index) const {
    if (index >= env_.size()) return nullptr;
    return &env_[env_.size() - 1 - index];
  }

  // Target index of the innermost target variable of source binder `index`.
  std::size_t offset(std::size_t index) const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < index; ++j) n += env_[env_.size() - 1 - j].size();
    return n;
  }

  // λf:m(Πx:A.B). Πx:m(A). [Πx*: r(A) x.] r(B) (f x)
  std::optional<Expr> rel_pi(const Expr& e, const Expr& image) {
    auto dom = mor(e->first);
    if (!dom) return std::nullopt;
    auto dom_rel = rel(e->first);
    BinderImage b{true, dom_rel.has_value()};
    env_.push_back(b);
    auto body_rel = rel(e->second);
    env_.pop_back();
    if (!body_rel) return std::nullopt;
    const std::size_t s = b.size();
    Expr f = var(s);
    Expr x = var(b.starred ? 1 : 0);
    Expr body = app(shift(*body_rel, 1, s), app(f, x));
    if (b.starred) body = pi(star_name(e->name), app(shift(*dom_rel, 2), var(0)), body, !occurs(body, 0));
    body = pi(e->name, shift(*dom, 1), body, e->anonymous && !b.starred);
    return lambda("f", image, body);
  }

  // Binder with both images where defined: x:m(A), x*: r(A) x; or x*: r(A)
  // when only the relation image exists (A is then a proof type).
  template <class Body>
  std::optional<Expr> telescope(const Expr& e, Body&& translate_body, bool is_pi) {
    auto dom = mor(e->first);
    auto dom_rel = rel(e->first);
    if (!dom && !dom_rel) return std::nullopt;
    BinderImage b{dom.has_value(), dom_rel.has_value()};
    env_.push_back(b);
    auto body = translate_body(e->second);
    env_.pop_back();
    if (!body) return std::nullopt;
    auto bind = [is_pi](std::string name, Expr type, Expr inner, bool anon) {
      return is_pi ? pi(std::move(name), std::move(type), std::move(inner), anon)
                   : lambda(std::move(name), std::move(type), std::move(inner));
    };
    Expr out = *body;
    if (b.starred) {
      Expr witness_type = b.kept ? app(shift(*dom_rel, 1), var(0)) : *dom_rel;
      out = bind(star_name(e->name), witness_type, out, !occurs(out, 0));
    }
    if (b.kept) out = bind(e->name, *dom, out, e->anonymous && !b.starred);
    return out;
  }

  const Mapping& m_;
  const Mapping* r_;
  std::vector<BinderImage> env_;
};

}  // namespace detail

/// m̄(e), β-normalized. `nullopt` iff some constant has no image.
inline std::optional<Expr> apply_morphism(const Mapping& m, const Expr& e) {
  auto out = detail::Translator(m, nullptr).mor(e);
  if (!out) return std::nullopt;
  return beta_normalize(*out);
}

inline std::optional<Context> apply_morphism_context(const Mapping& m, const Context& ctx) {
  std::vector<ContextEntry> out;
  std::vector<BinderImage> env;
  for (const auto& entry : ctx.entries()) {
    auto t = detail::Translator(m, nullptr, env).mor(entry.type);
    if (!t) return std::nullopt;
    out.push_back({entry.name, beta_normalize(*t)});
    env.push_back({true, false});
  }
  return Context(std::move(out));
}

/// Context translation for relations: x:A becomes x:m̄(A), x*: r̄(A) x, or
/// only x*: r̄(A) when m̄(A) is undefined. `env` receives the binder layout.
inline Context apply_logrel_context(const Mapping& m, const Mapping& r, const Context& ctx,
                                    std::vector<BinderImage>* env_out = nullptr) {
  std::vector<ContextEntry> out;
  std::vector<BinderImage> env;
  for (const auto& entry : ctx.entries()) {
    detail::Translator t(m, &r, env);
    auto type = t.mor(entry.type);
    auto type_rel = t.rel(entry.type);
    if (!type && !type_rel) {
      throw TranslationError("context entry '" + entry.name + "' has neither a morphism nor a relation image");
    }
    if (type) out.push_back({entry.name, beta_normalize(*type)});
    if (type_rel) {
      Expr w = type ? app(shift(*type_rel, 1), var(0)) : *type_rel;
      out.push_back({detail::star_name(entry.name), beta_normalize(w)});
    }
    env.push_back({type.has_value(), type_rel.has_value()});
  }
  if (env_out != nullptr) *env_out = std::move(env);
  return Context(std::move(out));
}

/// r̄(e), β-normalized. `env` describes the free variables of `e` (see
/// apply_logrel_context); closed terms need none.
inline std::optional<Expr> apply_logrel(const Mapping& m, const Mapping& r, const Expr& e,
                                        std::vector<BinderImage> env = {}) {
  auto out = detail::Translator(m, &r, std::move(env)).rel(e);
  if (!out) return std::nullopt;
  return beta_normalize(*out);
}

/// Morphism image under a relation binder layout.
inline std::optional<Expr> apply_morphism_in(const Mapping& m, const Expr& e, std::vector<BinderImage> env) {
  auto out = detail::Translator(m, nullptr, std::move(env)).mor(e);
  if (!out) return std::nullopt;
  return beta_normalize(*out);
}

/// Type of the witness c* of a constant c : A: r̄(A) m(c) if m(c) is defined,
/// the witness kind of A if m̄(A) is defined, otherwise the proof-rule type r̄(A).
inline std::optional<Expr> witness_type(const Mapping& m, const Mapping& r, const Expr& type,
                                        const std::optional<Expr>& image) {
  detail::Translator t(m, &r);
  std::optional<Expr> out;
  if (image) {
    auto pred = t.rel(type);
    if (pred) out = app(*pred, *image);
  } else if (t.mor(type)) {
    out = t.rel_type(type);
  } else {
    out = t.rel(type);
  }
  if (!out) return std::nullopt;
  return beta_normalize(*out);
}

/// For each leading Π binder of `type`: does its domain have a relation image?
inline std::vector<bool> witnessed_binders(const Mapping& m, const Mapping& r, const Expr& type) {
  detail::Translator t(m, &r);
  std::vector<bool> out;
  Expr e = type;
  for (; e->tag == Tag::pi; e = e->second) {
    bool starred = t.rel(e->first).has_value();
    out.push_back(starred);
    t.bind({t.mor(e->first).has_value(), starred});
  }
  return out;
}

}  // namespace soften
