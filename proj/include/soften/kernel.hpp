#pragma once

// The LF typing judgment. A Signature holds the constants visible in a theory
// (after flattening); a Context holds the local variables. Definitional
// equality is β-conversion plus unfolding of defined constants.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "soften/error.hpp"
#include "soften/expr.hpp"
#include "soften/print.hpp"

namespace soften {

struct ConstantInfo {
  std::string name;
  std::string origin;  // declaring theory
  Expr type;
  std::optional<Expr> definiens;
};

class Signature {
 public:
  /// Adds a constant. Re-adding the same constant from the same origin is a
  /// no-op; a different constant with a taken name is a clash.
  void add(ConstantInfo info) {
    auto it = index_.find(info.name);
    if (it != index_.end()) {
      if (entries_[it->second].origin == info.origin) return;
      throw TypeError("name clash: constant '" + info.name + "' is declared in both " +
                      entries_[it->second].origin + " and " + info.origin);
    }
    index_.emplace(info.name, entries_.size());
    entries_.push_back(std::move(info));
  }

  const ConstantInfo* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<ConstantInfo>& constants() const { return entries_; }

 private:
  std::vector<ConstantInfo> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ContextEntry {
  std::string name;
  Expr type;  // lives in the scope of the preceding entries
};

/// Variables in scope, outermost first. Variable index 0 is the last entry.
class Context {
 public:
  Context() = default;
  explicit Context(std::vector<ContextEntry> entries) : entries_(std::move(entries)) {}

  Context extended(std::string name, Expr type) const {
    Context out = *this;
    out.entries_.push_back({std::move(name), std::move(type)});
    return out;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<ContextEntry>& entries() const { return entries_; }
  const ContextEntry& at_index(std::size_t index) const { return entries_[entries_.size() - 1 - index]; }

  /// Type of variable `index`, shifted into the full context.
  Expr type_of(std::size_t index) const { return shift(at_index(index).type, static_cast<long>(index + 1)); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

 private:
  std::vector<ContextEntry> entries_;
};

inline constexpr std::size_t kDefaultFuel = 1'000'000;

namespace detail {

class Normalizer {
 public:
  Normalizer(const Signature* signature, bool unfold, std::size_t fuel)
      : signature_(signature), unfold_(unfold), fuel_(fuel) {}

  Expr normal_form(const Expr& e) {
    switch (e->tag) {
      case Tag::constant:
        if (const ConstantInfo* info = unfolding(e)) {
          burn();
          return normal_form(*info->definiens);
        }
        return e;
      case Tag::pi:
      case Tag::lambda:
        return rebuild_binder(e, normal_form(e->first), normal_form(e->second));
      case Tag::app: {
        Expr function = normal_form(e->first);
        if (function->tag == Tag::lambda) {
          burn();
          return normal_form(substitute(function->second, e->second));
        }
        return rebuild_app(e, function, normal_form(e->second));
      }
      default:
        return e;
    }
  }

  Expr weak_head(const Expr& e) {
    switch (e->tag) {
      case Tag::constant:
        if (const ConstantInfo* info = unfolding(e)) {
          burn();
          return weak_head(*info->definiens);
        }
        return e;
      case Tag::app: {
        Expr function = weak_head(e->first);
        if (function->tag == Tag::lambda) {
          burn();
          return weak_head(substitute(function->second, e->second));
        }
        return rebuild_app(e, function, e->second);
      }
      default:
        return e;
    }
  }

 private:
  const ConstantInfo* unfolding(const Expr& c) const {
    if (!unfold_ || signature_ == nullptr) return nullptr;
    const ConstantInfo* info = signature_->find(c->name);
    return info != nullptr && info->definiens ? info : nullptr;
  }

  void burn() {
    if (fuel_ == 0) throw FuelExhausted("normalization step budget exceeded (ill-typed input?)");
    --fuel_;
  }

  const Signature* signature_;
  bool unfold_;
  std::size_t fuel_;
};

}  // namespace detail

/// β-normal form. With `unfold`, defined constants of `signature` are
/// expanded first. Throws FuelExhausted after `fuel` reduction steps.
inline Expr normalize(const Signature* signature, const Expr& e, bool unfold, std::size_t fuel = kDefaultFuel) {
  return detail::Normalizer(signature, unfold, fuel).normal_form(e);
}

inline Expr beta_normalize(const Expr& e) { return normalize(nullptr, e, false); }

inline Expr weak_head_normalize(const Signature& signature, const Expr& e) {
  return detail::Normalizer(&signature, true, kDefaultFuel).weak_head(e);
}

inline bool definitionally_equal(const Signature& signature, const Expr& a, const Expr& b) {
  if (alpha_equal(a, b)) return true;
  return alpha_equal(normalize(&signature, a, true), normalize(&signature, b, true));
}

namespace detail {

inline std::string show(const Expr& e, const Context& ctx) { return print_expr(e, ctx.names()); }

}  // namespace detail

inline Expr infer_type(const Signature& signature, const Context& ctx, const Expr& e);

/// Succeeds iff `e` has a type definitionally equal to `expected`.
inline void check_type(const Signature& signature, const Context& ctx, const Expr& e, const Expr& expected) {
  Expr actual = infer_type(signature, ctx, e);
  if (definitionally_equal(signature, actual, expected)) return;
  throw TypeError("type mismatch for " + detail::show(e, ctx) + ": expected " +
                  detail::show(normalize(&signature, expected, true), ctx) + ", found " +
                  detail::show(normalize(&signature, actual, true), ctx));
}

namespace detail {

inline void require_type_classified(const Signature& signature, const Context& ctx, const Expr& a,
                                    const char* what) {
  Expr sort = infer_type(signature, ctx, a);
  if (weak_head_normalize(signature, sort)->tag != Tag::type) {
    throw TypeError(std::string(what) + " " + show(a, ctx) + " is not a type (it is classified by " +
                    show(sort, ctx) + ")");
  }
}

}  // namespace detail

inline Expr infer_type(const Signature& signature, const Context& ctx, const Expr& e) {
  switch (e->tag) {
    case Tag::constant: {
      const ConstantInfo* info = signature.find(e->name);
      if (info == nullptr) throw TypeError("unbound constant '" + e->name + "'");
      return info->type;
    }
    case Tag::variable:
      if (e->index >= ctx.size()) throw TypeError("unbound variable #" + std::to_string(e->index));
      return ctx.type_of(e->index);
    case Tag::type:
      return kind_sort();
    case Tag::kind:
      throw TypeError("'kind' has no classifier");
    case Tag::pi: {
      detail::require_type_classified(signature, ctx, e->first, "binder type");
      Context inner = ctx.extended(e->name, e->first);
      Expr sort = weak_head_normalize(signature, infer_type(signature, inner, e->second));
      if (sort->tag != Tag::type && sort->tag != Tag::kind) {
        throw TypeError("body of " + detail::show(e, ctx) + " is not a type or kind");
      }
      return sort;
    }
    case Tag::lambda: {
      detail::require_type_classified(signature, ctx, e->first, "binder type");
      Context inner = ctx.extended(e->name, e->first);
      Expr body_type = infer_type(signature, inner, e->second);
      if (body_type->tag == Tag::kind) {
        throw TypeError("'kind' in forbidden position: body of " + detail::show(e, ctx));
      }
      return pi(e->name, e->first, body_type);
    }
    case Tag::app: {
      if (e->second->tag == Tag::kind || e->second->tag == Tag::type) {
        throw TypeError("sort used as an argument in " + detail::show(e, ctx));
      }
      Expr function_type = weak_head_normalize(signature, infer_type(signature, ctx, e->first));
      if (function_type->tag != Tag::pi) {
        throw TypeError("ill-typed application " + detail::show(e, ctx) + ": function has type " +
                        detail::show(normalize(&signature, function_type, true), ctx));
      }
      Expr arg_type = infer_type(signature, ctx, e->second);
      if (!definitionally_equal(signature, arg_type, function_type->first)) {
        throw TypeError("ill-typed application " + detail::show(e, ctx) + ": argument " +
                        detail::show(e->second, ctx) + " has type " +
                        detail::show(normalize(&signature, arg_type, true), ctx) + " but " +
                        detail::show(normalize(&signature, function_type->first, true), ctx) + " is expected");
      }
      return substitute(function_type->second, e->second);
    }
  }
  throw TypeError("unknown expression");
}

/// Checks that `ctx` is well formed: distinct names, every entry a type.
inline void check_context(const Signature& signature, const Context& ctx) {
  Context prefix;
  for (const auto& entry : ctx.entries()) {
    for (const auto& seen : prefix.entries()) {
      if (seen.name == entry.name) throw TypeError("duplicate variable '" + entry.name + "' in context");
    }
    detail::require_type_classified(signature, prefix, entry.type, "type of variable");
    prefix = prefix.extended(entry.name, entry.type);
  }
}

/// Wraps `e` in λ-binders taken from the first `count` Π binders of `type`
/// (the type of `e`) and applies it to the new variables. The result is not
/// normalized.
inline Expr eta_expand(const Expr& e, const Expr& type, std::size_t count) {
  std::vector<std::pair<std::string, Expr>> binders;
  Expr t = type;
  for (std::size_t i = 0; i < count; ++i) {
    if (t->tag != Tag::pi) throw TypeError("cannot η-expand: type has fewer than " + std::to_string(count) + " Π binders");
    binders.emplace_back(t->name.empty() ? "x" : t->name, t->first);
    t = t->second;
  }
  Expr body = shift(e, static_cast<long>(count));
  for (std::size_t i = 0; i < count; ++i) body = app(body, var(count - 1 - i));
  for (std::size_t i = count; i-- > 0;) body = lambda(binders[i].first, binders[i].second, body);
  return body;
}

/// Makes every occurrence of a constant listed in `arities` applied to at
/// least its arity many arguments; missing arguments are supplied by λ-binders
/// whose types come from the constant's Π telescope instantiated with the
/// arguments already present. Over-application is left alone.
inline Expr eta_expand_applications(const Signature& signature, const Expr& e,
                                    const std::map<std::string, std::size_t>& arities) {
  switch (e->tag) {
    case Tag::pi:
    case Tag::lambda:
      return rebuild_binder(e, eta_expand_applications(signature, e->first, arities),
                            eta_expand_applications(signature, e->second, arities));
    case Tag::constant:
    case Tag::app: {
      Spine s = spine(e);
      std::vector<Expr> args;
      for (const auto& a : s.args) args.push_back(eta_expand_applications(signature, a, arities));
      Expr head = s.head;
      if (head->tag == Tag::app || is_binder(head)) head = eta_expand_applications(signature, head, arities);
      if (head->tag == Tag::constant) {
        auto it = arities.find(head->name);
        if (it != arities.end() && args.size() < it->second) {
          const ConstantInfo* info = signature.find(head->name);
          if (info == nullptr) throw TypeError("unbound constant '" + head->name + "'");
          Expr type = normalize(&signature, info->type, false);
          for (const auto& a : args) {
            if (type->tag != Tag::pi) throw TypeError("constant '" + head->name + "' is over-applied");
            type = substitute(type->second, a);
          }
          return eta_expand(apply_args(head, args), type, it->second - args.size());
        }
      }
      return apply_args(head, args);
    }
    default:
      return e;
  }
}

}  // namespace soften
