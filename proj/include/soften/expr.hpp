#pragma once

// LF expressions in locally nameless form: bound variables are de Bruijn
// indices (0 = innermost binder), binders keep their source name as a
// printing hint. Nodes are immutable and shared.

#include <cassert>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace soften {

enum class Tag { constant, variable, type, kind, pi, lambda, app };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Tag tag;
  std::string name;        // constant name, or binder hint
  std::size_t index = 0;   // de Bruijn index of a variable
  bool anonymous = false;  // binder introduced by arrow sugar
  Expr first;              // binder type, or function of an application
  Expr second;             // binder body, or argument of an application
};

inline Expr constant(std::string name) {
  return std::make_shared<const Node>(Node{Tag::constant, std::move(name), 0, false, nullptr, nullptr});
}

inline Expr var(std::size_t index) {
  return std::make_shared<const Node>(Node{Tag::variable, {}, index, false, nullptr, nullptr});
}

inline Expr type_sort() {
  static const Expr sort = std::make_shared<const Node>(Node{Tag::type, {}, 0, false, nullptr, nullptr});
  return sort;
}

inline Expr kind_sort() {
  static const Expr sort = std::make_shared<const Node>(Node{Tag::kind, {}, 0, false, nullptr, nullptr});
  return sort;
}

/// Π binder; `body` lives under the new binder.
inline Expr pi(std::string name, Expr domain, Expr body, bool anonymous = false) {
  return std::make_shared<const Node>(
      Node{Tag::pi, std::move(name), 0, anonymous, std::move(domain), std::move(body)});
}

inline Expr lambda(std::string name, Expr domain, Expr body) {
  return std::make_shared<const Node>(
      Node{Tag::lambda, std::move(name), 0, false, std::move(domain), std::move(body)});
}

inline Expr app(Expr function, Expr argument) {
  return std::make_shared<const Node>(
      Node{Tag::app, {}, 0, false, std::move(function), std::move(argument)});
}

inline Expr apply_args(Expr head, const std::vector<Expr>& args) {
  for (const auto& a : args) head = app(std::move(head), a);
  return head;
}

inline bool is_binder(const Expr& e) { return e->tag == Tag::pi || e->tag == Tag::lambda; }

inline Expr rebuild_binder(const Expr& e, Expr domain, Expr body) {
  if (domain == e->first && body == e->second) return e;
  return std::make_shared<const Node>(
      Node{e->tag, e->name, 0, e->anonymous, std::move(domain), std::move(body)});
}

inline Expr rebuild_app(const Expr& e, Expr function, Expr argument) {
  if (function == e->first && argument == e->second) return e;
  return app(std::move(function), std::move(argument));
}

/// Adds `amount` to every variable index >= cutoff. `amount` may be negative
/// only when no variable in the affected range would go below the cutoff.
inline Expr shift(const Expr& e, long amount, std::size_t cutoff = 0) {
  if (amount == 0) return e;
  switch (e->tag) {
    case Tag::variable:
      if (e->index < cutoff) return e;
      assert(static_cast<long>(e->index) + amount >= static_cast<long>(cutoff));
      return var(static_cast<std::size_t>(static_cast<long>(e->index) + amount));
    case Tag::pi:
    case Tag::lambda:
      return rebuild_binder(e, shift(e->first, amount, cutoff), shift(e->second, amount, cutoff + 1));
    case Tag::app:
      return rebuild_app(e, shift(e->first, amount, cutoff), shift(e->second, amount, cutoff));
    default:
      return e;
  }
}

namespace detail {

inline Expr substitute_at(const Expr& e, std::size_t target, const Expr& value) {
  switch (e->tag) {
    case Tag::variable:
      if (e->index == target) return shift(value, static_cast<long>(target));
      if (e->index > target) return var(e->index - 1);
      return e;
    case Tag::pi:
    case Tag::lambda:
      return rebuild_binder(e, substitute_at(e->first, target, value),
                            substitute_at(e->second, target + 1, value));
    case Tag::app:
      return rebuild_app(e, substitute_at(e->first, target, value), substitute_at(e->second, target, value));
    default:
      return e;
  }
}

}  // namespace detail

/// Replaces the variable bound by the innermost binder around `body` (index 0)
/// with `value` and removes that binder from the scope. `value` lives in the
/// scope outside the binder. De Bruijn indices make this capture-avoiding.
inline Expr substitute(const Expr& body, const Expr& value) { return detail::substitute_at(body, 0, value); }

/// True iff variable `index` (relative to the root of `e`) occurs free.
inline bool occurs(const Expr& e, std::size_t index) {
  switch (e->tag) {
    case Tag::variable:
      return e->index == index;
    case Tag::pi:
    case Tag::lambda:
      return occurs(e->first, index) || occurs(e->second, index + 1);
    case Tag::app:
      return occurs(e->first, index) || occurs(e->second, index);
    default:
      return false;
  }
}

/// Removes a binder position whose variable does not occur: indices above
/// `index` move down by one. Precondition: !occurs(e, index).
inline Expr strengthen(const Expr& e, std::size_t index) {
  assert(!occurs(e, index));
  return detail::substitute_at(e, index, var(0));
}

/// α-equivalence: binder names and arrow flags are ignored.
inline bool alpha_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case Tag::constant:
      return a->name == b->name;
    case Tag::variable:
      return a->index == b->index;
    case Tag::type:
    case Tag::kind:
      return true;
    default:
      return alpha_equal(a->first, b->first) && alpha_equal(a->second, b->second);
  }
}

/// Equality including binder names and arrow flags; used for round-trip checks.
inline bool identical(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case Tag::constant:
      return a->name == b->name;
    case Tag::variable:
      return a->index == b->index;
    case Tag::type:
    case Tag::kind:
      return true;
    default:
      return a->name == b->name && a->anonymous == b->anonymous && identical(a->first, b->first) &&
             identical(a->second, b->second);
  }
}

struct Spine {
  Expr head;
  std::vector<Expr> args;
};

inline Spine spine(Expr e) {
  std::vector<Expr> args;
  while (e->tag == Tag::app) {
    args.push_back(e->second);
    e = e->first;
  }
  return {std::move(e), {args.rbegin(), args.rend()}};
}

/// Number of leading Π binders.
inline std::size_t pi_arity(Expr e) {
  std::size_t n = 0;
  while (e->tag == Tag::pi) {
    ++n;
    e = e->second;
  }
  return n;
}

inline std::size_t lambda_arity(Expr e) {
  std::size_t n = 0;
  while (e->tag == Tag::lambda) {
    ++n;
    e = e->second;
  }
  return n;
}

template <class F>
void for_each_constant(const Expr& e, F&& visit) {
  switch (e->tag) {
    case Tag::constant:
      visit(e->name);
      break;
    case Tag::pi:
    case Tag::lambda:
    case Tag::app:
      for_each_constant(e->first, visit);
      for_each_constant(e->second, visit);
      break;
    default:
      break;
  }
}

inline bool mentions_constant(const Expr& e, const std::string& name) {
  bool found = false;
  for_each_constant(e, [&](const std::string& c) { found = found || c == name; });
  return found;
}

}  // namespace soften
