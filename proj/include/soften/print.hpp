#pragma once

// Rendering of expressions in the concrete syntax:
//   {x: A} B   Π          [x: A] t   λ          A -> B   anonymous Π
// Application is juxtaposition. Binder names are reused from the hints when
// that cannot capture anything, otherwise a numeric suffix is appended.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "soften/expr.hpp"

namespace soften {

inline constexpr std::array<std::string_view, 9> kKeywords = {
    "type", "kind", "theory", "morph", "logrel", "include", "partial", "on", "end"};

inline bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

struct PrintOptions {
  /// Names every binder by its depth and prints a Π as an arrow exactly when
  /// its variable does not occur. Two expressions print identically in this
  /// mode iff they are α-equal.
  bool canonical = false;
};

namespace detail {

enum Precedence { kTop = 0, kOperand = 1, kAtom = 2 };

class ExprPrinter {
 public:
  ExprPrinter(std::vector<std::string> scope, PrintOptions options)
      : scope_(std::move(scope)), options_(options) {}

  std::string print(const Expr& e, int level) {
    switch (e->tag) {
      case Tag::constant:
        return e->name;
      case Tag::variable:
        if (e->index < scope_.size()) return scope_[scope_.size() - 1 - e->index];
        return "#" + std::to_string(e->index);
      case Tag::type:
        return "type";
      case Tag::kind:
        return "kind";
      case Tag::app: {
        std::string out = print(e->first, kOperand) + " " + print(e->second, kAtom);
        return level >= kAtom ? "(" + out + ")" : out;
      }
      case Tag::pi:
      case Tag::lambda: {
        std::string out;
        bool as_arrow = e->tag == Tag::pi && !occurs(e->second, 0) && (options_.canonical || e->anonymous);
        if (as_arrow) {
          std::string dom = print(e->first, kOperand);
          scope_.push_back("_");
          out = dom + " -> " + print(e->second, kTop);
          scope_.pop_back();
        } else {
          std::string name = binder_name(e);
          std::string dom = print(e->first, kTop);
          scope_.push_back(name);
          std::string body = print(e->second, kTop);
          scope_.pop_back();
          out = (e->tag == Tag::pi ? "{" : "[") + name + ": " + dom + (e->tag == Tag::pi ? "} " : "] ") + body;
        }
        return level > kTop ? "(" + out + ")" : out;
      }
    }
    return {};
  }

 private:
  std::string binder_name(const Expr& binder) {
    if (options_.canonical) return "v" + std::to_string(scope_.size());
    std::string base = binder->name.empty() ? std::string("x") : binder->name;
    if (!clashes(base, binder->second)) return base;
    for (int suffix = 1;; ++suffix) {
      std::string candidate = base + std::to_string(suffix);
      if (!clashes(candidate, binder->second)) return candidate;
    }
  }

  // A name clashes if it is a keyword, names a constant used in the body, or
  // would capture an outer variable that the body still refers to.
  bool clashes(const std::string& name, const Expr& body) const {
    if (is_keyword(name) || mentions_constant(body, name)) return true;
    for (std::size_t p = 0; p < scope_.size(); ++p) {
      if (scope_[scope_.size() - 1 - p] == name && occurs(body, p + 1)) return true;
    }
    return false;
  }

  std::vector<std::string> scope_;
  PrintOptions options_;
};

}  // namespace detail

/// `scope` names the free variables, outermost first.
inline std::string print_expr(const Expr& e, std::vector<std::string> scope = {}, PrintOptions options = {}) {
  return detail::ExprPrinter(std::move(scope), options).print(e, detail::kTop);
}

inline std::string canonical_string(const Expr& e, std::vector<std::string> scope = {}) {
  return print_expr(e, std::move(scope), PrintOptions{true});
}

}  // namespace soften
