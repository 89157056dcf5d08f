#pragma once

// Diagram items and include flattening. check_theory lives here too.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "soften/error.hpp"
#include "soften/expr.hpp"
#include "soften/kernel.hpp"

namespace soften {

/// `#keep i`: argument position i must survive parameter removal.
struct KeepParam {
  std::size_t index = 0;
  bool operator==(const KeepParam&) const = default;
};

/// `#role tag`: free-form tag carried through all operators.
struct Role {
  std::string tag;
  bool operator==(const Role&) const = default;
};

using Annotation = std::variant<KeepParam, Role>;

struct Declaration {
  std::string name;
  Expr type;
  std::optional<Expr> definiens;
  std::vector<Annotation> annotations;
  SourceLocation location;

  bool keeps(std::size_t position) const {
    return std::any_of(annotations.begin(), annotations.end(), [&](const Annotation& a) {
      const auto* keep = std::get_if<KeepParam>(&a);
      return keep != nullptr && keep->index == position;
    });
  }
};

struct Include {
  std::string target;
  SourceLocation location;
};

using TheoryItem = std::variant<Include, Declaration>;

struct Theory {
  std::string name;
  std::vector<TheoryItem> body;
  SourceLocation location;

  std::vector<std::string> includes() const {
    std::vector<std::string> out;
    for (const auto& item : body) {
      if (const auto* inc = std::get_if<Include>(&item)) out.push_back(inc->target);
    }
    return out;
  }

  const Declaration* find_local(const std::string& constant) const {
    for (const auto& item : body) {
      if (const auto* d = std::get_if<Declaration>(&item); d != nullptr && d->name == constant) return d;
    }
    return nullptr;
  }
};

struct Assignment {
  std::string constant;
  Expr value;
  SourceLocation location;
};

/// Inside a morphism or relation body, `include X` names either another
/// morphism/relation or a theory (meaning the identity on it).
using MorphismItem = std::variant<Include, Assignment>;

struct Morphism {
  std::string name;
  std::string domain;
  std::string codomain;
  std::vector<MorphismItem> body;
  bool partial = false;
  SourceLocation location;
};

struct LogicalRelation {
  std::string name;
  std::string over;  // the morphism the relation lives on
  std::vector<MorphismItem> body;
  /// A partial relation is exempt from the term-totality check.
  bool partial = false;
  SourceLocation location;
};

using DiagramItem = std::variant<Theory, Morphism, LogicalRelation>;

inline const std::string& item_name(const DiagramItem& item) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, item);
}

inline const SourceLocation& item_location(const DiagramItem& item) {
  return std::visit([](const auto& x) -> const SourceLocation& { return x.location; }, item);
}

/// Ordered collection of named items; later items may only refer to earlier ones.
class Diagram {
 public:
  void add(DiagramItem item) {
    const std::string& name = item_name(item);
    if (index_.count(name) != 0) throw Error("duplicate diagram item '" + name + "'");
    index_.emplace(name, items_.size());
    items_.push_back(std::move(item));
  }

  /// Replaces the item of the same name, keeping its position.
  void replace(DiagramItem item) {
    auto it = index_.find(item_name(item));
    if (it == index_.end()) throw Error("no diagram item '" + item_name(item) + "'");
    items_[it->second] = std::move(item);
  }

  void append(const Diagram& other) {
    for (const auto& item : other.items()) add(item);
  }

  const std::vector<DiagramItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::optional<std::size_t> position(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const DiagramItem* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &items_[it->second];
  }

  const Theory* find_theory(const std::string& name) const { return find_as<Theory>(name); }
  const Morphism* find_morphism(const std::string& name) const { return find_as<Morphism>(name); }
  const LogicalRelation* find_relation(const std::string& name) const { return find_as<LogicalRelation>(name); }

  const Theory& theory(const std::string& name) const {
    if (const Theory* t = find_theory(name)) return *t;
    throw Error("unknown theory '" + name + "'");
  }
  const Morphism& morphism(const std::string& name) const {
    if (const Morphism* m = find_morphism(name)) return *m;
    throw Error("unknown morphism '" + name + "'");
  }
  const LogicalRelation& relation(const std::string& name) const {
    if (const LogicalRelation* r = find_relation(name)) return *r;
    throw Error("unknown logical relation '" + name + "'");
  }

 private:
  template <class T>
  const T* find_as(const std::string& name) const {
    const DiagramItem* item = find(name);
    return item == nullptr ? nullptr : std::get_if<T>(item);
  }

  std::vector<DiagramItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct FlatDeclaration {
  std::string origin;
  const Declaration* declaration;
};

namespace detail {

inline void flatten_into(const Diagram& diagram, const Theory& theory, std::set<std::string>& visited,
                         std::vector<std::string>& stack, std::vector<FlatDeclaration>& out) {
  if (!visited.insert(theory.name).second) return;
  stack.push_back(theory.name);
  for (const auto& item : theory.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      if (std::find(stack.begin(), stack.end(), inc->target) != stack.end()) {
        throw Error(inc->location.to_string() + ": cyclic include of '" + inc->target + "'");
      }
      const Theory* target = diagram.find_theory(inc->target);
      if (target == nullptr) throw Error(inc->location.to_string() + ": unknown include target '" + inc->target + "'");
      flatten_into(diagram, *target, visited, stack, out);
    } else {
      out.push_back({theory.name, &std::get<Declaration>(item)});
    }
  }
  stack.pop_back();
}

}  // namespace detail

/// All declarations visible in `theory`, each once, in dependency order and
/// tagged with the declaring theory. Includes are expanded where they appear.
inline std::vector<FlatDeclaration> flatten(const Diagram& diagram, const Theory& theory) {
  std::set<std::string> visited;
  std::vector<std::string> stack;
  std::vector<FlatDeclaration> out;
  detail::flatten_into(diagram, theory, visited, stack, out);
  std::unordered_map<std::string, std::string> seen;
  for (const auto& fd : out) {
    auto [it, fresh] = seen.emplace(fd.declaration->name, fd.origin);
    if (!fresh) {
      throw Error("name clash in " + theory.name + ": constant '" + fd.declaration->name + "' is declared in both " +
                  it->second + " and " + fd.origin);
    }
  }
  return out;
}

/// Names of all theories transitively included by `theory`, itself included.
inline std::set<std::string> included_theories(const Diagram& diagram, const Theory& theory) {
  std::set<std::string> out{theory.name};
  std::vector<const Theory*> work{&theory};
  while (!work.empty()) {
    const Theory* t = work.back();
    work.pop_back();
    for (const auto& name : t->includes()) {
      if (out.insert(name).second) work.push_back(&diagram.theory(name));
    }
  }
  return out;
}

inline bool includes_theory(const Diagram& diagram, const std::string& theory, const std::string& target) {
  return included_theories(diagram, diagram.theory(theory)).count(target) != 0;
}

inline Signature signature_of(const Diagram& diagram, const Theory& theory) {
  Signature sig;
  for (const auto& fd : flatten(diagram, theory)) {
    sig.add({fd.declaration->name, fd.origin, fd.declaration->type, fd.declaration->definiens});
  }
  return sig;
}

inline Signature signature_of(const Diagram& diagram, const std::string& theory) {
  return signature_of(diagram, diagram.theory(theory));
}

/// Checks one declaration against the constants declared before it.
inline void check_declaration(const Signature& sig, const Declaration& d) {
  Expr sort = weak_head_normalize(sig, infer_type(sig, Context{}, d.type));
  if (sort->tag != Tag::type && sort->tag != Tag::kind) {
    throw TypeError("type of '" + d.name + "' is not classified by type or kind: " + print_expr(d.type));
  }
  if (d.definiens) check_type(sig, Context{}, *d.definiens, d.type);
  std::size_t arity = pi_arity(normalize(&sig, d.type, false));
  for (const auto& a : d.annotations) {
    if (const auto* keep = std::get_if<KeepParam>(&a)) {
      if (keep->index == 0 || keep->index > arity) {
        throw TypeError("#keep " + std::to_string(keep->index) + " on '" + d.name + "' exceeds its arity " +
                        std::to_string(arity));
      }
    }
  }
}

/// Diagnostic produced by the checkers; `item` names the diagram item.
struct Diagnostic {
  std::string item;
  SourceLocation location;
  std::string message;

  std::string to_string() const { return location.to_string() + ": " + item + ": " + message; }
};

/// Typechecks every declaration of `theory` in order. Throws on the first error.
inline void check_theory(const Diagram& diagram, const Theory& theory) {
  Signature sig;
  std::set<std::string> visited;
  auto add_flat = [&](const Theory& t) {
    std::set<std::string> local_visited = visited;
    std::vector<std::string> stack{theory.name};
    std::vector<FlatDeclaration> flat;
    detail::flatten_into(diagram, t, local_visited, stack, flat);
    visited = std::move(local_visited);
    for (const auto& fd : flat) sig.add({fd.declaration->name, fd.origin, fd.declaration->type, fd.declaration->definiens});
  };
  visited.insert(theory.name);
  for (const auto& item : theory.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      const Theory* target = diagram.find_theory(inc->target);
      if (target == nullptr) throw Error(inc->location.to_string() + ": unknown include target '" + inc->target + "'");
      auto here = diagram.position(theory.name);
      auto there = diagram.position(inc->target);
      if (here && there && *there >= *here) {
        throw Error(inc->location.to_string() + ": include of '" + inc->target + "' refers forward");
      }
      add_flat(*target);
      continue;
    }
    const auto& d = std::get<Declaration>(item);
    if (sig.contains(d.name)) {
      throw TypeError(d.location.to_string() + ": name clash: '" + d.name + "' is already declared in " +
                      sig.find(d.name)->origin);
    }
    try {
      check_declaration(sig, d);
    } catch (const TypeError& e) {
      throw TypeError(d.location.to_string() + ": in declaration of '" + d.name + "': " + e.what());
    }
    sig.add({d.name, theory.name, d.type, d.definiens});
  }
}

}  // namespace soften
