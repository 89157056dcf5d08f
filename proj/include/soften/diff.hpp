#pragma once

// Item-by-item comparison of two diagrams, modulo α or α and β.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "soften/expr.hpp"
#include "soften/kernel.hpp"
#include "soften/modsys.hpp"
#include "soften/print.hpp"

namespace soften {

enum class Modulo { alpha, alpha_beta };

enum class Verdict { equal, equal_modulo, mismatch };

struct DiffEntry {
  std::string item;
  std::string part;  // declaration or assignment name; empty for the item header
  Verdict verdict;
  std::string left;
  std::string right;
};

struct DiffReport {
  std::vector<DiffEntry> entries;

  bool equal() const {
    for (const auto& e : entries) {
      if (e.verdict == Verdict::mismatch) return false;
    }
    return true;
  }

  std::vector<DiffEntry> mismatches() const {
    std::vector<DiffEntry> out;
    for (const auto& e : entries) {
      if (e.verdict == Verdict::mismatch) out.push_back(e);
    }
    return out;
  }
};

namespace detail {

inline std::string show_optional(const std::optional<Expr>& e, bool beta) {
  if (!e) return "<none>";
  return canonical_string(beta ? beta_normalize(*e) : *e);
}

inline Verdict compare_exprs(const std::optional<Expr>& a, const std::optional<Expr>& b, Modulo modulo) {
  if (!a || !b) return a.has_value() == b.has_value() ? Verdict::equal : Verdict::mismatch;
  if (identical(*a, *b)) return Verdict::equal;
  if (alpha_equal(*a, *b)) return Verdict::equal_modulo;
  if (modulo == Modulo::alpha_beta && alpha_equal(beta_normalize(*a), beta_normalize(*b))) return Verdict::equal_modulo;
  return Verdict::mismatch;
}

inline Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

struct Part {
  std::string name;
  std::optional<Expr> first;
  std::optional<Expr> second;
};

inline std::string header(const DiagramItem& item) {
  std::string out;
  if (const auto* t = std::get_if<Theory>(&item)) {
    out = "theory";
    for (const auto& i : t->body) {
      if (const auto* inc = std::get_if<Include>(&i)) out += " include " + inc->target;
    }
  } else if (const auto* m = std::get_if<Morphism>(&item)) {
    out = std::string(m->partial ? "partial " : "") + "morph " + m->domain + " -> " + m->codomain;
    for (const auto& i : m->body) {
      if (const auto* inc = std::get_if<Include>(&i)) out += " include " + inc->target;
    }
  } else {
    const auto& r = std::get<LogicalRelation>(item);
    out = std::string(r.partial ? "partial " : "") + "logrel on " + r.over;
    for (const auto& i : r.body) {
      if (const auto* inc = std::get_if<Include>(&i)) out += " include " + inc->target;
    }
  }
  return out;
}

inline std::vector<Part> parts(const DiagramItem& item) {
  std::vector<Part> out;
  if (const auto* t = std::get_if<Theory>(&item)) {
    for (const auto& i : t->body) {
      if (const auto* d = std::get_if<Declaration>(&i)) out.push_back({d->name, d->type, d->definiens});
    }
  } else {
    const auto& body = std::holds_alternative<Morphism>(item) ? std::get<Morphism>(item).body
                                                              : std::get<LogicalRelation>(item).body;
    for (const auto& i : body) {
      if (const auto* a = std::get_if<Assignment>(&i)) out.push_back({a->constant, a->value, std::nullopt});
    }
  }
  return out;
}

inline void diff_item(const std::string& name, const DiagramItem* a, const DiagramItem* b, Modulo modulo,
                      std::vector<DiffEntry>& out) {
  if (a == nullptr || b == nullptr) {
    out.push_back({name, "", Verdict::mismatch, a ? header(*a) : "<missing>", b ? header(*b) : "<missing>"});
    return;
  }
  std::string ha = header(*a);
  std::string hb = header(*b);
  out.push_back({name, "", ha == hb ? Verdict::equal : Verdict::mismatch, ha, hb});
  auto pa = parts(*a);
  auto pb = parts(*b);
  std::size_t n = std::max(pa.size(), pb.size());
  bool beta = modulo == Modulo::alpha_beta;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= pa.size() || i >= pb.size() || pa[i].name != pb[i].name) {
      out.push_back({name, i < pa.size() ? pa[i].name : pb[i].name, Verdict::mismatch,
                     i < pa.size() ? pa[i].name : "<missing>", i < pb.size() ? pb[i].name : "<missing>"});
      continue;
    }
    Verdict v = worst(compare_exprs(pa[i].first, pb[i].first, modulo), compare_exprs(pa[i].second, pb[i].second, modulo));
    std::string left = show_optional(pa[i].first, beta);
    std::string right = show_optional(pb[i].first, beta);
    if (pa[i].second || pb[i].second) {
      left += " := " + show_optional(pa[i].second, beta);
      right += " := " + show_optional(pb[i].second, beta);
    }
    out.push_back({name, pa[i].name, v, left, right});
  }
}

}  // namespace detail

/// Compares items with equal names; items present on one side only mismatch.
/// Declarations are compared in order; annotations are ignored.
inline DiffReport diff_diagrams(const Diagram& a, const Diagram& b, Modulo modulo) {
  DiffReport report;
  std::set<std::string> seen;
  for (const auto& item : a.items()) {
    seen.insert(item_name(item));
    detail::diff_item(item_name(item), &item, b.find(item_name(item)), modulo, report.entries);
  }
  for (const auto& item : b.items()) {
    if (seen.count(item_name(item)) == 0) detail::diff_item(item_name(item), nullptr, &item, modulo, report.entries);
  }
  return report;
}

/// Deterministic rendering with depth-named binders over β-normal forms:
/// two theories print identically iff they agree up to α/β.
inline std::string canonical_item_string(const DiagramItem& item) {
  std::string out = item_name(item) + ": " + detail::header(item) + "\n";
  for (const auto& p : detail::parts(item)) {
    out += "  " + p.name + " : " + detail::show_optional(p.first, true);
    if (p.second) out += " := " + detail::show_optional(p.second, true);
    out += "\n";
  }
  return out;
}

}  // namespace soften
