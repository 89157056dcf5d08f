#pragma once

#include <string>
#include <vector>

#include "soften/error.hpp"
#include "soften/logrel.hpp"
#include "soften/modsys.hpp"
#include "soften/morphisms.hpp"

namespace soften {

inline std::vector<Diagnostic> check_item(const Diagram& diagram, const DiagramItem& item) {
  try {
    if (const auto* t = std::get_if<Theory>(&item)) {
      check_theory(diagram, *t);
    } else if (const auto* m = std::get_if<Morphism>(&item)) {
      check_morphism(diagram, *m);
    } else {
      check_logrel(diagram, std::get<LogicalRelation>(item));
    }
  } catch (const Error& e) {
    return {Diagnostic{item_name(item), item_location(item), e.what()}};
  }
  return {};
}

/// Checks every item in order; returns all failures (empty means ok).
inline std::vector<Diagnostic> check_diagram(const Diagram& diagram) {
  std::vector<Diagnostic> out;
  for (const auto& item : diagram.items()) {
    for (auto& d : check_item(diagram, item)) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace soften
