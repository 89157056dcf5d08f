#pragma once

// Soften: hard-typed theories over HTyped to soft-typed theories over STyped.
// Each theory X becomes X_soft: the cleaned LR extension along TE and TP.
// Morphisms f between such theories become f_soft.
// TE_X : X -> X_soft and TP_X on TE_X are the witnesses.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "soften/check.hpp"
#include "soften/error.hpp"
#include "soften/logrel.hpp"
#include "soften/modsys.hpp"
#include "soften/morphisms.hpp"
#include "soften/paramdrop.hpp"
#include "soften/translate.hpp"

namespace soften {

inline constexpr const char* kHardBase = "HTyped";
inline constexpr const char* kSoftBase = "STyped";
inline constexpr const char* kErasure = "TE";
inline constexpr const char* kPreservation = "TP";

struct DroppedDeclaration {
  std::string theory;
  std::string constant;
  std::string reason;
};

struct SoftenResult {
  Diagram output;     // X_soft theories and f_soft morphisms
  Diagram witnesses;  // TE_X morphisms and TP_X relations
  std::vector<DroppedDeclaration> report;
  std::map<std::string, std::string> names;  // input item -> softened item
};

inline std::string soft_name(const std::string& x) { return x + "_soft"; }

namespace detail {

inline ExtendState start_soften(const Diagram& diagram) {
  for (const char* name : {kHardBase, kSoftBase}) {
    if (diagram.find_theory(name) == nullptr) throw TranslationError(std::string("base theory ") + name + " is missing");
  }
  if (diagram.find_morphism(kErasure) == nullptr || diagram.find_relation(kPreservation) == nullptr) {
    throw TranslationError("built-in TE/TP are missing (prelude not loaded?)");
  }
  ExtendState s = start_extend(diagram, kErasure, kPreservation, ExtendMode::cleaned);
  s.pushout.theory_name = soft_name;
  s.pushout.witness_name = [](const std::string& x) { return std::string(kErasure) + "_" + x; };
  s.relation_name = [](const std::string& x) { return std::string(kPreservation) + "_" + x; };
  return s;
}

inline void soften_morphism_into(Diagram& work, ExtendState& state, const Morphism& f) {
  PushoutState& po = state.pushout;
  if (po.morphism_image.count(f.name) != 0) return;
  const std::string soft_domain = po.theory_image.at(f.domain);
  const std::string soft_codomain = po.theory_image.at(f.codomain);
  Morphism out{soft_name(f.name), soft_domain, soft_codomain, {}, f.partial, f.location};
  fresh_or_throw(work, out.name);
  const Mapping& m_source = po.witness.at(f.domain);
  const Mapping& m_target = po.witness.at(f.codomain);
  const Mapping& r_target = state.relation_map.at(f.codomain);
  Signature source = signature_of(work, f.domain);
  Signature target = signature_of(work, soft_codomain);

  for (const auto& item : f.body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      if (work.find_morphism(inc->target) != nullptr) {
        auto it = po.morphism_image.find(inc->target);
        if (it == po.morphism_image.end()) {
          throw TranslationError(f.name + " includes morphism " + inc->target + ", which is not softened");
        }
        out.body.push_back(Include{it->second, inc->location});
      } else if (auto it = po.theory_image.find(inc->target); it != po.theory_image.end()) {
        out.body.push_back(Include{it->second, inc->location});
      } else {
        out.body.push_back(*inc);
      }
      continue;
    }
    const auto& a = std::get<Assignment>(item);
    const ConstantInfo* info = source.find(a.constant);
    if (info == nullptr) throw TranslationError(f.name + " assigns unknown constant '" + a.constant + "'");
    const std::string where = f.name + "/" + a.constant;
    bool emitted = false;
    if (m_source.find(a.constant)) {
      auto value = apply_morphism(m_target, a.value);
      if (!value) throw TranslationError(where + ": assignment has no image under " + m_target.name);
      auto origin_image = po.theory_image.find(info->origin);
      auto removed = origin_image == po.theory_image.end()
                         ? state.removed.end()
                         : state.removed.find(qualified(origin_image->second, a.constant));
      if (removed != state.removed.end() && !removed->second.empty()) {
        Expr type = normalize(&target, infer_type(target, Context{}, *value), false);
        try {
          value = strip_binders(with_lambdas(*value, type, *removed->second.rbegin()), removed->second, Tag::lambda);
        } catch (const TranslationError& e) {
          throw TranslationError(where + ": " + e.what());
        }
      }
      out.body.push_back(Assignment{a.constant, *value, a.location});
      emitted = true;
    }
    if (auto star = state.star.find(qualified(info->origin, a.constant)); star != state.star.end()) {
      auto witness = apply_logrel(m_target, r_target, a.value);
      if (!witness) throw TranslationError(where + ": assignment has no image under " + r_target.name);
      out.body.push_back(Assignment{star->second, *witness, a.location});
      emitted = true;
    }
    if (!emitted) throw TranslationError(where + ": neither the constant nor its witness survives softening");
  }
  po.morphism_image[f.name] = out.name;
  work.add(std::move(out));
}

}  // namespace detail

/// Softens `roots` (theory or morphism names; empty means every theory over
/// HTyped) plus what they include, then every input morphism between
/// softened theories. All generated items are re-checked.
inline SoftenResult soften_diagram(const Diagram& diagram, const std::vector<std::string>& roots = {},
                                   bool verify = true) {
  Diagram work = diagram;
  ExtendState state = detail::start_soften(diagram);
  const std::set<std::string> base{kHardBase, kSoftBase, "Proofs"};

  std::vector<std::string> theories;
  std::set<std::string> morphism_roots;
  auto want_theory = [&](const std::string& name) {
    if (!includes_theory(diagram, name, kHardBase)) {
      throw TranslationError("theory " + name + " does not include " + kHardBase);
    }
    if (std::find(theories.begin(), theories.end(), name) == theories.end()) theories.push_back(name);
  };
  if (roots.empty()) {
    for (const auto& item : diagram.items()) {
      const auto* t = std::get_if<Theory>(&item);
      if (t != nullptr && base.count(t->name) == 0 && includes_theory(diagram, t->name, kHardBase)) {
        theories.push_back(t->name);
      }
    }
  } else {
    for (const auto& root : roots) {
      if (diagram.find_theory(root) != nullptr) {
        want_theory(root);
      } else if (const Morphism* f = diagram.find_morphism(root)) {
        want_theory(f->domain);
        want_theory(f->codomain);
        morphism_roots.insert(root);
      } else {
        throw TranslationError("unknown root '" + root + "'");
      }
    }
  }
  for (const auto& t : theories) lr_extend_theory(work, state, t);
  for (const auto& item : diagram.items()) {
    const auto* f = std::get_if<Morphism>(&item);
    if (f == nullptr || f->name == kErasure) continue;
    if (f->domain == kHardBase && f->codomain == kHardBase) continue;
    bool between = state.pushout.theory_image.count(f->domain) != 0 &&
                   state.pushout.theory_image.count(f->codomain) != 0;
    if (!between) {
      if (morphism_roots.count(f->name) != 0) throw TranslationError("cannot soften morphism " + f->name);
      continue;
    }
    if (f->domain == kHardBase || f->codomain == kHardBase) continue;
    detail::soften_morphism_into(work, state, *f);
  }

  SoftenResult result;
  std::set<std::string> outputs;
  for (const auto& [from, to] : state.pushout.theory_image) {
    if (base.count(from) == 0) result.names[from] = to, outputs.insert(to);
  }
  for (const auto& [from, to] : state.pushout.morphism_image) result.names[from] = to, outputs.insert(to);
  for (std::size_t i = diagram.size(); i < work.size(); ++i) {
    const DiagramItem& item = work.items()[i];
    (outputs.count(item_name(item)) != 0 ? result.output : result.witnesses).add(item);
  }
  for (const auto& q : state.pushout.dropped) {
    auto slash = q.find('/');
    result.report.push_back({q.substr(0, slash), q.substr(slash + 1), "type translation undefined under TE"});
  }

  if (verify) {
    std::vector<std::string> failures;
    for (std::size_t i = diagram.size(); i < work.size(); ++i) {
      for (const auto& d : check_item(work, work.items()[i])) failures.push_back(d.to_string());
    }
    if (!failures.empty()) {
      std::string message = "softened output does not typecheck:";
      for (const auto& f : failures) message += "\n  " + f;
      throw TranslationError(message);
    }
  }
  return result;
}

}  // namespace soften
