#pragma once

// Randomized property checks shared by the gtest suite and the acceptance runner.

#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "support.hpp"

namespace properties {

using namespace soften;
using testing_support::parse;

struct Outcome {
  int cases = 0;
  int failures = 0;
  std::vector<std::string> examples;

  void fail(const std::string& what) {
    if (++failures <= 5) examples.push_back(what);
  }
  bool ok() const { return cases > 0 && failures == 0; }
};

// Hard-typed terms over products and equality, generated as source text.

struct Ty {
  std::string atom;  // empty for a product
  std::shared_ptr<const Ty> left;
  std::shared_ptr<const Ty> right;

  std::string text() const { return atom.empty() ? "(prod " + left->text() + " " + right->text() + ")" : atom; }
};
using TyPtr = std::shared_ptr<const Ty>;

struct Var {
  std::string name;
  TyPtr type;
};

class TermGen {
 public:
  TermGen(std::mt19937& rng, int atoms) : rng_(rng), atoms_(atoms) {}

  TyPtr type(int depth) {
    if (depth == 0 || pick(3) != 0) return std::make_shared<const Ty>(Ty{"a" + std::to_string(pick(atoms_)), {}, {}});
    return std::make_shared<const Ty>(Ty{"", type(depth - 1), type(depth - 1)});
  }

  std::string term(const TyPtr& t, std::vector<Var> vars, int depth) {
    std::vector<std::string> candidates;
    for (const auto& v : vars) {
      if (v.type->text() == t->text()) candidates.push_back(v.name);
    }
    if (depth == 0 || pick(4) == 0) {
      if (!candidates.empty()) return candidates[pick(candidates.size())];
      if (t->atom.empty()) return pair(t, vars, 0);
      // An atom without a variable: project out of a pair.
      return "(projL " + t->text() + " a0 (pair " + t->text() + " a0 " + term(t, vars, 0) + " x0))";
    }
    switch (pick(5)) {
      case 0:
        if (t->atom.empty()) return pair(t, vars, depth);
        [[fallthrough]];
      case 1: {
        TyPtr other = type(1);
        return "(projL " + t->text() + " " + other->text() + " " + term(prod(t, other), vars, depth - 1) + ")";
      }
      case 2: {
        TyPtr other = type(1);
        return "(projR " + other->text() + " " + t->text() + " " + term(prod(other, t), vars, depth - 1) + ")";
      }
      case 3: {
        TyPtr u = type(1);
        std::string y = fresh();
        std::string arg = term(u, vars, depth - 1);
        vars.push_back({y, u});
        return "(([" + y + ": tm " + u->text() + "] " + term(t, vars, depth - 1) + ") " + arg + ")";
      }
      default:
        if (!candidates.empty()) return candidates[pick(candidates.size())];
        return term(t, vars, depth - 1);
    }
  }

  // A proof and its proposition.
  std::pair<std::string, std::string> proof(const std::vector<Var>& vars, const std::vector<Var>& proofs, int depth) {
    if (!proofs.empty() && pick(3) == 0) {
      const Var& p = proofs[pick(proofs.size())];
      return {p.name, p.type->atom};
    }
    TyPtr t = type(1);
    std::string u = term(t, vars, depth);
    if (pick(3) == 0) {
      TyPtr w = type(1);
      std::string y = fresh();
      std::string arg = term(w, vars, depth);
      std::string prop = "ded (eq " + t->text() + " " + u + " " + u + ")";
      return {"(([" + y + ": tm " + w->text() + "] refl " + t->text() + " " + u + ") " + arg + ")", prop};
    }
    return {"(refl " + t->text() + " " + u + ")", "ded (eq " + t->text() + " " + u + " " + u + ")"};
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  std::string pair(const TyPtr& t, const std::vector<Var>& vars, int depth) {
    int next = depth > 0 ? depth - 1 : 0;
    return "(pair " + t->left->text() + " " + t->right->text() + " " + term(t->left, vars, next) + " " +
           term(t->right, vars, next) + ")";
  }

  static TyPtr prod(TyPtr l, TyPtr r) { return std::make_shared<const Ty>(Ty{"", std::move(l), std::move(r)}); }

  std::string fresh() { return "y" + std::to_string(counter_++); }

  std::mt19937& rng_;
  int atoms_;
  int counter_ = 0;
};

// A random context: type atoms, one term per atom, extra terms, one proof.
struct Scenario {
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<Var> vars;
  std::vector<Var> proofs;
};

inline Scenario scenario(TermGen& gen, std::mt19937& rng) {
  Scenario s;
  int atoms = 2;
  for (int i = 0; i < atoms; ++i) s.entries.push_back({"a" + std::to_string(i), "tp"});
  for (int i = 0; i < atoms; ++i) {
    auto t = std::make_shared<const Ty>(Ty{"a" + std::to_string(i), {}, {}});
    s.entries.push_back({"x" + std::to_string(i), "tm " + t->text()});
    s.vars.push_back({"x" + std::to_string(i), t});
  }
  int extra = static_cast<int>(rng() % 3);
  for (int i = 0; i < extra; ++i) {
    TyPtr t = gen.type(2);
    std::string name = "w" + std::to_string(i);
    s.entries.push_back({name, "tm " + t->text()});
    s.vars.push_back({name, t});
  }
  std::string prop = "ded (eq a0 x0 x0)";
  s.entries.push_back({"p", prop});
  s.proofs.push_back({"p", std::make_shared<const Ty>(Ty{prop, {}, {}})});
  return s;
}

struct Extension {
  Diagram all;
  Signature hard;
  Signature ext;
  Mapping m;
  Mapping r;
};

inline Extension extension(ExtendMode mode) {
  Diagram d = testing_support::with_prelude(testing_support::read_corpus("core.lf") +
                                            "\ntheory PE = include HProd. include HEqual.\n");
  ExtendResult x = lr_extend(d, "TE", "TP", "PE", mode);
  Diagram all = d;
  all.append(x.generated);
  return {all, signature_of(all, "PE"), signature_of(all, x.theory.name), resolve_morphism(all, x.morphism),
          resolve_relation(all, x.relation)};
}

struct Sample {
  Context ctx;
  Expr term;
  Expr type;
};

inline Sample sample(TermGen& gen, std::mt19937& rng) {
  Scenario s = scenario(gen, rng);
  Context ctx = testing_support::context(Diagram{}, s.entries);
  std::string term;
  std::string type;
  if (gen.pick(4) == 0) {
    std::tie(term, type) = gen.proof(s.vars, s.proofs, 2);
  } else {
    TyPtr t = gen.type(2);
    term = gen.term(t, s.vars, 3);
    type = "tm " + t->text();
  }
  return {ctx, parse(term, ctx.names()), parse(type, ctx.names())};
}

// Checks the basic lemma for one sample; returns an error message or "".
inline std::string check_basic_lemma(const Extension& x, const Sample& s) {
  try {
    check_type(x.hard, s.ctx, s.term, s.type);
  } catch (const Error& e) {
    return std::string("generator produced an ill-typed term: ") + e.what();
  }
  try {
    std::vector<BinderImage> env;
    Context ctx = apply_logrel_context(x.m, x.r, s.ctx, &env);
    auto rt = apply_logrel(x.m, x.r, s.term, env);
    auto ra = apply_logrel(x.m, x.r, s.type, env);
    auto mt = apply_morphism_in(x.m, s.term, env);
    auto ma = apply_morphism_in(x.m, s.type, env);
    if (!rt || !ra) return "relation image undefined";
    if (mt.has_value() != ma.has_value()) return "morphism image defined on only one of term and type";
    if (mt) check_type(x.ext, ctx, *mt, *ma);
    check_type(x.ext, ctx, *rt, mt ? beta_normalize(app(*ra, *mt)) : *ra);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

inline Outcome typing_preserved(ExtendMode mode, int cases, unsigned seed = 20261018) {
  Extension x = extension(mode);
  std::mt19937 rng(seed);
  TermGen gen(rng, 2);
  Outcome out;
  for (int i = 0; i < cases; ++i, ++out.cases) {
    Sample s = sample(gen, rng);
    std::string error = check_basic_lemma(x, s);
    if (!error.empty()) out.fail("case " + std::to_string(i) + ": " + print_expr(s.term, s.ctx.names()) + "\n  " + error);
  }
  return out;
}

inline Outcome substitution_commutes(ExtendMode mode, int cases, unsigned seed = 7) {
  Extension x = extension(mode);
  std::mt19937 rng(seed);
  TermGen gen(rng, 2);
  Outcome out;
  for (int i = 0; i < cases; ++i, ++out.cases) {
    Scenario s = scenario(gen, rng);
    TyPtr u = gen.type(1);
    Context outer = testing_support::context(Diagram{}, s.entries);
    std::string arg = gen.term(u, s.vars, 2);
    std::vector<Var> vars = s.vars;
    vars.push_back({"z", u});
    auto entries = s.entries;
    entries.push_back({"z", "tm " + u->text()});
    Context inner = testing_support::context(Diagram{}, entries);
    TyPtr t = gen.type(2);
    Expr body = parse(gen.term(t, vars, 3), inner.names());
    Expr value = parse(arg, outer.names());

    std::vector<BinderImage> env;
    apply_logrel_context(x.m, x.r, outer, &env);
    std::vector<BinderImage> env_inner = env;
    env_inner.push_back({true, true});
    auto rs = apply_logrel(x.m, x.r, value, env);
    auto ms = apply_morphism_in(x.m, value, env);
    auto rt = apply_logrel(x.m, x.r, body, env_inner);
    auto mt = apply_morphism_in(x.m, body, env_inner);
    auto lhs_r = apply_logrel(x.m, x.r, substitute(body, value), env);
    auto lhs_m = apply_morphism_in(x.m, substitute(body, value), env);
    if (!rs || !ms || !rt || !mt || !lhs_r || !lhs_m) {
      out.fail("case " + std::to_string(i) + ": undefined image");
      continue;
    }
    auto plug = [&](const Expr& e) { return beta_normalize(substitute(substitute(e, shift(*rs, 1)), *ms)); };
    if (!alpha_equal(beta_normalize(*lhs_r), plug(*rt)) || !alpha_equal(beta_normalize(*lhs_m), plug(*mt))) {
      out.fail("case " + std::to_string(i) + ": " + print_expr(body, inner.names()) + " with z := " +
               print_expr(value, outer.names()));
    }
  }
  return out;
}

inline Outcome subject_reduction(int cases, unsigned seed = 99) {
  Extension x = extension(ExtendMode::raw);
  std::mt19937 rng(seed);
  TermGen gen(rng, 2);
  Outcome out;
  for (int i = 0; i < cases; ++i, ++out.cases) {
    Sample s = sample(gen, rng);
    Expr n = normalize(&x.hard, s.term, false);
    bool ok = alpha_equal(normalize(&x.hard, n, false), n);
    try {
      check_type(x.hard, s.ctx, n, s.type);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) out.fail("case " + std::to_string(i) + ": " + print_expr(s.term, s.ctx.names()));
  }
  return out;
}

// Random soft theories with dead and live binders.

inline std::string random_soft_theory(std::mt19937& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::string out = "theory P = include STyped.\n  k0 : tp.\n  k1 : term.\n";
  struct Sig {
    std::string name;
    std::vector<std::string> binders;  // "tp" or "term"
    std::string result;
  };
  std::vector<Sig> simple;
  int constants = 2 + static_cast<int>(pick(4));
  for (int c = 0; c < constants; ++c) {
    std::string name = "f" + std::to_string(c);
    std::vector<std::string> binders;
    std::vector<std::pair<std::string, std::string>> named;
    std::string type;
    bool has_proof = false;
    int arity = 1 + static_cast<int>(pick(3));
    for (int b = 0; b < arity; ++b) {
      std::string v = "v" + std::to_string(b);
      std::string sort = pick(2) == 0 ? "tp" : "term";
      std::string terms;
      std::string tps;
      for (const auto& [n, s] : named) (s == "term" ? terms : tps) = n;
      if (!terms.empty() && !tps.empty() && pick(3) == 0) {
        type += "ded (of " + terms + " " + tps + ") -> ";
        has_proof = true;
        continue;
      }
      binders.push_back(sort);
      if (pick(3) == 0) {
        type += sort + " -> ";
      } else {
        type += "{" + v + ": " + sort + "} ";
        named.push_back({v, sort});
      }
    }
    std::string result = pick(2) == 0 ? "tp" : "term";
    out += "  " + name + " : " + type + result + ".\n";
    if (!has_proof) simple.push_back({name, binders, result});
  }
  int definitions = 1 + static_cast<int>(pick(3));
  for (int g = 0; g < definitions && !simple.empty(); ++g) {
    const Sig& callee = simple[pick(simple.size())];
    std::vector<std::pair<std::string, std::string>> params;
    int arity = static_cast<int>(pick(4));
    for (int b = 0; b < arity; ++b) params.push_back({"u" + std::to_string(b), pick(2) == 0 ? "tp" : "term"});
    std::string type;
    std::string lambda;
    for (const auto& [n, s] : params) {
      type += "{" + n + ": " + s + "} ";
      lambda += "[" + n + ": " + s + "] ";
    }
    std::string call = callee.name;
    for (const auto& sort : callee.binders) {
      std::vector<std::string> options{sort == "tp" ? "k0" : "k1"};
      for (const auto& [n, s] : params) {
        if (s == sort) options.push_back(n);
      }
      call += " " + options[pick(options.size())];
    }
    out += "  g" + std::to_string(g) + " : " + type + callee.result + "\n    := " + lambda + call + ".\n";
  }
  return out;
}

// `nonempty` counts cases where something was chosen.
inline Outcome paramdrop_unused(int cases, int* nonempty = nullptr, unsigned seed = 4242) {
  std::mt19937 rng(seed);
  const Diagram base = testing_support::prelude();
  Outcome out;
  if (nonempty != nullptr) *nonempty = 0;
  for (int i = 0; i < cases; ++i, ++out.cases) {
    std::string text = random_soft_theory(rng);
    Diagram d = base;
    parse_into(d, text, "<random>");
    auto input = check_diagram(d);
    if (!input.empty()) {
      out.fail("ill-typed input:\n" + text + input[0].to_string());
      continue;
    }
    PositionSet chosen = choose_positions(d);
    if (!chosen.empty() && nonempty != nullptr) ++*nonempty;
    bool ok = is_unused(d, chosen) && check_diagram(remove_positions(d, chosen)).empty();
    if (!ok) out.fail("case " + std::to_string(i) + ":\n" + text);
  }
  return out;
}

// Random well-scoped expressions, typed or not.

inline Expr random_expr(std::mt19937& rng, std::size_t scope, int depth) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  static const std::vector<std::string> constants{"tp", "term", "of", "ded", "prop", "pair"};
  static const std::vector<std::string> hints{"x", "y", "a", "x_star"};
  if (depth == 0 || pick(4) == 0) {
    if (scope > 0 && pick(2) == 0) return var(pick(scope));
    return pick(8) == 0 ? type_sort() : constant(constants[pick(constants.size())]);
  }
  switch (pick(3)) {
    case 0:
      return app(random_expr(rng, scope, depth - 1), random_expr(rng, scope, depth - 1));
    case 1:
      return lambda(hints[pick(hints.size())], random_expr(rng, scope, depth - 1),
                    random_expr(rng, scope + 1, depth - 1));
    default: {
      Expr body = random_expr(rng, scope + 1, depth - 1);
      bool anonymous = !occurs(body, 0) && pick(2) == 0;
      return pi(hints[pick(hints.size())], random_expr(rng, scope, depth - 1), body, anonymous);
    }
  }
}

inline Outcome print_parse(int cases, unsigned seed = 123) {
  std::mt19937 rng(seed);
  const std::vector<std::string> scope{"f", "g", "x"};
  Outcome out;
  for (int i = 0; i < cases; ++i, ++out.cases) {
    Expr e = random_expr(rng, scope.size(), 5);
    std::string printed = print_expr(e, scope);
    bool ok = false;
    try {
      Expr back = parse(printed, scope);
      ok = alpha_equal(back, e) && print_expr(back, scope) == printed;
    } catch (const Error&) {
    }
    if (!ok) out.fail("case " + std::to_string(i) + ": " + printed);
  }
  return out;
}

// Same term with other binder names and arrow sugar toggled where allowed.
inline Expr renamed(const Expr& e) {
  switch (e->tag) {
    case Tag::app:
      return app(renamed(e->first), renamed(e->second));
    case Tag::lambda:
      return lambda("z", renamed(e->first), renamed(e->second));
    case Tag::pi:
      return pi("z", renamed(e->first), renamed(e->second), !e->anonymous && !occurs(e->second, 0));
    default:
      return e;
  }
}

inline Expr pick_variant(std::mt19937& rng, const Expr& e) {
  switch (rng() % 3) {
    case 0:
      return renamed(e);
    case 1:
      return e->tag == Tag::lambda ? lambda("q", renamed(e->first), e->second) : e;
    default:
      return random_expr(rng, 2, 3);
  }
}

inline Outcome canonical_decides_alpha(int cases, unsigned seed = 321) {
  std::mt19937 rng(seed);
  Outcome out;
  for (int i = 0; i < cases; ++i, ++out.cases) {
    Expr a = random_expr(rng, 2, 3);
    Expr b = pick_variant(rng, a);
    bool same = canonical_string(a, {"u", "v"}) == canonical_string(b, {"u", "v"});
    if (same != alpha_equal(a, b)) out.fail("case " + std::to_string(i));
  }
  return out;
}

// Printing a corpus (plus its softening) and parsing it back is stable.
inline Outcome corpus_round_trip(const std::vector<std::string>& files) {
  Outcome out;
  for (const auto& file : files) {
    Diagram d = testing_support::load(file);
    Diagram all = d;
    SoftenResult r = soften_diagram(d);
    all.append(r.output);
    all.append(r.witnesses);
    std::string once = print_diagram(all);
    Diagram back = parse_diagram(once, "printed");
    ++out.cases;
    bool ok = back.size() == all.size() && print_diagram(back) == once;
    for (std::size_t i = 0; ok && i < all.size(); ++i) {
      ok = canonical_item_string(all.items()[i]) == canonical_item_string(back.items()[i]);
    }
    if (!ok) out.fail(file);
  }
  return out;
}

}  // namespace properties
