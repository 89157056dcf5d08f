#pragma once

// The base theories and the built-in type erasure TE and type preservation TP.

#include <string_view>

namespace soften {

inline constexpr std::string_view kPreludeText = R"lf(// Base theories for hard and soft typing.

theory Proofs =
  prop : type.
  ded : prop -> type.

theory HTyped =
  include Proofs.
  tp : type.
  tm : tp -> type.

theory STyped =
  include Proofs.
  tp : type.
  term : type.
  of : term -> tp -> prop.

// Type erasure. ded has no image: proofs are not translated.
partial morph TE : HTyped -> STyped =
  prop := prop.
  tp := tp.
  tm := [a: tp] term.

// Type preservation: every erased term is well-typed.
logrel TP on TE =
  ded := [p: prop] ded p.
  tm := [a: tp] [x: term] ded (of x a).
)lf";

inline constexpr std::string_view kPreludeFile = "<prelude>";

}  // namespace soften
