#pragma once

// Umbrella header.

#include "soften/check.hpp"
#include "soften/diff.hpp"
#include "soften/error.hpp"
#include "soften/expr.hpp"
#include "soften/kernel.hpp"
#include "soften/logrel.hpp"
#include "soften/modsys.hpp"
#include "soften/morphisms.hpp"
#include "soften/paramdrop.hpp"
#include "soften/prelude.hpp"
#include "soften/print.hpp"
#include "soften/soften.hpp"
#include "soften/syntax.hpp"
#include "soften/translate.hpp"
