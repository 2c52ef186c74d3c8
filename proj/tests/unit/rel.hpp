#pragma once

#include <doctest.h>

// Purely relative comparison. doctest's default scale of 1 turns Approx into an
// absolute check for values far below one, which most of ours are.
inline doctest::Approx rel(double value) { return doctest::Approx(value).scale(0.0); }
