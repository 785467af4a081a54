#pragma once

#include <span>

#include "stagger/matrix.hpp"
#include "stagger/rng.hpp"

namespace stagger {

// Output plus the per-element scale that produced it. An empty mask means
// the identity was applied.
struct DropoutResult {
  Vector output;
  Vector mask;
};

// Inverted dropout: in train mode each element is zeroed with probability
// `rate` and survivors are scaled by 1/(1 − rate). Eval mode and rate 0 are
// the exact identity. Throws ConfigError unless 0 ≤ rate < 1.
DropoutResult dropout(std::span<const double> v, double rate, SeededRng& rng, bool train_mode);

// Applies a stored mask to an upstream gradient.
Vector dropout_backward(const Vector& mask, std::span<const double> grad);

void validate_dropout_rate(double rate);

}  // namespace stagger
