#include "stagger/dropout.hpp"

#include <cmath>

#include "stagger/error.hpp"

namespace stagger {

void validate_dropout_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

DropoutResult dropout(std::span<const double> v, double rate, SeededRng& rng, bool train_mode) {
  validate_dropout_rate(rate);
  DropoutResult r;
  r.output.assign(v.begin(), v.end());
  if (!train_mode || rate == 0.0) return r;
  const double keep_scale = 1.0 / (1.0 - rate);
  r.mask.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    r.mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
    r.output[i] *= r.mask[i];
  }
  return r;
}

Vector dropout_backward(const Vector& mask, std::span<const double> grad) {
  Vector g(grad.begin(), grad.end());
  if (mask.empty()) return g;
  if (mask.size() != grad.size()) {
    throw DimensionError("dropout_backward: mask length " + std::to_string(mask.size()) +
                         ", gradient length " + std::to_string(grad.size()));
  }
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= mask[i];
  return g;
}

}  // namespace stagger
