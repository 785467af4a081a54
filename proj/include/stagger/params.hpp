#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stagger/matrix.hpp"
#include "stagger/rng.hpp"

namespace stagger {

// A learnable tensor and its gradient buffer.
//
// `frozen` (empty or same size as value) marks entries excluded from
// learning: their gradients are dropped and SGD never moves them.
struct ParamTensor {
  ParamTensor() = default;
  ParamTensor(std::string name, std::size_t rows, std::size_t cols)
      : name(std::move(name)), value(rows, cols), grad(rows, cols) {}

  std::string name;
  Matrix value;
  Matrix grad;
  std::vector<bool> frozen;

  void zero_grad() { grad.fill(0.0); }
  bool is_frozen(std::size_t i) const { return !frozen.empty() && frozen[i]; }
};

// Non-owning, ordered view over a model's parameters.
using ParamRefs = std::vector<ParamTensor*>;

// Throws ConfigError if two tensors share a name or a grad shape disagrees.
void check_param_set(const ParamRefs& params);

// Scaled uniform (Glorot) fill on ±sqrt(6 / (fan_in + fan_out)).
void init_uniform_scaled(Matrix& m, SeededRng& rng);

// Central finite differences (f(θ+ε) − f(θ−ε)) / 2ε for every scalar of every
// tensor. `f` must read the current parameter values and be deterministic.
// Parameters are restored exactly after each probe.
std::vector<Matrix> finite_diff_grad(const std::function<double()>& f,
                                     const ParamRefs& params, double epsilon = 1e-5);

// Relative error used by every gradient check:
// |a − n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares analytic gradients (one per param, same order) against numeric.
GradCheckResult compare_gradients(const ParamRefs& params,
                                  const std::vector<Matrix>& analytic,
                                  const std::vector<Matrix>& numeric);

}  // namespace stagger
