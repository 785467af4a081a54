#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stagger/params.hpp"

namespace stagger {

// Linear map from features to per-tag emission scores.
struct ProjectionParams {
  ProjectionParams() = default;
  ProjectionParams(const std::string& prefix, std::size_t feature_dim, std::size_t num_tags);

  ParamTensor W;  // T × feature
  ParamTensor b;  // T × 1

  std::size_t num_tags() const { return W.value.rows(); }
  std::size_t feature_dim() const { return W.value.cols(); }

  void init(SeededRng& rng);
  ParamRefs refs() { return {&W, &b}; }
};

// Row i = W·feats_i + b. Raw scores, no normalization.
Matrix emission_scores(const ProjectionParams& pp, const std::vector<Vector>& feats);

// Accumulates dW and db, returns d/dfeats.
std::vector<Vector> emission_backward(ProjectionParams& pp, const std::vector<Vector>& feats,
                                      const Matrix& d_emissions);

}  // namespace stagger
