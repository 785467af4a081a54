#include "stagger/projection.hpp"

#include "stagger/error.hpp"

namespace stagger {

ProjectionParams::ProjectionParams(const std::string& prefix, std::size_t feature_dim,
                                   std::size_t num_tags)
    : W(prefix + ".W", num_tags, feature_dim), b(prefix + ".b", num_tags, 1) {}

void ProjectionParams::init(SeededRng& rng) {
  init_uniform_scaled(W.value, rng);
  b.value.fill(0.0);
}

Matrix emission_scores(const ProjectionParams& pp, const std::vector<Vector>& feats) {
  Matrix m(feats.size(), pp.num_tags());
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (feats[i].size() != pp.feature_dim()) {
      throw DimensionError("emission_scores: projection is " + pp.W.value.shape_string() +
                           ", feature " + std::to_string(i) + " has length " +
                           std::to_string(feats[i].size()));
    }
    Vector row = affine(pp.W.value, feats[i], pp.b.value.data());
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return m;
}

std::vector<Vector> emission_backward(ProjectionParams& pp, const std::vector<Vector>& feats,
                                      const Matrix& d_emissions) {
  if (d_emissions.rows() != feats.size() || d_emissions.cols() != pp.num_tags()) {
    throw DimensionError("emission_backward: gradient is " + d_emissions.shape_string() +
                         ", expected " + shape_string(feats.size(), pp.num_tags()));
  }
  std::vector<Vector> dfeats(feats.size(), Vector(pp.feature_dim(), 0.0));
  auto& db = pp.b.grad.data();
  for (std::size_t i = 0; i < feats.size(); ++i) {
    auto drow = d_emissions.row(i);
    outer_accumulate(pp.W.grad, drow, feats[i]);
    for (std::size_t t = 0; t < drow.size(); ++t) db[t] += drow[t];
    matvec_transposed_accumulate(pp.W.value, drow, dfeats[i]);
  }
  return dfeats;
}

}  // namespace stagger
