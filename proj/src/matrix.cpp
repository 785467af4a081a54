#include "stagger/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "stagger/error.hpp"

namespace stagger {

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw DimensionError("ragged rows: row 0 has " + std::to_string(m.cols()) +
                           " columns, row " + std::to_string(r) + " has " +
                           std::to_string(rows[r].size()));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Matrix::shape_string() const { return stagger::shape_string(rows_, cols_); }

std::string shape_string(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

Vector affine(const Matrix& w, std::span<const double> x, std::span<const double> b) {
  if (w.cols() != x.size() || w.rows() != b.size()) {
    throw DimensionError("affine: W is " + w.shape_string() + ", x has length " +
                         std::to_string(x.size()) + ", b has length " +
                         std::to_string(b.size()));
  }
  Vector y(b.begin(), b.end());
  matvec_accumulate(w, x, y);
  return y;
}

void matvec_accumulate(const Matrix& w, std::span<const double> x, std::span<double> y) {
  if (w.cols() != x.size() || w.rows() != y.size()) {
    throw DimensionError("matvec: W is " + w.shape_string() + ", x has length " +
                         std::to_string(x.size()) + ", y has length " +
                         std::to_string(y.size()));
  }
  const std::size_t cols = w.cols();
  const double* p = w.data().data();
  for (std::size_t r = 0; r < w.rows(); ++r, p += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += p[c] * x[c];
    y[r] += acc;
  }
}

void matvec_transposed_accumulate(const Matrix& w, std::span<const double> x,
                                  std::span<double> y) {
  if (w.rows() != x.size() || w.cols() != y.size()) {
    throw DimensionError("matvec_t: W is " + w.shape_string() + ", x has length " +
                         std::to_string(x.size()) + ", y has length " +
                         std::to_string(y.size()));
  }
  const std::size_t cols = w.cols();
  const double* p = w.data().data();
  double* out = y.data();
  for (std::size_t r = 0; r < w.rows(); ++r, p += cols) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) out[c] += p[c] * xr;
  }
}

void outer_accumulate(Matrix& w, std::span<const double> a, std::span<const double> b) {
  if (w.rows() != a.size() || w.cols() != b.size()) {
    throw DimensionError("outer: W is " + w.shape_string() + ", a has length " +
                         std::to_string(a.size()) + ", b has length " +
                         std::to_string(b.size()));
  }
  const std::size_t cols = w.cols();
  double* p = w.data().data();
  const double* bp = b.data();
  for (std::size_t r = 0; r < w.rows(); ++r, p += cols) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) p[c] += ar * bp[c];
  }
}

double sigmoid(double x) {
  // Branches keep exp() from overflowing for large |x|.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(std::span<const double> x) {
  Vector y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return sigmoid(v); });
  return y;
}

Vector tanh(std::span<const double> x) {
  Vector y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::tanh(v); });
  return y;
}

Vector hadamard(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("hadamard: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  Vector y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] * b[i];
  return y;
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("log_sum_exp of an empty vector");
  const double m = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

Vector softmax(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("softmax of an empty vector");
  const double m = *std::max_element(xs.begin(), xs.end());
  Vector p(xs.size());
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    p[i] = std::exp(xs[i] - m);
    s += p[i];
  }
  for (double& v : p) v /= s;
  return p;
}

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace stagger
