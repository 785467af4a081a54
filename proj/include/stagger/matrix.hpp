#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stagger {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  // Builds a matrix from nested rows; all rows must have equal length.
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v);
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// W·x + b.
Vector affine(const Matrix& w, std::span<const double> x, std::span<const double> b);

// y += W·x.
void matvec_accumulate(const Matrix& w, std::span<const double> x, std::span<double> y);

// y += Wᵀ·x.
void matvec_transposed_accumulate(const Matrix& w, std::span<const double> x,
                                  std::span<double> y);

// W += a·bᵀ.
void outer_accumulate(Matrix& w, std::span<const double> a, std::span<const double> b);

Vector sigmoid(std::span<const double> x);
Vector tanh(std::span<const double> x);
Vector hadamard(std::span<const double> a, std::span<const double> b);

double sigmoid(double x);

// log Σ exp(xs[i]) with a max shift; throws DomainError on empty input.
double log_sum_exp(std::span<const double> xs);

// Numerically stable softmax.
Vector softmax(std::span<const double> xs);

bool all_finite(std::span<const double> xs);

// "2x3" style shape for error messages.
std::string shape_string(std::size_t rows, std::size_t cols);

}  // namespace stagger
