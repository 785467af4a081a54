#include "stagger/crf.hpp"

#include <cmath>

#include "stagger/error.hpp"

namespace stagger {
namespace {

void check_shapes(const Matrix& m, const Matrix& a) {
  const std::size_t t = m.cols();
  if (a.rows() != t + 2 || a.cols() != t + 2) {
    throw DimensionError("CRF: emissions are " + m.shape_string() + ", transitions are " +
                         a.shape_string() + ", expected " + shape_string(t + 2, t + 2));
  }
  if (m.rows() == 0 || t == 0) throw DimensionError("CRF: empty emission matrix");
  if (!all_finite(m.data())) throw DomainError("CRF: non-finite emission score");
}

void check_path(const Matrix& m, const TagPath& path) {
  if (path.size() != m.rows()) {
    throw DimensionError("CRF: path of length " + std::to_string(path.size()) + " for " +
                         std::to_string(m.rows()) + " positions");
  }
  for (std::size_t y : path) {
    if (y >= m.cols()) {
      throw RangeError("CRF: tag id " + std::to_string(y) + " outside [0, " +
                       std::to_string(m.cols()) + ")");
    }
  }
}

// alpha[t][j]: log-sum of all prefixes ending in tag j at t.
Matrix forward_table(const Matrix& m, const Matrix& a) {
  const std::size_t n = m.rows(), t_count = m.cols(), start = crf_start(t_count);
  Matrix alpha(n, t_count);
  for (std::size_t j = 0; j < t_count; ++j) alpha(0, j) = a(start, j) + m(0, j);
  Vector terms(t_count);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < t_count; ++j) {
      for (std::size_t k = 0; k < t_count; ++k) terms[k] = alpha(t - 1, k) + a(k, j);
      alpha(t, j) = m(t, j) + log_sum_exp(terms);
    }
  }
  return alpha;
}

// beta[t][k]: log-sum of all suffixes after tag k at t, STOP included.
Matrix backward_table(const Matrix& m, const Matrix& a) {
  const std::size_t n = m.rows(), t_count = m.cols(), stop = crf_stop(t_count);
  Matrix beta(n, t_count);
  for (std::size_t k = 0; k < t_count; ++k) beta(n - 1, k) = a(k, stop);
  Vector terms(t_count);
  for (std::size_t t = n - 1; t-- > 0;) {
    for (std::size_t k = 0; k < t_count; ++k) {
      for (std::size_t j = 0; j < t_count; ++j) terms[j] = a(k, j) + m(t + 1, j) + beta(t + 1, j);
      beta(t, k) = log_sum_exp(terms);
    }
  }
  return beta;
}

double log_z_from_alpha(const Matrix& alpha, const Matrix& a) {
  const std::size_t n = alpha.rows(), t_count = alpha.cols(), stop = crf_stop(t_count);
  Vector terms(t_count);
  for (std::size_t j = 0; j < t_count; ++j) terms[j] = alpha(n - 1, j) + a(j, stop);
  return log_sum_exp(terms);
}

}  // namespace

Matrix make_transitions(std::size_t num_tags) {
  Matrix a(num_tags + 2, num_tags + 2, 0.0);
  apply_transition_mask(a, transition_frozen_mask(num_tags, false));
  return a;
}

std::vector<bool> transition_frozen_mask(std::size_t num_tags, bool constrain_bio) {
  const std::size_t size = num_tags + 2, start = crf_start(num_tags), stop = crf_stop(num_tags);
  std::vector<bool> frozen(size * size, false);
  for (std::size_t k = 0; k < size; ++k) {
    frozen[k * size + start] = true;  // into START
    frozen[stop * size + k] = true;   // out of STOP
  }
  if (constrain_bio) {
    if (num_tags != 3) throw ConfigError("BIO constraints need exactly 3 tags");
    constexpr std::size_t kI = 1, kO = 2;
    frozen[kO * size + kI] = true;
    frozen[start * size + kI] = true;
  }
  return frozen;
}

void apply_transition_mask(Matrix& transitions, const std::vector<bool>& frozen) {
  if (frozen.size() != transitions.size()) {
    throw DimensionError("transition mask has " + std::to_string(frozen.size()) +
                         " entries for a " + transitions.shape_string() + " matrix");
  }
  for (std::size_t i = 0; i < frozen.size(); ++i) {
    if (frozen[i]) transitions.data()[i] = kForbidden;
  }
}

double path_score(const Matrix& m, const Matrix& a, const TagPath& path) {
  check_shapes(m, a);
  check_path(m, path);
  const std::size_t t_count = m.cols();
  double s = a(crf_start(t_count), path.front());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) s += a(path[i], path[i + 1]);
  s += a(path.back(), crf_stop(t_count));
  for (std::size_t i = 0; i < path.size(); ++i) s += m(i, path[i]);
  return s;
}

double log_partition(const Matrix& m, const Matrix& a) {
  check_shapes(m, a);
  return log_z_from_alpha(forward_table(m, a), a);
}

CrfMarginals crf_marginals(const Matrix& m, const Matrix& a) {
  check_shapes(m, a);
  const std::size_t n = m.rows(), t_count = m.cols();
  const std::size_t start = crf_start(t_count), stop = crf_stop(t_count);
  const Matrix alpha = forward_table(m, a);
  const Matrix beta = backward_table(m, a);
  CrfMarginals out;
  out.log_z = log_z_from_alpha(alpha, a);
  out.unary = Matrix(n, t_count);
  out.transitions = Matrix(t_count + 2, t_count + 2);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < t_count; ++j) {
      out.unary(t, j) = std::exp(alpha(t, j) + beta(t, j) - out.log_z);
    }
  }
  for (std::size_t j = 0; j < t_count; ++j) {
    out.transitions(start, j) = out.unary(0, j);
    out.transitions(j, stop) = out.unary(n - 1, j);
  }
  for (std::size_t t = 0; t + 1 < n; ++t) {
    for (std::size_t k = 0; k < t_count; ++k) {
      for (std::size_t j = 0; j < t_count; ++j) {
        out.transitions(k, j) +=
            std::exp(alpha(t, k) + a(k, j) + m(t + 1, j) + beta(t + 1, j) - out.log_z);
      }
    }
  }
  return out;
}

CrfLoss nll_loss(const Matrix& m, const Matrix& a, const TagPath& gold) {
  check_shapes(m, a);
  check_path(m, gold);
  const std::size_t t_count = m.cols();
  CrfMarginals marg = crf_marginals(m, a);
  CrfLoss out;
  out.loss = marg.log_z - path_score(m, a, gold);
  out.d_emissions = std::move(marg.unary);
  out.d_transitions = std::move(marg.transitions);
  for (std::size_t i = 0; i < gold.size(); ++i) out.d_emissions(i, gold[i]) -= 1.0;
  out.d_transitions(crf_start(t_count), gold.front()) -= 1.0;
  for (std::size_t i = 0; i + 1 < gold.size(); ++i) out.d_transitions(gold[i], gold[i + 1]) -= 1.0;
  out.d_transitions(gold.back(), crf_stop(t_count)) -= 1.0;
  return out;
}

ViterbiResult viterbi(const Matrix& m, const Matrix& a) {
  check_shapes(m, a);
  const std::size_t n = m.rows(), t_count = m.cols();
  const std::size_t start = crf_start(t_count), stop = crf_stop(t_count);
  Matrix delta(n, t_count);
  std::vector<std::size_t> back(n * t_count, 0);
  for (std::size_t j = 0; j < t_count; ++j) delta(0, j) = a(start, j) + m(0, j);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < t_count; ++j) {
      std::size_t best = 0;
      double best_score = delta(t - 1, 0) + a(0, j);
      for (std::size_t k = 1; k < t_count; ++k) {
        const double s = delta(t - 1, k) + a(k, j);
        if (s > best_score) {
          best_score = s;
          best = k;
        }
      }
      delta(t, j) = best_score + m(t, j);
      back[t * t_count + j] = best;
    }
  }
  std::size_t last = 0;
  double best_final = delta(n - 1, 0) + a(0, stop);
  for (std::size_t j = 1; j < t_count; ++j) {
    const double s = delta(n - 1, j) + a(j, stop);
    if (s > best_final) {
      best_final = s;
      last = j;
    }
  }
  ViterbiResult r;
  r.path.resize(n);
  r.path[n - 1] = last;
  for (std::size_t t = n - 1; t > 0; --t) r.path[t - 1] = back[t * t_count + r.path[t]];
  r.score = path_score(m, a, r.path);
  return r;
}

TagPath tag_sequence_no_crf(const Matrix& m) {
  if (!all_finite(m.data())) throw DomainError("non-finite emission score");
  TagPath path(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[path[i]]) path[i] = j;
    }
  }
  return path;
}

TokenLoss token_softmax_loss(const Matrix& m, const TagPath& gold) {
  check_path(m, gold);
  if (!all_finite(m.data())) throw DomainError("non-finite emission score");
  TokenLoss out;
  out.d_emissions = Matrix(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    out.loss += log_sum_exp(row) - row[gold[i]];
    Vector p = softmax(row);
    std::copy(p.begin(), p.end(), out.d_emissions.row(i).begin());
    out.d_emissions(i, gold[i]) -= 1.0;
  }
  return out;
}

}  // namespace stagger
