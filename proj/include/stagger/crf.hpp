#pragma once

#include <cstddef>
#include <vector>

#include "stagger/matrix.hpp"

namespace stagger {

// Linear-chain CRF over T tags. The transition matrix is (T+2)×(T+2): rows
// and columns 0..T-1 are tags, T is START and T+1 is STOP. Transitions into
// START and out of STOP hold kForbidden and never learn.
inline constexpr double kForbidden = -1e9;

using TagPath = std::vector<std::size_t>;

inline std::size_t crf_start(std::size_t num_tags) { return num_tags; }
inline std::size_t crf_stop(std::size_t num_tags) { return num_tags + 1; }

// Zero transitions with the boundary entries forbidden.
Matrix make_transitions(std::size_t num_tags);

// Entries excluded from learning. With `constrain_bio` (tag ids B=0, I=1,
// O=2) the O→I and START→I transitions are forbidden as well.
std::vector<bool> transition_frozen_mask(std::size_t num_tags, bool constrain_bio);

// Sets every frozen entry to kForbidden.
void apply_transition_mask(Matrix& transitions, const std::vector<bool>& frozen);

// A[START][y1] + Σ A[y_i][y_i+1] + A[y_n][STOP] + Σ M[i][y_i].
double path_score(const Matrix& emissions, const Matrix& transitions, const TagPath& path);

// log Σ_y exp(path_score(y)) by the forward recursion.
double log_partition(const Matrix& emissions, const Matrix& transitions);

struct CrfMarginals {
  double log_z = 0.0;
  Matrix unary;        // n × T posterior tag marginals
  Matrix transitions;  // (T+2)² expected transition counts, boundaries included
};

// Forward-backward in log space.
CrfMarginals crf_marginals(const Matrix& emissions, const Matrix& transitions);

struct CrfLoss {
  double loss = 0.0;
  Matrix d_emissions;
  Matrix d_transitions;
};

// Negative log-likelihood log Z − s(gold) with its exact gradients:
// dM = posterior marginals − gold indicators, dA = expected − observed
// transition counts.
CrfLoss nll_loss(const Matrix& emissions, const Matrix& transitions, const TagPath& gold);

struct ViterbiResult {
  TagPath path;
  double score = 0.0;  // path_score(path)
};

// Highest-scoring path; ties go to the lowest tag id.
ViterbiResult viterbi(const Matrix& emissions, const Matrix& transitions);

// Per-position argmax of the emission rows, lowest id on ties.
TagPath tag_sequence_no_crf(const Matrix& emissions);

struct TokenLoss {
  double loss = 0.0;
  Matrix d_emissions;
};

// Σ_i cross-entropy(softmax(M_i), gold_i) and its gradient softmax − onehot.
TokenLoss token_softmax_loss(const Matrix& emissions, const TagPath& gold);

}  // namespace stagger
