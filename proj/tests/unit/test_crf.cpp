#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "stagger/crf.hpp"
#include "stagger/error.hpp"
#include "stagger/params.hpp"

using namespace stagger;

namespace {

// Random transitions in the production layout, with the boundary rows masked.
Matrix random_transitions(std::size_t T, SeededRng& rng) {
  Matrix a = oracle::random_matrix(T + 2, T + 2, rng);
  apply_transition_mask(a, transition_frozen_mask(T, false));
  return a;
}

}  // namespace

TEST_CASE("transition layout") {
  Matrix a = make_transitions(3);
  CHECK(a.rows() == 5);
  CHECK(a.cols() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(a(k, crf_start(3)) == kForbidden);
    CHECK(a(crf_stop(3), k) == kForbidden);
  }
  CHECK(a(crf_start(3), 0) == 0.0);
  CHECK(a(1, crf_stop(3)) == 0.0);

  auto plain = transition_frozen_mask(3, false);
  auto bio = transition_frozen_mask(3, true);
  std::size_t n_plain = 0, n_bio = 0;
  for (bool b : plain) n_plain += b;
  for (bool b : bio) n_bio += b;
  CHECK(n_bio == n_plain + 2);
  CHECK(bio[2 * 5 + 1]);               // O -> I
  CHECK(bio[crf_start(3) * 5 + 1]);    // START -> I
  CHECK_FALSE(plain[2 * 5 + 1]);
}

TEST_CASE("path_score") {
  Matrix zeros(4, 4);
  CHECK(path_score(Matrix::from_rows({{1, 3}}), zeros, {1}) == 3.0);

  Matrix a(4, 4);
  a(2, 1) = 0.1;  // START -> 1
  a(1, 0) = 0.2;
  a(0, 3) = 0.3;  // 0 -> STOP
  Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(path_score(m, a, {1, 0}) == doctest::Approx(5.6).epsilon(1e-15));

  CHECK_THROWS_AS(path_score(m, a, {1}), DimensionError);
  CHECK_THROWS_AS(path_score(m, a, {1, 2}), RangeError);
  CHECK_THROWS_AS(path_score(m, Matrix(3, 3), {1, 0}), DimensionError);
}

TEST_CASE("log_partition") {
  Matrix zeros(4, 4);
  CHECK(log_partition(Matrix::from_rows({{0, 0}}), zeros) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_partition(Matrix::from_rows({{1, 3}}), zeros) ==
        doctest::Approx(std::log(std::exp(1.0) + std::exp(3.0))).epsilon(1e-15));

  SeededRng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = oracle::random_matrix(5, 4, rng);
    Matrix a = random_transitions(4, rng);
    CHECK(std::abs(log_partition(m, a) - oracle::enumerate(m, a).log_z) <= 1e-9);
  }
  CHECK_THROWS_AS(log_partition(Matrix(0, 3), make_transitions(3)), DimensionError);
  Matrix bad = Matrix::from_rows({{0, NAN}});
  CHECK_THROWS_AS(log_partition(bad, zeros), DomainError);
}

TEST_CASE("marginals are posteriors") {
  SeededRng rng(22);
  Matrix m = oracle::random_matrix(4, 3, rng);
  Matrix a = random_transitions(3, rng);
  CrfMarginals mg = crf_marginals(m, a);
  auto e = oracle::enumerate(m, a);
  Matrix unary(4, 3);
  std::size_t idx = 0;
  oracle::for_each_path(4, 3, [&](const std::vector<std::size_t>& y) {
    const double p = std::exp(e.all_scores[idx++] - e.log_z);
    for (std::size_t i = 0; i < 4; ++i) unary(i, y[i]) += p;
  });
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0;
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(std::abs(mg.unary(i, t) - unary(i, t)) <= 1e-12);
      s += mg.unary(i, t);
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  // n tokens produce n + 1 transitions counting both boundaries
  double total = 0;
  for (double v : mg.transitions.data()) total += v;
  CHECK(std::abs(total - 5.0) <= 1e-12);
}

TEST_CASE("nll_loss") {
  Matrix peaked = Matrix::from_rows({{50, -50, -50}, {-50, 50, -50}});
  CrfLoss sat = nll_loss(peaked, Matrix(5, 5), {0, 1});
  CHECK(sat.loss >= 0.0);
  CHECK(sat.loss < 1e-6);
  for (double v : sat.d_emissions.data()) CHECK(std::abs(v) < 1e-6);

  CrfLoss u = nll_loss(Matrix(1, 3), Matrix(5, 5), {0});
  CHECK(u.loss == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(u.d_emissions(0, 0) == doctest::Approx(1.0 / 3 - 1).epsilon(1e-14));
  CHECK(u.d_emissions(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(u.d_emissions(0, 2) == doctest::Approx(1.0 / 3).epsilon(1e-14));

  SeededRng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng.below(5), T = 2 + rng.below(3);
    ParamTensor M("M", n, T), A("A", T + 2, T + 2);
    M.value = oracle::random_matrix(n, T, rng);
    A.value = random_transitions(T, rng);
    A.frozen = transition_frozen_mask(T, false);
    TagPath gold(n);
    for (auto& g : gold) g = rng.below(T);
    CrfLoss l = nll_loss(M.value, A.value, gold);
    CHECK(l.loss >= 0.0);
    auto num = finite_diff_grad([&] { return nll_loss(M.value, A.value, gold).loss; }, {&M, &A});
    CHECK(compare_gradients({&M, &A}, {l.d_emissions, l.d_transitions}, num).max_relative_error <=
          1e-4);
  }
}

TEST_CASE("viterbi") {
  SeededRng rng(24);
  Matrix zeros(6, 6);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = oracle::random_matrix(5, 4, rng);
    auto v = viterbi(m, zeros);
    for (std::size_t i = 0; i < 5; ++i) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < 4; ++t)
        if (m(i, t) > m(i, best)) best = t;
      CHECK(v.path[i] == best);
    }
  }

  Matrix a(4, 4);
  a(0, 1) = 5;
  auto v = viterbi(Matrix(2, 2), a);
  CHECK(v.path == TagPath{0, 1});
  CHECK(v.score == 5.0);

  // ties fall to the lowest tag
  CHECK(viterbi(Matrix(3, 3), Matrix(5, 5)).path == TagPath{0, 0, 0});

  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = oracle::random_matrix(6, 5, rng);
    Matrix t = random_transitions(5, rng);
    auto got = viterbi(m, t);
    auto e = oracle::enumerate(m, t);
    CHECK(std::abs(got.score - e.best_score) <= 1e-9);
    CHECK(got.score == path_score(m, t, got.path));

    // shifting all emissions leaves the path unchanged
    Matrix shifted = m;
    for (double& x : shifted.data()) x += 3.5;
    auto s = viterbi(shifted, t);
    CHECK(s.path == got.path);
    CHECK(s.score == doctest::Approx(got.score + 6 * 3.5).epsilon(1e-12));
  }
}

TEST_CASE("per-token decoding and loss") {
  CHECK(tag_sequence_no_crf(Matrix::from_rows({{1, 3}})) == TagPath{1});
  CHECK(tag_sequence_no_crf(Matrix::from_rows({{2, 2}})) == TagPath{0});

  TokenLoss u = token_softmax_loss(Matrix(1, 3), {2});
  CHECK(u.loss == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  SeededRng rng(25);
  ParamTensor M("M", 4, 3);
  M.value = oracle::random_matrix(4, 3, rng);
  TagPath gold{2, 0, 1, 1};
  TokenLoss l = token_softmax_loss(M.value, gold);
  auto num = finite_diff_grad([&] { return token_softmax_loss(M.value, gold).loss; }, {&M});
  CHECK(compare_gradients({&M}, {l.d_emissions}, num).max_relative_error <= 1e-6);
}
