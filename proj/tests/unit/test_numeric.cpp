#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "../oracles.hpp"
#include "stagger/crf.hpp"
#include "stagger/error.hpp"
#include "stagger/matrix.hpp"
#include "stagger/params.hpp"
#include "stagger/rng.hpp"

using namespace stagger;

TEST_CASE("affine on the worked cases") {
  Matrix eye = Matrix::from_rows({{1, 0}, {0, 1}});
  CHECK(affine(eye, Vector{3, 4}, Vector{0, 0}) == Vector{3, 4});

  Matrix zero(2, 2);
  CHECK(affine(zero, Vector{9, -7}, Vector{1, -1}) == Vector{1, -1});

  Matrix w = Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(affine(w, Vector{1, 1}, Vector{0.5, 0.5}) == Vector{3.5, 7.5});
}

TEST_CASE("affine rejects mismatched shapes and names them") {
  Matrix w(2, 3);
  try {
    affine(w, Vector{1, 2}, Vector{0, 0});
    FAIL("expected a DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
  }
  CHECK_THROWS_AS(affine(w, Vector{1, 2, 3}, Vector{0}), DimensionError);
}

TEST_CASE("affine agrees with a direct summation") {
  SeededRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix w = oracle::random_matrix(4, 6, rng);
    Vector x = oracle::random_vector(6, rng), b = oracle::random_vector(4, rng);
    Vector got = affine(w, x, b), want = oracle::affine(w, x, b);
    for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("elementwise nonlinearities") {
  CHECK(sigmoid(Vector{0.0}) == Vector{0.5});
  CHECK(stagger::tanh(Vector{0.0}) == Vector{0.0});
  CHECK(hadamard(Vector{2, 3}, Vector{4, 5}) == Vector{8, 15});
  CHECK_THROWS_AS(hadamard(Vector{1}, Vector{1, 2}), DimensionError);

  // stays finite and saturates cleanly at the extremes
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(-800.0) < 1e-300);
  CHECK(sigmoid(800.0) == 1.0);
  for (double z : {-30.0, -1.0, 0.3, 12.0}) {
    CHECK(sigmoid(z) == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-14));
  }
}

TEST_CASE("log_sum_exp") {
  CHECK(log_sum_exp(Vector{-3.25}) == -3.25);
  CHECK(log_sum_exp(Vector{0, 0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const double big = log_sum_exp(Vector{1000, 1000});
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(1000 + std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(log_sum_exp(Vector{}), DomainError);

  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_sum_exp(Vector{ninf, 0.0}) == 0.0);

  SeededRng rng(5);
  for (int t = 0; t < 50; ++t) {
    Vector xs = oracle::random_vector(1 + rng.below(8), rng, -5, 5);
    double direct = 0.0;
    for (double x : xs) direct += std::exp(x);
    CHECK(log_sum_exp(xs) == doctest::Approx(std::log(direct)).epsilon(1e-13));
    // shifting every input shifts the result by the same amount
    Vector shifted = xs;
    for (double& x : shifted) x += 700.0;
    CHECK(log_sum_exp(shifted) == doctest::Approx(log_sum_exp(xs) + 700.0).epsilon(1e-13));
  }
}

TEST_CASE("softmax sums to one") {
  Vector p = softmax(Vector{1, 2, 3, 1000});
  double s = 0;
  for (double v : p) {
    CHECK(v >= 0.0);
    s += v;
  }
  CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("seeded rng is reproducible and streams differ") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  SeededRng s1 = SeededRng::derive(42, 1), s2 = SeededRng::derive(42, 2);
  CHECK(s1.next_u64() != s2.next_u64());

  SeededRng r(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = r.below(7);
    CHECK(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);

  std::vector<int> v{1, 2, 3, 4, 5, 6}, w = v;
  SeededRng r1(9), r2(9);
  r1.shuffle(v);
  r2.shuffle(w);
  CHECK(v == w);
  std::multiset<int> ms(v.begin(), v.end());
  CHECK(ms == std::multiset<int>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("finite differences") {
  ParamTensor theta("theta", 1, 1);
  theta.value(0, 0) = 3.0;
  auto g = finite_diff_grad([&] { return theta.value(0, 0) * theta.value(0, 0); }, {&theta});
  CHECK(std::abs(g[0](0, 0) - 6.0) < 1e-6);
  // the parameter is restored afterwards
  CHECK(theta.value(0, 0) == 3.0);

  ParamTensor q("q", 2, 3);
  auto zero = finite_diff_grad([] { return 4.0; }, {&q});
  for (double v : zero[0].data()) CHECK(v == 0.0);

  CHECK_THROWS_AS(
      finite_diff_grad([] { return std::numeric_limits<double>::quiet_NaN(); }, {&theta}),
      NumericError);
}

TEST_CASE("finite differences match the CRF loss gradient") {
  SeededRng rng(77);
  const std::size_t n = 3, T = 3;
  ParamTensor M("M", n, T), A("A", T + 2, T + 2);
  M.value = oracle::random_matrix(n, T, rng);
  A.value = oracle::random_matrix(T + 2, T + 2, rng);
  TagPath gold{0, 2, 1};
  auto numeric = finite_diff_grad([&] { return nll_loss(M.value, A.value, gold).loss; },
                                  {&M, &A});
  CrfLoss l = nll_loss(M.value, A.value, gold);
  auto r = compare_gradients({&M, &A}, {l.d_emissions, l.d_transitions}, numeric);
  CHECK(r.max_relative_error <= 1e-4);
}

TEST_CASE("relative error uses the floor") {
  CHECK(relative_error(1.0, 1.0) == 0.0);
  CHECK(relative_error(2.0, 1.0) == doctest::Approx(0.5));
  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1e-9, 0.0) == doctest::Approx(1e-3));
}
