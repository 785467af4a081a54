#include "stagger/attention.hpp"

#include <cmath>

#include "stagger/error.hpp"

namespace stagger {

AttentionParams::AttentionParams(const std::string& prefix, std::size_t input_dim,
                                 std::size_t attn_dim, std::size_t output_dim)
    : W_q(prefix + ".W_q", attn_dim, input_dim),
      W_k(prefix + ".W_k", attn_dim, input_dim),
      v(prefix + ".v", attn_dim, 1),
      W_m(prefix + ".W_m", output_dim, 2 * input_dim) {}

void AttentionParams::init(SeededRng& rng) {
  for (ParamTensor* p : {&W_q, &W_k, &v, &W_m}) init_uniform_scaled(p->value, rng);
}

AttentionOutput attention(const AttentionParams& ap, const std::vector<Vector>& h,
                          AttentionCache* cache) {
  const std::size_t n = h.size();
  if (n == 0) throw DomainError("attention over an empty sequence");
  const std::size_t d = ap.input_dim(), a = ap.attn_dim();
  for (const auto& x : h) {
    if (x.size() != d) {
      throw DimensionError("attention: expected inputs of length " + std::to_string(d) +
                           ", got " + std::to_string(x.size()));
    }
  }
  std::vector<Vector> q(n, Vector(a, 0.0)), k(n, Vector(a, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    matvec_accumulate(ap.W_q.value, h[i], q[i]);
    matvec_accumulate(ap.W_k.value, h[i], k[i]);
  }
  const auto& v = ap.v.value.data();

  AttentionOutput out;
  out.weights = Matrix(n, n);
  out.outputs.resize(n);
  std::vector<Vector> tanh_scores;
  std::vector<Vector> mixed(n);
  if (cache) tanh_scores.resize(n * n);
  Vector scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Vector t(a);
      double e = 0.0;
      for (std::size_t r = 0; r < a; ++r) {
        t[r] = std::tanh(q[i][r] + k[j][r]);
        e += v[r] * t[r];
      }
      scores[j] = e;
      if (cache) tanh_scores[i * n + j] = std::move(t);
    }
    Vector w = softmax(scores);
    std::copy(w.begin(), w.end(), out.weights.row(i).begin());
    Vector m(2 * d, 0.0);
    std::copy(h[i].begin(), h[i].end(), m.begin());
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t r = 0; r < d; ++r) m[d + r] += w[j] * h[j][r];
    }
    out.outputs[i] = Vector(ap.output_dim(), 0.0);
    matvec_accumulate(ap.W_m.value, m, out.outputs[i]);
    mixed[i] = std::move(m);
  }
  if (cache) {
    cache->inputs = h;
    cache->tanh_scores = std::move(tanh_scores);
    cache->mixed = std::move(mixed);
    cache->weights = out.weights;
  }
  return out;
}

std::vector<Vector> attention_backward(AttentionParams& ap, const AttentionCache& cache,
                                       const std::vector<Vector>& dout) {
  const std::size_t n = cache.inputs.size();
  if (dout.size() != n) {
    throw DimensionError("attention_backward: cache holds " + std::to_string(n) +
                         " positions, gradient has " + std::to_string(dout.size()));
  }
  const std::size_t d = ap.input_dim(), a = ap.attn_dim();
  const auto& h = cache.inputs;
  const auto& v = ap.v.value.data();
  auto& dv = ap.v.grad.data();

  std::vector<Vector> dh(n, Vector(d, 0.0));
  std::vector<Vector> dq(n, Vector(a, 0.0)), dk(n, Vector(a, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    outer_accumulate(ap.W_m.grad, dout[i], cache.mixed[i]);
    Vector dm(2 * d, 0.0);
    matvec_transposed_accumulate(ap.W_m.value, dout[i], dm);
    for (std::size_t r = 0; r < d; ++r) dh[i][r] += dm[r];

    // c_i = Σ_j a_ij h_j
    Vector da(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = cache.weights(i, j);
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) {
        dot += dm[d + r] * h[j][r];
        dh[j][r] += w * dm[d + r];
      }
      da[j] = dot;
    }
    // softmax reverse
    double expect = 0.0;
    for (std::size_t j = 0; j < n; ++j) expect += cache.weights(i, j) * da[j];
    for (std::size_t j = 0; j < n; ++j) {
      const double de = cache.weights(i, j) * (da[j] - expect);
      if (de == 0.0) continue;
      const Vector& t = cache.tanh_scores[i * n + j];
      for (std::size_t r = 0; r < a; ++r) {
        dv[r] += de * t[r];
        const double du = de * v[r] * (1.0 - t[r] * t[r]);
        dq[i][r] += du;
        dk[j][r] += du;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    outer_accumulate(ap.W_q.grad, dq[i], h[i]);
    outer_accumulate(ap.W_k.grad, dk[i], h[i]);
    matvec_transposed_accumulate(ap.W_q.value, dq[i], dh[i]);
    matvec_transposed_accumulate(ap.W_k.value, dk[i], dh[i]);
  }
  return dh;
}

}  // namespace stagger
