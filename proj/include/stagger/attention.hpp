#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stagger/params.hpp"

namespace stagger {

// Additive self-attention over encoder states:
//   e_ij = vᵀ tanh(W_q h_i + W_k h_j)
//   a_i· = softmax_j(e_i·)
//   c_i  = Σ_j a_ij h_j
//   out_i = W_m [h_i ; c_i]
struct AttentionParams {
  AttentionParams() = default;
  AttentionParams(const std::string& prefix, std::size_t input_dim, std::size_t attn_dim,
                  std::size_t output_dim);

  ParamTensor W_q;  // attn × input
  ParamTensor W_k;  // attn × input
  ParamTensor v;    // attn × 1
  ParamTensor W_m;  // output × 2·input

  std::size_t input_dim() const { return W_q.value.cols(); }
  std::size_t attn_dim() const { return W_q.value.rows(); }
  std::size_t output_dim() const { return W_m.value.rows(); }

  void init(SeededRng& rng);
  ParamRefs refs() { return {&W_q, &W_k, &v, &W_m}; }
};

struct AttentionCache {
  std::vector<Vector> inputs;        // h_j
  std::vector<Vector> tanh_scores;   // n·n entries of tanh(W_q h_i + W_k h_j), row-major
  std::vector<Vector> mixed;         // [h_i ; c_i]
  Matrix weights;                    // a_ij
};

struct AttentionOutput {
  std::vector<Vector> outputs;
  Matrix weights;  // n × n, row i sums to 1
};

AttentionOutput attention(const AttentionParams& ap, const std::vector<Vector>& h,
                          AttentionCache* cache = nullptr);

// Returns d/dh for every position; accumulates parameter gradients.
std::vector<Vector> attention_backward(AttentionParams& ap, const AttentionCache& cache,
                                       const std::vector<Vector>& dout);

}  // namespace stagger
