#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stagger/params.hpp"

namespace stagger {

// Peephole LSTM cell parameters. Peepholes (w_c*) are diagonal, stored as
// hidden×1 column tensors like the biases.
struct LstmParams {
  LstmParams() = default;
  LstmParams(const std::string& prefix, std::size_t input_size, std::size_t hidden_size);

  ParamTensor W_xi, W_xf, W_xc, W_xo;
  ParamTensor W_hi, W_hf, W_hc, W_ho;
  ParamTensor w_ci, w_cf, w_co;
  ParamTensor b_i, b_f, b_c, b_o;

  std::size_t input_size() const { return W_xi.value.cols(); }
  std::size_t hidden_size() const { return W_xi.value.rows(); }

  // Scaled-uniform weights and peepholes, zero biases except b_f = 1.
  void init(SeededRng& rng);
  ParamRefs refs();
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(std::size_t hidden) { return {Vector(hidden, 0.0), Vector(hidden, 0.0)}; }
};

// Activations of one step, kept for the reverse pass.
struct LstmStepCache {
  Vector x, h_prev, c_prev;
  Vector i, f, g, o;  // g is the tanh candidate
  Vector c, tanh_c;
};

// One step:
//   i = σ(W_xi x + W_hi h' + w_ci ⊙ c' + b_i)
//   f = σ(W_xf x + W_hf h' + w_cf ⊙ c' + b_f)
//   c = f ⊙ c' + i ⊙ tanh(W_xc x + W_hc h' + b_c)
//   o = σ(W_xo x + W_ho h' + w_co ⊙ c' + b_o)
//   h = o ⊙ tanh(c)
// The output-gate peephole reads the previous cell state c'.
LstmState lstm_step(const LstmParams& p, std::span<const double> x, const LstmState& prev,
                    LstmStepCache* cache = nullptr);

struct LstmStepGrad {
  Vector dx, dh_prev, dc_prev;
};

// Reverse of lstm_step. `dh` and `dc` are the total gradients arriving at h
// and c of this step; parameter gradients are accumulated into `p`.
LstmStepGrad lstm_step_backward(LstmParams& p, const LstmStepCache& cache,
                                std::span<const double> dh, std::span<const double> dc);

struct BiLstmCache {
  std::vector<LstmStepCache> fwd;  // indexed by position
  std::vector<LstmStepCache> bwd;  // indexed by position
};

// h_t = [h_t^fwd ; h_t^bwd], both directions from zero states.
std::vector<Vector> bilstm_encode(const LstmParams& fwd, const LstmParams& bwd,
                                  const std::vector<Vector>& xs, BiLstmCache* cache = nullptr);

// Returns d/dx for every input position.
std::vector<Vector> bilstm_backward(LstmParams& fwd, LstmParams& bwd, const BiLstmCache& cache,
                                    const std::vector<Vector>& dout);

}  // namespace stagger
