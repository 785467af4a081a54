#include "stagger/lstm.hpp"

#include <cmath>

#include "stagger/error.hpp"

namespace stagger {
namespace {

std::span<const double> vec(const ParamTensor& p) { return p.value.data(); }
std::span<double> gvec(ParamTensor& p) { return p.grad.data(); }

// b + Wx·x + Wh·h (+ peep ⊙ c)
Vector preactivation(const ParamTensor& wx, const ParamTensor& wh, const ParamTensor* peep,
                     const ParamTensor& b, std::span<const double> x,
                     std::span<const double> h, std::span<const double> c) {
  Vector a(vec(b).begin(), vec(b).end());
  matvec_accumulate(wx.value, x, a);
  matvec_accumulate(wh.value, h, a);
  if (peep) {
    auto w = vec(*peep);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += w[k] * c[k];
  }
  return a;
}

void accumulate_gate(ParamTensor& wx, ParamTensor& wh, ParamTensor* peep, ParamTensor& b,
                     const Vector& da, const LstmStepCache& cache, Vector& dx, Vector& dh_prev) {
  outer_accumulate(wx.grad, da, cache.x);
  outer_accumulate(wh.grad, da, cache.h_prev);
  auto gb = gvec(b);
  for (std::size_t k = 0; k < da.size(); ++k) gb[k] += da[k];
  if (peep) {
    auto gp = gvec(*peep);
    for (std::size_t k = 0; k < da.size(); ++k) gp[k] += da[k] * cache.c_prev[k];
  }
  matvec_transposed_accumulate(wx.value, da, dx);
  matvec_transposed_accumulate(wh.value, da, dh_prev);
}

}  // namespace

LstmParams::LstmParams(const std::string& prefix, std::size_t in, std::size_t hid)
    : W_xi(prefix + ".W_xi", hid, in),
      W_xf(prefix + ".W_xf", hid, in),
      W_xc(prefix + ".W_xc", hid, in),
      W_xo(prefix + ".W_xo", hid, in),
      W_hi(prefix + ".W_hi", hid, hid),
      W_hf(prefix + ".W_hf", hid, hid),
      W_hc(prefix + ".W_hc", hid, hid),
      W_ho(prefix + ".W_ho", hid, hid),
      w_ci(prefix + ".w_ci", hid, 1),
      w_cf(prefix + ".w_cf", hid, 1),
      w_co(prefix + ".w_co", hid, 1),
      b_i(prefix + ".b_i", hid, 1),
      b_f(prefix + ".b_f", hid, 1),
      b_c(prefix + ".b_c", hid, 1),
      b_o(prefix + ".b_o", hid, 1) {}

void LstmParams::init(SeededRng& rng) {
  for (ParamTensor* w : {&W_xi, &W_xf, &W_xc, &W_xo, &W_hi, &W_hf, &W_hc, &W_ho, &w_ci, &w_cf,
                         &w_co}) {
    init_uniform_scaled(w->value, rng);
  }
  b_i.value.fill(0.0);
  b_f.value.fill(1.0);
  b_c.value.fill(0.0);
  b_o.value.fill(0.0);
}

ParamRefs LstmParams::refs() {
  return {&W_xi, &W_xf, &W_xc, &W_xo, &W_hi, &W_hf, &W_hc, &W_ho,
          &w_ci, &w_cf, &w_co, &b_i,  &b_f,  &b_c,  &b_o};
}

LstmState lstm_step(const LstmParams& p, std::span<const double> x, const LstmState& prev,
                    LstmStepCache* cache) {
  const std::size_t hid = p.hidden_size();
  if (x.size() != p.input_size() || prev.h.size() != hid || prev.c.size() != hid) {
    throw DimensionError("lstm_step: params expect input " + std::to_string(p.input_size()) +
                         " / hidden " + std::to_string(hid) + ", got x of length " +
                         std::to_string(x.size()) + ", h of length " +
                         std::to_string(prev.h.size()) + ", c of length " +
                         std::to_string(prev.c.size()));
  }
  Vector i = preactivation(p.W_xi, p.W_hi, &p.w_ci, p.b_i, x, prev.h, prev.c);
  Vector f = preactivation(p.W_xf, p.W_hf, &p.w_cf, p.b_f, x, prev.h, prev.c);
  Vector g = preactivation(p.W_xc, p.W_hc, nullptr, p.b_c, x, prev.h, prev.c);
  Vector o = preactivation(p.W_xo, p.W_ho, &p.w_co, p.b_o, x, prev.h, prev.c);
  LstmState next{Vector(hid), Vector(hid)};
  Vector tanh_c(hid);
  for (std::size_t k = 0; k < hid; ++k) {
    i[k] = sigmoid(i[k]);
    f[k] = sigmoid(f[k]);
    g[k] = std::tanh(g[k]);
    o[k] = sigmoid(o[k]);
    next.c[k] = f[k] * prev.c[k] + i[k] * g[k];
    tanh_c[k] = std::tanh(next.c[k]);
    next.h[k] = o[k] * tanh_c[k];
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->i = std::move(i);
    cache->f = std::move(f);
    cache->g = std::move(g);
    cache->o = std::move(o);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

LstmStepGrad lstm_step_backward(LstmParams& p, const LstmStepCache& cache,
                                std::span<const double> dh, std::span<const double> dc_in) {
  const std::size_t hid = p.hidden_size();
  if (dh.size() != hid || dc_in.size() != hid) {
    throw DimensionError("lstm_step_backward: gradient lengths " + std::to_string(dh.size()) +
                         " and " + std::to_string(dc_in.size()) + ", hidden size " +
                         std::to_string(hid));
  }
  Vector da_i(hid), da_f(hid), da_g(hid), da_o(hid);
  LstmStepGrad out{Vector(p.input_size(), 0.0), Vector(hid, 0.0), Vector(hid, 0.0)};
  auto wci = vec(p.w_ci), wcf = vec(p.w_cf), wco = vec(p.w_co);
  for (std::size_t k = 0; k < hid; ++k) {
    const double o = cache.o[k], i = cache.i[k], f = cache.f[k], g = cache.g[k];
    const double tc = cache.tanh_c[k];
    const double d_o = dh[k] * tc;
    const double dc = dc_in[k] + dh[k] * o * (1.0 - tc * tc);
    da_o[k] = d_o * o * (1.0 - o);
    da_i[k] = dc * g * i * (1.0 - i);
    da_f[k] = dc * cache.c_prev[k] * f * (1.0 - f);
    da_g[k] = dc * i * (1.0 - g * g);
    out.dc_prev[k] = dc * f + wci[k] * da_i[k] + wcf[k] * da_f[k] + wco[k] * da_o[k];
  }
  accumulate_gate(p.W_xi, p.W_hi, &p.w_ci, p.b_i, da_i, cache, out.dx, out.dh_prev);
  accumulate_gate(p.W_xf, p.W_hf, &p.w_cf, p.b_f, da_f, cache, out.dx, out.dh_prev);
  accumulate_gate(p.W_xc, p.W_hc, nullptr, p.b_c, da_g, cache, out.dx, out.dh_prev);
  accumulate_gate(p.W_xo, p.W_ho, &p.w_co, p.b_o, da_o, cache, out.dx, out.dh_prev);
  return out;
}

std::vector<Vector> bilstm_encode(const LstmParams& fwd, const LstmParams& bwd,
                                  const std::vector<Vector>& xs, BiLstmCache* cache) {
  const std::size_t n = xs.size();
  if (n == 0) throw DomainError("bilstm_encode of an empty sequence");
  const std::size_t hf = fwd.hidden_size(), hb = bwd.hidden_size();
  std::vector<Vector> out(n, Vector(hf + hb));
  if (cache) {
    cache->fwd.assign(n, {});
    cache->bwd.assign(n, {});
  }
  LstmState s = LstmState::zeros(hf);
  for (std::size_t t = 0; t < n; ++t) {
    s = lstm_step(fwd, xs[t], s, cache ? &cache->fwd[t] : nullptr);
    std::copy(s.h.begin(), s.h.end(), out[t].begin());
  }
  s = LstmState::zeros(hb);
  for (std::size_t t = n; t-- > 0;) {
    s = lstm_step(bwd, xs[t], s, cache ? &cache->bwd[t] : nullptr);
    std::copy(s.h.begin(), s.h.end(), out[t].begin() + static_cast<std::ptrdiff_t>(hf));
  }
  return out;
}

std::vector<Vector> bilstm_backward(LstmParams& fwd, LstmParams& bwd, const BiLstmCache& cache,
                                    const std::vector<Vector>& dout) {
  const std::size_t n = dout.size();
  if (cache.fwd.size() != n || cache.bwd.size() != n) {
    throw DimensionError("bilstm_backward: cache holds " + std::to_string(cache.fwd.size()) +
                         " steps, gradient has " + std::to_string(n));
  }
  const std::size_t hf = fwd.hidden_size(), hb = bwd.hidden_size();
  std::vector<Vector> dxs(n, Vector(fwd.input_size(), 0.0));

  Vector dh_next(hf, 0.0), dc_next(hf, 0.0);
  for (std::size_t t = n; t-- > 0;) {
    Vector dh(hf);
    for (std::size_t k = 0; k < hf; ++k) dh[k] = dout[t][k] + dh_next[k];
    LstmStepGrad g = lstm_step_backward(fwd, cache.fwd[t], dh, dc_next);
    for (std::size_t k = 0; k < dxs[t].size(); ++k) dxs[t][k] += g.dx[k];
    dh_next = std::move(g.dh_prev);
    dc_next = std::move(g.dc_prev);
  }

  dh_next.assign(hb, 0.0);
  dc_next.assign(hb, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    Vector dh(hb);
    for (std::size_t k = 0; k < hb; ++k) dh[k] = dout[t][hf + k] + dh_next[k];
    LstmStepGrad g = lstm_step_backward(bwd, cache.bwd[t], dh, dc_next);
    for (std::size_t k = 0; k < dxs[t].size(); ++k) dxs[t][k] += g.dx[k];
    dh_next = std::move(g.dh_prev);
    dc_next = std::move(g.dc_prev);
  }
  return dxs;
}

}  // namespace stagger
