#include "stagger/params.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stagger/error.hpp"

namespace stagger {

void check_param_set(const ParamRefs& params) {
  std::set<std::string> names;
  for (const ParamTensor* p : params) {
    if (!names.insert(p->name).second) {
      throw ConfigError("duplicate parameter name: " + p->name);
    }
    if (!p->grad.same_shape(p->value)) {
      throw DimensionError("gradient of " + p->name + " is " + p->grad.shape_string() +
                           ", value is " + p->value.shape_string());
    }
  }
}

void init_uniform_scaled(Matrix& m, SeededRng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.data()) v = rng.uniform(-bound, bound);
}

std::vector<Matrix> finite_diff_grad(const std::function<double()>& f,
                                     const ParamRefs& params, double epsilon) {
  if (!(epsilon > 0)) throw DomainError("finite_diff_grad: epsilon must be positive");
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (ParamTensor* p : params) {
    Matrix g(p->value.rows(), p->value.cols());
    auto& data = p->value.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + epsilon;
      const double plus = f();
      data[i] = saved - epsilon;
      const double minus = f();
      data[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericError("non-finite objective while probing " + p->name + "[" +
                               std::to_string(i) + "]",
                           p->name);
      }
      g.data()[i] = (plus - minus) / (2.0 * epsilon);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult compare_gradients(const ParamRefs& params,
                                  const std::vector<Matrix>& analytic,
                                  const std::vector<Matrix>& numeric) {
  if (analytic.size() != params.size() || numeric.size() != params.size()) {
    throw DimensionError("compare_gradients: tensor count mismatch");
  }
  GradCheckResult result;
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (!analytic[t].same_shape(numeric[t])) {
      throw DimensionError("compare_gradients: shape mismatch for " + params[t]->name);
    }
    for (std::size_t i = 0; i < analytic[t].size(); ++i) {
      const double a = analytic[t].data()[i];
      const double n = numeric[t].data()[i];
      const double err = relative_error(a, n);
      if (err > result.max_relative_error) {
        result = {err, params[t]->name, i, a, n};
      }
    }
  }
  return result;
}

}  // namespace stagger
