#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stagger/model.hpp"
#include "stagger/params.hpp"

namespace stagger {

struct GradCheckSetup {
  Variant variant = Variant::BiLstmCrf;
  std::uint64_t seed = 1;
  std::size_t hidden = 5;
  std::size_t word_dim = 8;
  std::size_t char_dim = 4;
  std::size_t seq_len = 3;
  double epsilon = 1e-5;
  // Negative control: corrupts the analytic gradient before comparing.
  bool perturb = false;
};

struct ModelGradCheck {
  GradCheckResult result;
  std::string instance;  // JSON description for reproduction
};

// Whole-model check: randomly initialized (and randomly offset) parameters,
// one random labelled sequence, analytic backward pass versus central
// differences of the variant loss with dropout disabled.
ModelGradCheck whole_model_gradient_check(const GradCheckSetup& setup);

struct SelfcheckOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::size_t grad_seeds = 3;  // per variant
  bool perturb_gradients = false;
};

struct CheckOutcome {
  std::string name;
  bool passed = true;
  std::string detail;
  std::string failing_instance;  // JSON, empty when passed
};

// Gradient checks for every variant, CRF brute-force equivalence, and the
// BIO codec property battery.
std::vector<CheckOutcome> run_selfcheck(const SelfcheckOptions& options);

}  // namespace stagger
