#include "stagger/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "stagger/corpus.hpp"
#include "stagger/crf.hpp"
#include "stagger/training.hpp"

namespace stagger {
namespace {

using nlohmann::json;

constexpr double kGradTolerance = 1e-4;
constexpr double kCrfTolerance = 1e-9;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const std::vector<std::string> kWordPool = {"alpha", "beta", "gamma", "delta", "Omega", "x9"};

struct BruteForce {
  double best = -INFINITY;
  double log_z = 0.0;
};

// Enumerates all T^n paths.
BruteForce brute_force(const Matrix& m, const Matrix& a) {
  const std::size_t n = m.rows(), t = m.cols();
  TagPath path(n, 0);
  std::vector<double> scores;
  BruteForce out;
  while (true) {
    const double s = path_score(m, a, path);
    scores.push_back(s);
    out.best = std::max(out.best, s);
    std::size_t pos = 0;
    while (pos < n && ++path[pos] == t) path[pos++] = 0;
    if (pos == n) break;
  }
  out.log_z = log_sum_exp(scores);
  return out;
}

CheckOutcome gradient_checks(const SelfcheckOptions& opt) {
  CheckOutcome out{"gradient", true, "", ""};
  double worst = 0.0;
  for (Variant v : {Variant::BiLstm, Variant::BiLstmAttn, Variant::BiLstmCrf,
                    Variant::BiLstmCrfAttn}) {
    for (std::size_t s = 0; s < opt.grad_seeds; ++s) {
      GradCheckSetup setup;
      setup.variant = v;
      setup.seed = opt.seed * 1000 + s;
      setup.perturb = opt.perturb_gradients;
      const ModelGradCheck g = whole_model_gradient_check(setup);
      worst = std::max(worst, g.result.max_relative_error);
      if (g.result.max_relative_error > kGradTolerance) {
        out.passed = false;
        out.detail = variant_name(v) + ": max relative error " +
                     fmt(g.result.max_relative_error) + " in " + g.result.worst_tensor;
        out.failing_instance = g.instance;
        return out;
      }
    }
  }
  out.detail = std::to_string(4 * opt.grad_seeds) + " models, max relative error " + fmt(worst);
  return out;
}

CheckOutcome crf_checks(const SelfcheckOptions& opt) {
  CheckOutcome out{"crf-brute-force", true, "", ""};
  SeededRng rng = SeededRng::derive(opt.seed, 7);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    const std::size_t n = 1 + rng.below(6), t = 1 + rng.below(5);
    Matrix m(n, t);
    for (double& x : m.data()) x = rng.uniform(-3, 3);
    Matrix a = make_transitions(t);
    for (std::size_t k = 0; k < t + 2; ++k) {
      for (std::size_t j = 0; j < t + 2; ++j) {
        if (a(k, j) != kForbidden) a(k, j) = rng.uniform(-3, 3);
      }
    }
    const BruteForce bf = brute_force(m, a);
    const ViterbiResult vit = viterbi(m, a);
    const double lz = log_partition(m, a);
    const double err = std::max(std::abs(vit.score - bf.best), std::abs(lz - bf.log_z));
    worst = std::max(worst, err);
    if (err > kCrfTolerance) {
      out.passed = false;
      out.detail = "trial " + std::to_string(trial) + ": viterbi " + fmt(vit.score) + " vs " +
                   fmt(bf.best) + ", log Z " + fmt(lz) + " vs " + fmt(bf.log_z);
      out.failing_instance = json{{"emissions", matrix_json(m)}, {"transitions", matrix_json(a)}}.dump();
      return out;
    }
  }
  out.detail = std::to_string(opt.trials) + " instances, max deviation " + fmt(worst);
  return out;
}

CheckOutcome bio_checks(const SelfcheckOptions& opt) {
  CheckOutcome out{"bio-roundtrip", true, "", ""};
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    TokenSequence tokens;
    for (std::size_t i = 0; i < n; ++i) tokens.push_back("t" + std::to_string(i));
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t e = s + 1; e <= n; ++e) {
        ++cases;
        const auto decoded = decode_spans(tokens, encode_bio(tokens, Span{s, e}));
        if (decoded.size() != 1 || decoded[0].span != Span{s, e} ||
            decoded[0].text != join_tokens(tokens, s, e)) {
          out.passed = false;
          out.detail = "span round trip failed";
          out.failing_instance = json{{"length", n}, {"start", s}, {"end", e}}.dump();
          return out;
        }
      }
    }
  }
  SeededRng rng = SeededRng::derive(opt.seed, 8);
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    std::vector<BioTag> tags(n);
    for (auto& tag : tags) tag = static_cast<BioTag>(rng.below(3));
    const auto spans = tag_spans(tags);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const bool bad = spans[i].start >= spans[i].end || spans[i].end > n ||
                       (i > 0 && spans[i - 1].end > spans[i].start);
      if (bad) {
        std::vector<int> raw;
        for (BioTag t : tags) raw.push_back(static_cast<int>(t));
        out.passed = false;
        out.detail = "decoded spans overlap or are unsorted";
        out.failing_instance = json{{"tags", raw}}.dump();
        return out;
      }
    }
    ++cases;
  }
  out.detail = std::to_string(cases) + " cases";
  return out;
}

}  // namespace

ModelGradCheck whole_model_gradient_check(const GradCheckSetup& setup) {
  SeededRng rng(setup.seed);
  std::vector<LabeledSequence> corpus;
  for (std::size_t s = 0; s < 3; ++s) {
    LabeledSequence seq;
    for (std::size_t i = 0; i < setup.seq_len; ++i) {
      seq.tokens.push_back(kWordPool[rng.below(kWordPool.size())]);
      seq.tags.push_back(static_cast<BioTag>(rng.below(kNumBioTags)));
    }
    corpus.push_back(std::move(seq));
  }
  ModelConfig config;
  config.variant = setup.variant;
  config.word_dim = setup.word_dim;
  config.char_dim = setup.char_dim;
  config.hidden = setup.hidden;
  config.dropout = 0.0;
  config.seed = setup.seed;
  Model model(config, Vocab::build(corpus, config.vocab_options()));
  model.init(rng);
  // Offsets move every trainable entry off its structured initial value,
  // so zero biases and zero transitions get exercised too.
  for (ParamTensor* p : model.params()) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      if (!p->is_frozen(i)) p->value.data()[i] += rng.uniform(-0.5, 0.5);
    }
  }
  const LabeledSequence& target = corpus.front();
  const TagPath gold = to_tag_ids(target.tags);
  SeededRng unused(0);

  auto loss = [&]() {
    const Matrix m = forward(model, target.tokens, false, unused).emissions;
    return loss_for_variant(config, m, model.transitions ? &model.transitions->value : nullptr, gold)
        .loss;
  };

  model.zero_grad();
  ForwardResult fr = forward(model, target.tokens, false, unused);
  VariantLoss l = loss_for_variant(config, fr.emissions,
                                   model.transitions ? &model.transitions->value : nullptr, gold);
  backward(model, fr.cache, l.d_emissions, l.d_transitions ? &*l.d_transitions : nullptr);

  ParamRefs params = model.params();
  std::vector<Matrix> analytic;
  for (ParamTensor* p : params) analytic.push_back(p->grad);
  if (setup.perturb) {
    for (Matrix& g : analytic) {
      for (double& v : g.data()) v = v * 1.01 + 1e-3;
    }
  }
  const std::vector<Matrix> numeric = finite_diff_grad(loss, params, setup.epsilon);

  ModelGradCheck out;
  out.result = compare_gradients(params, analytic, numeric);
  out.instance = json{{"variant", variant_name(setup.variant)},
                      {"seed", setup.seed},
                      {"hidden", setup.hidden},
                      {"word_dim", setup.word_dim},
                      {"char_dim", setup.char_dim},
                      {"tokens", target.tokens},
                      {"worst_tensor", out.result.worst_tensor},
                      {"worst_index", out.result.worst_index},
                      {"analytic", out.result.worst_analytic},
                      {"numeric", out.result.worst_numeric}}
                     .dump();
  return out;
}

std::vector<CheckOutcome> run_selfcheck(const SelfcheckOptions& options) {
  return {gradient_checks(options), crf_checks(options), bio_checks(options)};
}

}  // namespace stagger
