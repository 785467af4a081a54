// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any gated criterion fails. `--only N` runs a single one.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "../oracles.hpp"
#include "stagger/attention.hpp"
#include "stagger/crf.hpp"
#include "stagger/dropout.hpp"
#include "stagger/selfcheck.hpp"
#include "stagger/synthetic.hpp"
#include "stagger/training.hpp"

using namespace stagger;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  bool gated = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

Matrix random_transitions(std::size_t T, SeededRng& rng) {
  Matrix a = oracle::random_matrix(T + 2, T + 2, rng, -3, 3);
  apply_transition_mask(a, transition_frozen_mask(T, false));
  return a;
}

Outcome crf_oracle() {
  const auto t0 = Clock::now();
  SeededRng rng(20240601);
  const int instances = 1200;
  double worst_score = 0, worst_logz = 0;
  bool paths_ok = true;
  for (int k = 0; k < instances; ++k) {
    const std::size_t n = 1 + rng.below(6), T = 1 + rng.below(5);
    Matrix m = oracle::random_matrix(n, T, rng, -3, 3);
    Matrix a = random_transitions(T, rng);
    auto brute = oracle::enumerate(m, a);
    auto v = viterbi(m, a);
    worst_score = std::max(worst_score, std::abs(v.score - brute.best_score));
    worst_logz = std::max(worst_logz, std::abs(log_partition(m, a) - brute.log_z));
    paths_ok = paths_ok && std::abs(oracle::score(m, a, v.path) - brute.best_score) <= 1e-9;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.passed = worst_score <= 1e-9 && worst_logz <= 1e-9 && paths_ok && secs <= 30;
  o.detail = std::to_string(instances) + " instances, " +
             fmt("max viterbi diff %.2e, max log-partition diff %.2e, %.1fs", worst_score,
                 worst_logz, secs);
  return o;
}

Outcome gradient_fidelity() {
  const auto t0 = Clock::now();
  const int seeds = 20;
  double worst = 0;
  std::string where;
  for (Variant v : {Variant::BiLstm, Variant::BiLstmAttn, Variant::BiLstmCrf,
                    Variant::BiLstmCrfAttn}) {
    for (int s = 1; s <= seeds; ++s) {
      GradCheckSetup setup;
      setup.variant = v;
      setup.seed = static_cast<std::uint64_t>(s);
      auto r = whole_model_gradient_check(setup);
      if (r.result.max_relative_error > worst) {
        worst = r.result.max_relative_error;
        where = variant_name(v) + " seed " + std::to_string(s) + " " + r.result.worst_tensor;
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.passed = worst <= 1e-4 && secs <= 120;
  o.detail = "4 variants x " + std::to_string(seeds) + " seeds, " +
             fmt("max relative error %.2e", worst) + " (" + where + ")" + fmt(", %.1fs", secs);
  return o;
}

Outcome bio_correctness() {
  std::size_t checked = 0;
  bool ok = true;
  for (std::size_t n = 1; n <= 12; ++n) {
    TokenSequence toks;
    for (std::size_t i = 0; i < n; ++i) toks.push_back("w" + std::to_string(i));
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t e = s + 1; e <= n; ++e) {
        auto spans = decode_spans(toks, encode_bio(toks, Span{s, e}));
        ok = ok && spans.size() == 1 && spans[0].span == Span{s, e} &&
             spans[0].text == join_tokens(toks, s, e);
        ++checked;
      }
    }
    ok = ok && decode_spans(toks, encode_bio(toks, std::nullopt)).empty();
  }

  using enum BioTag;
  const auto pad = encode_bio(tokenize("The Green Pet Shop Self Cooling Dog Pad"), Span{0, 4});
  const bool pad_ok = pad == std::vector<BioTag>{B, I, I, I, O, O, O, O};

  struct Fixture {
    std::string title;
    std::vector<BioTag> tags;
    std::string want;
  };
  const std::vector<Fixture> fixtures{
      {"Woodland Imports Decorative Bottle", {B, I, O, O}, "Woodland Imports"},
      {"Home Essentials White Essentials Sugar & Creamer",
       {B, I, O, O, O, O, O},
       "Home Essentials"},
      {"Plum Island Silver Sterling Silver Fairy Piece Ear Cuf",
       {B, I, I, O, O, O, O, O, O},
       "Plum Island Silver"},
  };
  bool table_ok = true;
  for (const auto& f : fixtures) {
    auto spans = decode_spans(tokenize(f.title), f.tags);
    table_ok = table_ok && spans.size() == 1 && spans[0].text == f.want;
  }

  Outcome o;
  o.passed = ok && pad_ok && table_ok;
  o.detail = std::to_string(checked) + " spans round-tripped, worked example " +
             (pad_ok ? "ok" : "WRONG") + ", decode fixtures " + (table_ok ? "ok" : "WRONG");
  return o;
}

Outcome synthetic_end_to_end() {
  const auto t0 = Clock::now();
  auto corpus = generate_synthetic({2000, 200, 0.1, 1});
  SeededRng split_rng = SeededRng::derive(0, 5);
  auto split = split_dataset(corpus.data, {0.6, 0.2, 0.2}, split_rng);

  ModelConfig c;  // default dimensions
  c.variant = Variant::BiLstmCrf;
  c.epochs = 12;
  auto r = train(c, split.train, split.val);
  EvalReport test = evaluate_model(r.best_model, split.test);
  const TokenSequence title = tokenize("Woodland Imports Decorative Bottle");
  const auto found = decode_spans(title, predict(r.best_model, title));
  const std::string value = found.size() == 1 ? found[0].text : "";
  const double secs = seconds_since(t0);

  Outcome o;
  o.passed = test.f1 >= 0.95 && test.label_accuracy >= 0.99 && c.epochs <= 50 && secs <= 600 &&
             value == "Woodland Imports";
  o.detail = std::to_string(split.train.size()) + "/" + std::to_string(split.val.size()) + "/" +
             std::to_string(split.test.size()) + " split, " + std::to_string(c.epochs) +
             " epochs (best " + std::to_string(r.best_epoch) + "), " +
             fmt("test F1 %.4f, label accuracy %.4f, %.1fs", test.f1, test.label_accuracy, secs) +
             ", tagged \"" + value + "\"";
  return o;
}

Outcome variant_ordering() {
  const auto t0 = Clock::now();
  auto corpus = generate_synthetic({2000, 200, 0.1, 1});
  ModelConfig c;
  c.word_dim = 50;
  c.char_dim = 15;
  c.hidden = 50;
  c.epochs = 4;
  c.folds = 5;
  c.variant = Variant::BiLstmCrf;
  auto crf = cross_validate(c, corpus.data);
  c.variant = Variant::BiLstm;
  auto plain = cross_validate(c, corpus.data);
  const double secs = seconds_since(t0);

  Outcome o;
  o.gated = false;
  o.passed = crf.mean.f1 >= plain.mean.f1;
  o.detail = fmt("5-fold mean F1: bilstm-crf %.4f, bilstm %.4f (%.1fs, reported only)",
                 crf.mean.f1, plain.mean.f1, secs);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string("\"") + STAGGER_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "stagger_acceptance_det";
  fs::create_directories(dir);
  const std::string data = (dir / "brands.conll").string();
  bool ok = run_tool("synth --out \"" + data + "\" --titles 200 --brands 30") == 0;
  const std::string common = "train --data \"" + data +
                             "\" --variant bilstm-crf-attn --seed 7 --epochs 2 --hidden 16 "
                             "--word-dim 20 --char-dim 8 --log \"" + (dir / "log.tsv").string() +
                             "\" --out ";
  ok = ok && run_tool(common + "\"" + (dir / "a.stg").string() + "\"") == 0;
  ok = ok && run_tool(common + "\"" + (dir / "b.stg").string() + "\"") == 0;
  const std::string a = slurp(dir / "a.stg"), b = slurp(dir / "b.stg");
  const bool same = ok && !a.empty() && a == b;
  const int check = run_tool("selfcheck");
  fs::remove_all(dir);

  Outcome o;
  o.passed = same && check == 0;
  o.detail = std::string("model files ") + (same ? "identical" : "DIFFER") + " (" +
             std::to_string(a.size()) + " bytes), selfcheck exit " + std::to_string(check);
  return o;
}

Outcome normalization() {
  SeededRng rng(7);
  double worst_crf = 0, worst_attn = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.below(5), T = 1 + rng.below(4);
    auto e = oracle::enumerate(oracle::random_matrix(n, T, rng, -4, 4), random_transitions(T, rng));
    double total = 0;
    for (double s : e.all_scores) total += std::exp(s - e.log_z);
    worst_crf = std::max(worst_crf, std::abs(total - 1.0));
  }
  for (int k = 0; k < 200; ++k) {
    AttentionParams ap("a", 6, 4, 6);
    ap.init(rng);
    for (double& v : ap.v.value.data()) v = rng.uniform(-5, 5);
    std::vector<Vector> h;
    const std::size_t n = 1 + rng.below(10);
    for (std::size_t i = 0; i < n; ++i) h.push_back(oracle::random_vector(6, rng, -3, 3));
    auto out = attention(ap, h);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += out.weights(i, j);
      worst_attn = std::max(worst_attn, std::abs(s - 1.0));
    }
  }
  bool identity = true;
  for (double rate : {0.0, 0.2, 0.5, 0.9}) {
    Vector x = oracle::random_vector(1000, rng, -10, 10);
    identity = identity && dropout(x, rate, rng, false).output == x;
  }

  Outcome o;
  o.passed = worst_crf <= 1e-9 && worst_attn <= 1e-9 && identity;
  o.detail = fmt("max |sum p - 1| CRF %.2e, attention %.2e, ", worst_crf, worst_attn) +
             "eval dropout " + (identity ? "exact identity" : "NOT identity");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"crf-oracle", crf_oracle},
      {"gradient-fidelity", gradient_fidelity},
      {"bio-correctness", bio_correctness},
      {"synthetic-end-to-end", synthetic_end_to_end},
      {"variant-ordering", variant_ordering},
      {"determinism", determinism},
      {"normalization", normalization},
  };
  int only = 0;
  if (argc == 3 && std::string(argv[1]) == "--only") only = std::atoi(argv[2]);
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "usage: " << argv[0] << " [--only N]\n";
    return 2;
  }

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    const char* tag = o.passed ? "PASS" : (o.gated ? "FAIL" : "WARN");
    std::cout << "[" << tag << "] " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
    if (o.gated && !o.passed) all_ok = false;
  }
  return all_ok ? 0 : 1;
}
