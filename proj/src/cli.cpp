#include "stagger/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "stagger/error.hpp"
#include "stagger/model_io.hpp"
#include "stagger/selfcheck.hpp"
#include "stagger/synthetic.hpp"
#include "stagger/training.hpp"

namespace stagger {
namespace {

// Splits train/val/test with a stream independent of training.
constexpr std::uint64_t kSplitStream = 5;

struct TrainFlags {
  std::string data;
  std::string out;
  std::string log;
  std::string variant = "bilstm-crf";
  std::string save = "best";
  bool cv = false;
  bool tsv = false;
  std::size_t parallel_folds = 1;
  ModelConfig config;
};

struct TagFlags {
  std::string model;
  std::string data;
};

struct EvalFlags {
  std::string model;
  std::string data;
  bool tsv = false;
};

struct SynthFlags {
  std::string out;
  SyntheticOptions options;
};

ReportStyle style(bool tsv) { return tsv ? ReportStyle::Tsv : ReportStyle::Text; }

void print_report(std::ostream& out, const EvalReport& r, bool tsv, const std::string& label) {
  out << format_report(r, style(tsv), label);
  if (tsv) out << "\n";
}

int cmd_train(TrainFlags f, std::ostream& out, std::ostream& err) {
  f.config.variant = parse_variant(f.variant);
  f.config.validate();
  if (f.save != "best" && f.save != "final") throw ConfigError("--save must be best or final");
  if (f.parallel_folds == 0) throw ConfigError("--parallel-folds must be at least 1");

  const auto data = read_conll(f.data, f.config.attribute);
  if (data.empty()) throw DataError(f.data + ": no sequences");
  SeededRng split_rng = SeededRng::derive(f.config.seed, kSplitStream);
  const auto split = split_dataset(data, {0.6, 0.2, 0.2}, split_rng);
  err << "train " << split.train.size() << ", val " << split.val.size() << ", test "
      << split.test.size() << " sequences\n";

  std::ofstream log_file;
  if (!f.log.empty()) {
    log_file.open(f.log, std::ios::binary | std::ios::trunc);
    if (!log_file) throw DataError("cannot write " + f.log);
  }
  std::ostream& log = f.log.empty() ? out : log_file;
  log << "epoch\tmean_loss\tval_f1\tval_label_accuracy\n";
  TrainResult result = train(f.config, split.train, split.val,
                             [&log](const EpochRecord& r) { log << format_log_line(r) << "\n"; });
  log.flush();

  const bool best = f.save == "best";
  const Model& chosen = best ? result.best_model : result.final_model;
  TrainingMeta meta{f.config.seed, result.log.size(), result.best_epoch, f.save};
  save_model(f.out, chosen, meta);

  const std::string name = variant_name(f.config.variant);
  print_report(out, evaluate_model(chosen, split.val), f.tsv, name + " (validation)");
  if (!split.test.empty()) {
    print_report(out, evaluate_model(chosen, split.test), f.tsv, name + " (test)");
  }
  if (f.cv) {
    std::vector<LabeledSequence> pool = split.train;
    pool.insert(pool.end(), split.val.begin(), split.val.end());
    const CrossValidation cv = cross_validate(f.config, pool, f.parallel_folds);
    for (std::size_t k = 0; k < cv.folds.size(); ++k) {
      print_report(out, cv.folds[k], f.tsv, name + " (fold " + std::to_string(k + 1) + ")");
    }
    print_report(out, cv.mean, f.tsv, name + " (cv mean)");
  }
  return kExitOk;
}

int cmd_tag(const TagFlags& f, std::ostream& out, std::ostream& err) {
  const LoadedModel loaded = load_model(f.model);
  const auto lines = read_lines(f.data);
  std::size_t skipped = 0;
  for (const auto& line : lines) {
    TokenSequence tokens;
    try {
      tokens = tokenize(line);
    } catch (const DomainError&) {
      ++skipped;
      continue;
    }
    const auto spans = decode_spans(tokens, predict(loaded.model, tokens));
    std::string value;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (i > 0) value += " | ";
      value += spans[i].text;
    }
    out << line << "\t" << value << "\n";
  }
  if (skipped > 0) err << "warning: skipped " << skipped << " empty title line(s)\n";
  return kExitOk;
}

int cmd_eval(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  const LoadedModel loaded = load_model(f.model);
  const auto data = read_conll(f.data, loaded.model.config().attribute);
  const EvalReport r = evaluate_model(loaded.model, data);
  print_report(out, r, f.tsv, variant_name(loaded.model.config().variant));
  if (f.tsv && r.degenerate) err << "note: degenerate report (zero denominator)\n";
  return kExitOk;
}

int cmd_selfcheck(const SelfcheckOptions& o, std::ostream& out) {
  bool ok = true;
  for (const CheckOutcome& c : run_selfcheck(o)) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    if (!c.passed) {
      out << "  instance: " << c.failing_instance << "\n";
      ok = false;
    }
  }
  return ok ? kExitOk : kExitSelfcheck;
}

int cmd_synth(const SynthFlags& f, std::ostream& err) {
  const SyntheticCorpus corpus = generate_synthetic(f.options);
  write_conll(f.out, corpus.data);
  err << "wrote " << corpus.data.size() << " titles with " << corpus.brands.size()
      << " brands to " << f.out << "\n";
  return kExitOk;
}

void add_model_flags(CLI::App* cmd, TrainFlags& f) {
  ModelConfig& c = f.config;
  cmd->add_option("--variant", f.variant, "bilstm, bilstm-attn, bilstm-crf or bilstm-crf-attn");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--epochs", c.epochs, "Training epochs");
  cmd->add_option("--lr", c.learning_rate, "SGD learning rate");
  cmd->add_option("--clip", c.clip_norm, "Global gradient-norm clip");
  cmd->add_option("--dropout", c.dropout, "Dropout rate in [0, 1)");
  cmd->add_option("--hidden", c.hidden, "LSTM hidden size per direction");
  cmd->add_option("--word-dim", c.word_dim, "Word embedding size");
  cmd->add_option("--char-dim", c.char_dim, "Character embedding size");
  cmd->add_option("--attention-dim", c.attention_dim, "Attention size (0 = hidden)");
  cmd->add_option("--folds", c.folds, "Cross-validation folds");
  cmd->add_option("--min-frequency", c.min_frequency, "Word frequency cutoff");
  cmd->add_flag("--lowercase", c.lowercase, "Lowercase words for the word vocabulary");
  cmd->add_flag("--constrain-bio", c.constrain_bio, "Forbid O->I and START->I transitions");
  cmd->add_option("--attribute", c.attribute, "Attribute name used in tag strings");
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Replaces `--config FILE` with the file's key=value lines rewritten as
// `--key=value`. Keys already given as flags are skipped, so flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return rest;

  std::vector<std::string> out = rest;
  const auto lines = read_lines(*path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string line = trim(lines[n]);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(*path + ":" + std::to_string(n + 1) + ": expected key=value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(*path + ":" + std::to_string(n + 1) + ": empty key");
    if (!has_flag(rest, "--" + key)) out.push_back("--" + key + "=" + value);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stagger: BiLSTM-CRF attribute extraction from product titles", "stagger"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a labelled dataset");
  train_cmd->add_option("--data", train_flags.data, "Labelled dataset (token<TAB>tag)")->required();
  train_cmd->add_option("--out,--model", train_flags.out, "Model file to write")->required();
  train_cmd->add_option("--log", train_flags.log, "Write the per-epoch log here (default stdout)");
  train_cmd->add_option("--save", train_flags.save, "Parameters to store: best or final");
  train_cmd->add_flag("--cv", train_flags.cv, "Also cross-validate on train+val");
  train_cmd->add_option("--parallel-folds", train_flags.parallel_folds, "Folds trained at once");
  train_cmd->add_flag("--tsv", train_flags.tsv, "TSV report lines");
  add_model_flags(train_cmd, train_flags);

  TagFlags tag_flags;
  auto* tag_cmd = app.add_subcommand("tag", "Extract attribute values from raw titles");
  tag_cmd->add_option("--model", tag_flags.model, "Model file")->required();
  tag_cmd->add_option("--data", tag_flags.data, "Titles, one per line")->required();

  EvalFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("eval", "Score a model on a labelled dataset");
  eval_cmd->add_option("--model", eval_flags.model, "Model file")->required();
  eval_cmd->add_option("--data", eval_flags.data, "Labelled dataset")->required();
  eval_cmd->add_flag("--tsv", eval_flags.tsv, "Single TSV line");

  SelfcheckOptions check_opts;
  auto* check_cmd = app.add_subcommand("selfcheck", "Run the built-in verification oracles");
  check_cmd->add_option("--trials", check_opts.trials, "Random instances per check");
  check_cmd->add_option("--seed", check_opts.seed, "Seed for the check instances");
  check_cmd->add_option("--grad-seeds", check_opts.grad_seeds, "Gradient checks per variant");
  check_cmd->add_flag("--perturb-gradients", check_opts.perturb_gradients,
                      "Corrupt analytic gradients (negative control)");

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic brand corpus");
  synth_cmd->add_option("--out", synth_flags.out, "Dataset file to write")->required();
  synth_cmd->add_option("--titles", synth_flags.options.num_titles, "Number of titles");
  synth_cmd->add_option("--brands", synth_flags.options.num_brands, "Brand lexicon size");
  synth_cmd->add_option("--seed", synth_flags.options.seed, "Generator seed");

  std::vector<std::string> reversed;
  try {
    const std::vector<std::string> expanded = expand_config(args);
    reversed.assign(expanded.rbegin(), expanded.rend());
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_flags, out, err);
    if (*tag_cmd) return cmd_tag(tag_flags, out, err);
    if (*eval_cmd) return cmd_eval(eval_flags, out, err);
    if (*check_cmd) return cmd_selfcheck(check_opts, out);
    if (*synth_cmd) return cmd_synth(synth_flags, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace stagger
