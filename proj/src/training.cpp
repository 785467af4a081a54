#include "stagger/training.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>

#include "stagger/dropout.hpp"
#include "stagger/error.hpp"

namespace stagger {
namespace {

// Per-purpose rng streams derived from the run seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kDropoutStream = 3;
constexpr std::uint64_t kFoldSplitStream = 4;
constexpr std::uint64_t kFoldSeedStream = 100;

}  // namespace

ForwardResult forward(const Model& model, const TokenSequence& seq, bool train_mode,
                      SeededRng& rng) {
  if (seq.empty()) throw DomainError("forward on an empty sequence");
  const double rate = model.config().dropout;
  const std::size_t n = seq.size();
  ForwardResult r;
  ForwardCache& c = r.cache;
  c.model_instance = model.instance();
  c.model_version = model.version();
  c.ids.reserve(n);
  std::vector<Vector> inputs(n);
  c.embed_masks.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    c.ids.push_back(token_ids(model.vocab(), seq[t]));
    DropoutResult d = dropout(embed_ids(model.embed, c.ids.back()), rate, rng, train_mode);
    inputs[t] = std::move(d.output);
    c.embed_masks[t] = std::move(d.mask);
  }
  std::vector<Vector> hidden = bilstm_encode(model.fwd, model.bwd, inputs, &c.lstm);
  c.features.resize(n);
  c.feature_masks.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    DropoutResult d = dropout(hidden[t], rate, rng, train_mode);
    c.features[t] = std::move(d.output);
    c.feature_masks[t] = std::move(d.mask);
  }
  if (model.attention) {
    c.attended = attention(*model.attention, c.features, &c.attention).outputs;
    r.emissions = emission_scores(model.projection, c.attended);
  } else {
    r.emissions = emission_scores(model.projection, c.features);
  }
  return r;
}

void backward(Model& model, const ForwardCache& c, const Matrix& d_emissions,
              const Matrix* d_transitions) {
  if (c.model_instance != model.instance() || c.model_version != model.version()) {
    throw DimensionError("backward: cache was produced by a different model or an older "
                         "parameter version");
  }
  const std::size_t n = c.ids.size();
  if (d_emissions.rows() != n || d_emissions.cols() != model.num_tags()) {
    throw DimensionError("backward: emission gradient is " + d_emissions.shape_string() +
                         ", expected " + shape_string(n, model.num_tags()));
  }
  if (d_transitions) {
    if (!model.transitions) throw DimensionError("backward: model has no transition matrix");
    ParamTensor& a = *model.transitions;
    if (!d_transitions->same_shape(a.value)) {
      throw DimensionError("backward: transition gradient is " + d_transitions->shape_string() +
                           ", expected " + a.value.shape_string());
    }
    for (std::size_t i = 0; i < a.grad.size(); ++i) {
      if (!a.is_frozen(i)) a.grad.data()[i] += d_transitions->data()[i];
    }
  }

  std::vector<Vector> d_features;
  if (model.attention) {
    std::vector<Vector> d_attended = emission_backward(model.projection, c.attended, d_emissions);
    d_features = attention_backward(*model.attention, c.attention, d_attended);
  } else {
    d_features = emission_backward(model.projection, c.features, d_emissions);
  }
  std::vector<Vector> d_hidden(n);
  for (std::size_t t = 0; t < n; ++t) d_hidden[t] = dropout_backward(c.feature_masks[t], d_features[t]);
  std::vector<Vector> d_inputs = bilstm_backward(model.fwd, model.bwd, c.lstm, d_hidden);
  for (std::size_t t = 0; t < n; ++t) {
    embed_backward(model.embed, c.ids[t], dropout_backward(c.embed_masks[t], d_inputs[t]));
  }
}

VariantLoss loss_for_variant(const ModelConfig& config, const Matrix& emissions,
                             const Matrix* transitions, const TagPath& gold) {
  VariantLoss out;
  if (uses_crf(config.variant)) {
    if (!transitions) throw ConfigError("CRF variant requires a transition matrix");
    CrfLoss l = nll_loss(emissions, *transitions, gold);
    out.loss = l.loss;
    out.d_emissions = std::move(l.d_emissions);
    out.d_transitions = std::move(l.d_transitions);
  } else {
    TokenLoss l = token_softmax_loss(emissions, gold);
    out.loss = l.loss;
    out.d_emissions = std::move(l.d_emissions);
  }
  return out;
}

SgdStats sgd_step(const ParamRefs& params, double learning_rate, double clip_norm) {
  double sq = 0.0;
  for (const ParamTensor* p : params) {
    double local = 0.0;
    for (double g : p->grad.data()) local += g * g;
    if (!std::isfinite(local)) {
      throw NumericError("non-finite gradient in " + p->name, p->name);
    }
    sq += local;
  }
  SgdStats stats;
  stats.grad_norm = std::sqrt(sq);
  if (clip_norm > 0.0 && std::isfinite(clip_norm) && stats.grad_norm > clip_norm) {
    stats.scale = clip_norm / stats.grad_norm;
  }
  const double step = learning_rate * stats.scale;
  for (ParamTensor* p : params) {
    auto& v = p->value.data();
    auto& g = p->grad.data();
    if (step != 0.0) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!p->is_frozen(i)) v[i] -= step * g[i];
      }
    }
    p->zero_grad();
  }
  return stats;
}

SgdStats sgd_step(Model& model, double learning_rate, double clip_norm) {
  SgdStats s = sgd_step(model.params(), learning_rate, clip_norm);
  model.bump_version();
  return s;
}

TagPath to_tag_ids(const std::vector<BioTag>& tags) {
  TagPath p(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i) p[i] = static_cast<std::size_t>(tags[i]);
  return p;
}

std::vector<BioTag> to_bio_tags(const TagPath& path) {
  std::vector<BioTag> tags(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= kNumBioTags) throw RangeError("tag id " + std::to_string(path[i]) + " is not BIO");
    tags[i] = static_cast<BioTag>(path[i]);
  }
  return tags;
}

std::vector<BioTag> repair_bio(const std::vector<BioTag>& tags) {
  std::vector<BioTag> out = tags;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == BioTag::I && (i == 0 || out[i - 1] == BioTag::O)) out[i] = BioTag::B;
  }
  return out;
}

std::vector<BioTag> predict(const Model& model, const TokenSequence& seq) {
  SeededRng unused(0);
  const Matrix m = forward(model, seq, false, unused).emissions;
  if (model.transitions) return to_bio_tags(viterbi(m, model.transitions->value).path);
  return to_bio_tags(tag_sequence_no_crf(m));
}

EvalReport evaluate_model(const Model& model, const std::vector<LabeledSequence>& data) {
  std::vector<std::vector<BioTag>> gold, pred;
  gold.reserve(data.size());
  pred.reserve(data.size());
  for (const auto& s : data) {
    gold.push_back(s.tags);
    pred.push_back(predict(model, s.tokens));
  }
  return evaluate(gold, pred);
}

std::string format_log_line(const EpochRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.4f\t%.4f", r.epoch, r.mean_loss, r.val_f1,
                r.val_label_accuracy);
  return buf;
}

TrainResult train(const ModelConfig& config, const std::vector<LabeledSequence>& train_data,
                  const std::vector<LabeledSequence>& val_data, const EpochCallback& on_epoch) {
  config.validate();
  if (train_data.empty()) throw DomainError("training data is empty");
  for (std::size_t s = 0; s < train_data.size(); ++s) {
    if (train_data[s].tokens.empty() || train_data[s].tokens.size() != train_data[s].tags.size()) {
      throw DimensionError("training sequence " + std::to_string(s) + " is empty or misaligned");
    }
  }

  Model model(config, Vocab::build(train_data, config.vocab_options()));
  SeededRng init_rng = SeededRng::derive(config.seed, kInitStream);
  model.init(init_rng);
  SeededRng shuffle_rng = SeededRng::derive(config.seed, kShuffleStream);
  SeededRng dropout_rng = SeededRng::derive(config.seed, kDropoutStream);

  std::vector<TagPath> gold(train_data.size());
  for (std::size_t s = 0; s < train_data.size(); ++s) {
    gold[s] = to_tag_ids(config.constrain_bio ? repair_bio(train_data[s].tags) : train_data[s].tags);
  }

  TrainResult result{model, model, 0, {}};
  double best_f1 = -1.0;
  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double total = 0.0;
    for (std::size_t idx : order) {
      ForwardResult fr = forward(model, train_data[idx].tokens, true, dropout_rng);
      VariantLoss l = loss_for_variant(config, fr.emissions,
                                       model.transitions ? &model.transitions->value : nullptr,
                                       gold[idx]);
      if (!std::isfinite(l.loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
      }
      total += l.loss;
      backward(model, fr.cache, l.d_emissions, l.d_transitions ? &*l.d_transitions : nullptr);
      sgd_step(model, config.learning_rate, config.clip_norm);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = total / static_cast<double>(train_data.size());
    if (!val_data.empty()) {
      EvalReport rep = evaluate_model(model, val_data);
      rec.val_f1 = rep.f1;
      rec.val_label_accuracy = rep.label_accuracy;
      if (rep.f1 > best_f1) {
        best_f1 = rep.f1;
        result.best_model = model;
        result.best_epoch = epoch;
      }
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  if (val_data.empty()) {
    result.best_model = model;
    result.best_epoch = config.epochs;
  }
  result.final_model = std::move(model);
  return result;
}

CrossValidation cross_validate(const ModelConfig& config,
                               const std::vector<LabeledSequence>& data, std::size_t parallel) {
  config.validate();
  SeededRng split_rng = SeededRng::derive(config.seed, kFoldSplitStream);
  const auto folds = kfold(data, config.folds, split_rng);

  auto run_fold = [&](std::size_t f) {
    ModelConfig fold_config = config;
    fold_config.seed = SeededRng::derive(config.seed, kFoldSeedStream + f).next_u64();
    TrainResult tr = train(fold_config, folds[f].train, {});
    return evaluate_model(tr.final_model, folds[f].held_out);
  };

  CrossValidation cv;
  cv.folds.resize(folds.size());
  if (parallel < 1) parallel = 1;
  for (std::size_t begin = 0; begin < folds.size(); begin += parallel) {
    const std::size_t end = std::min(folds.size(), begin + parallel);
    if (end - begin == 1) {
      cv.folds[begin] = run_fold(begin);
      continue;
    }
    std::vector<std::future<EvalReport>> jobs;
    for (std::size_t f = begin; f < end; ++f) {
      jobs.push_back(std::async(std::launch::async, run_fold, f));
    }
    for (std::size_t f = begin; f < end; ++f) cv.folds[f] = jobs[f - begin].get();
  }
  cv.mean = aggregate(cv.folds);
  return cv;
}

}  // namespace stagger
