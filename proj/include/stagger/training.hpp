#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stagger/crf.hpp"
#include "stagger/eval.hpp"
#include "stagger/model.hpp"

namespace stagger {

// Intermediates of one forward pass, tied to the model object and parameter
// version that produced them.
struct ForwardCache {
  std::uint64_t model_instance = 0;
  std::uint64_t model_version = 0;
  std::vector<TokenIds> ids;
  std::vector<Vector> embed_masks;
  BiLstmCache lstm;
  std::vector<Vector> feature_masks;
  std::vector<Vector> features;  // BiLSTM outputs after dropout
  AttentionCache attention;
  std::vector<Vector> attended;  // attention outputs (attention variants only)
};

struct ForwardResult {
  Matrix emissions;  // n × T
  ForwardCache cache;
};

// embeddings → dropout → BiLSTM → dropout → [attention] → projection.
// Dropout draws from `rng` only in train mode.
ForwardResult forward(const Model& model, const TokenSequence& seq, bool train_mode,
                      SeededRng& rng);

// Accumulates gradients for every parameter from dL/dM (and dL/dA for CRF
// variants). Throws DimensionError for a cache from another model or an
// older parameter version.
void backward(Model& model, const ForwardCache& cache, const Matrix& d_emissions,
              const Matrix* d_transitions = nullptr);

struct VariantLoss {
  double loss = 0.0;
  Matrix d_emissions;
  std::optional<Matrix> d_transitions;
};

// CRF variants: sequence NLL. Others: summed per-token cross-entropy.
VariantLoss loss_for_variant(const ModelConfig& config, const Matrix& emissions,
                             const Matrix* transitions, const TagPath& gold);

struct SgdStats {
  double grad_norm = 0.0;  // before clipping
  double scale = 1.0;      // factor applied to the gradients
};

// Global-norm clipping (clip_norm <= 0 or infinite disables it), then
// θ ← θ − lr·g on every non-frozen entry, then zeroed gradients. Throws
// NumericError naming the first tensor with a non-finite gradient.
SgdStats sgd_step(const ParamRefs& params, double learning_rate, double clip_norm);
SgdStats sgd_step(Model& model, double learning_rate, double clip_norm);

TagPath to_tag_ids(const std::vector<BioTag>& tags);
std::vector<BioTag> to_bio_tags(const TagPath& path);

// Eval-mode tagging: Viterbi for CRF variants, per-token argmax otherwise.
std::vector<BioTag> predict(const Model& model, const TokenSequence& seq);

EvalReport evaluate_model(const Model& model, const std::vector<LabeledSequence>& data);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double val_f1 = 0.0;
  double val_label_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

using TrainLog = std::vector<EpochRecord>;

// One line per epoch: epoch<TAB>mean_loss<TAB>val_f1<TAB>val_label_accuracy.
std::string format_log_line(const EpochRecord& r);

struct TrainResult {
  Model final_model;
  Model best_model;
  std::size_t best_epoch = 0;  // 1-based
  TrainLog log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Builds the vocabulary from `train_data`, initializes from config.seed and
// runs config.epochs epochs of seeded-shuffle, batch-size-1 SGD. The best
// snapshot is the epoch with the highest validation F1 (earliest on ties);
// without validation data it is the final epoch.
TrainResult train(const ModelConfig& config, const std::vector<LabeledSequence>& train_data,
                  const std::vector<LabeledSequence>& val_data,
                  const EpochCallback& on_epoch = {});

struct CrossValidation {
  std::vector<EvalReport> folds;
  EvalReport mean;
};

// k = config.folds. Each fold trains on k−1 parts with its own seed derived
// from (config.seed, fold index) and scores its final-epoch model on the
// held-out part. Folds run on up to `parallel` threads; results do not
// depend on the thread count.
CrossValidation cross_validate(const ModelConfig& config,
                               const std::vector<LabeledSequence>& data,
                               std::size_t parallel = 1);

// Rewrites orphan I tags as B.
std::vector<BioTag> repair_bio(const std::vector<BioTag>& tags);

}  // namespace stagger
