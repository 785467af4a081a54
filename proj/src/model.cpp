#include "stagger/model.hpp"

#include <atomic>
#include <cmath>

#include "stagger/crf.hpp"
#include "stagger/dropout.hpp"
#include "stagger/error.hpp"

namespace stagger {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::BiLstm:
      return "bilstm";
    case Variant::BiLstmAttn:
      return "bilstm-attn";
    case Variant::BiLstmCrf:
      return "bilstm-crf";
    case Variant::BiLstmCrfAttn:
      return "bilstm-crf-attn";
  }
  return "bilstm";
}

Variant parse_variant(const std::string& name) {
  if (name == "bilstm") return Variant::BiLstm;
  if (name == "bilstm-attn") return Variant::BiLstmAttn;
  if (name == "bilstm-crf") return Variant::BiLstmCrf;
  if (name == "bilstm-crf-attn") return Variant::BiLstmCrfAttn;
  throw ConfigError("unknown variant '" + name +
                    "' (expected bilstm, bilstm-attn, bilstm-crf or bilstm-crf-attn)");
}

bool uses_crf(Variant v) { return v == Variant::BiLstmCrf || v == Variant::BiLstmCrfAttn; }
bool uses_attention(Variant v) { return v == Variant::BiLstmAttn || v == Variant::BiLstmCrfAttn; }

void ModelConfig::validate() const {
  if (word_dim == 0 || char_dim == 0 || hidden == 0) {
    throw ConfigError("embedding and hidden sizes must be positive");
  }
  validate_dropout_rate(dropout);
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be a finite non-negative number");
  }
  if (!(clip_norm > 0.0)) throw ConfigError("clip norm must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (min_frequency == 0) throw ConfigError("min_frequency must be at least 1");
  if (attribute.empty()) throw ConfigError("attribute name must not be empty");
  for (char c : attribute) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw ConfigError("attribute name must not contain whitespace");
    }
  }
}

std::uint64_t InstanceId::next() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

Model::Model(ModelConfig config, Vocab vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  const std::size_t in = config_.word_dim + config_.char_dim;
  const std::size_t h = config_.hidden;
  const std::size_t t = vocab_.num_tags();
  embed = EmbeddingTable(vocab_.words().size(), config_.word_dim, vocab_.chars().size(),
                         config_.char_dim);
  fwd = LstmParams("lstm.fwd", in, h);
  bwd = LstmParams("lstm.bwd", in, h);
  if (uses_attention(config_.variant)) {
    attention.emplace("attention", 2 * h, config_.effective_attention_dim(), 2 * h);
  }
  projection = ProjectionParams("projection", 2 * h, t);
  if (uses_crf(config_.variant)) {
    transitions.emplace("crf.transitions", t + 2, t + 2);
    transitions->frozen = transition_frozen_mask(t, config_.constrain_bio);
    apply_transition_mask(transitions->value, transitions->frozen);
  }
}

void Model::init(SeededRng& rng) {
  embed.init(rng);
  fwd.init(rng);
  bwd.init(rng);
  if (attention) attention->init(rng);
  projection.init(rng);
  if (transitions) {
    transitions->value.fill(0.0);
    apply_transition_mask(transitions->value, transitions->frozen);
  }
  zero_grad();
}

ParamRefs Model::params() {
  ParamRefs refs = embed.refs();
  for (ParamTensor* p : fwd.refs()) refs.push_back(p);
  for (ParamTensor* p : bwd.refs()) refs.push_back(p);
  if (attention) {
    for (ParamTensor* p : attention->refs()) refs.push_back(p);
  }
  for (ParamTensor* p : projection.refs()) refs.push_back(p);
  if (transitions) refs.push_back(&*transitions);
  return refs;
}

std::vector<const ParamTensor*> Model::params() const {
  ParamRefs refs = const_cast<Model*>(this)->params();
  return {refs.begin(), refs.end()};
}

void Model::zero_grad() {
  for (ParamTensor* p : params()) p->zero_grad();
}

}  // namespace stagger
