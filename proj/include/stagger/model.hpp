#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "stagger/attention.hpp"
#include "stagger/embedding.hpp"
#include "stagger/lstm.hpp"
#include "stagger/projection.hpp"
#include "stagger/vocab.hpp"

namespace stagger {

enum class Variant { BiLstm, BiLstmAttn, BiLstmCrf, BiLstmCrfAttn };

std::string variant_name(Variant v);
// Accepts bilstm, bilstm-attn, bilstm-crf, bilstm-crf-attn.
Variant parse_variant(const std::string& name);
bool uses_crf(Variant v);
bool uses_attention(Variant v);

struct ModelConfig {
  Variant variant = Variant::BiLstmCrf;
  std::size_t word_dim = 100;
  std::size_t char_dim = 25;
  std::size_t hidden = 100;
  std::size_t attention_dim = 0;  // 0 means "same as hidden"
  double dropout = 0.2;
  double learning_rate = 0.01;
  double clip_norm = 5.0;
  std::size_t epochs = 200;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::size_t min_frequency = 1;
  bool lowercase = false;
  bool constrain_bio = false;
  std::string attribute = "attribute";

  // Throws ConfigError on any invalid field.
  void validate() const;
  std::size_t effective_attention_dim() const { return attention_dim ? attention_dim : hidden; }
  VocabOptions vocab_options() const { return {min_frequency, lowercase, attribute}; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Fresh id on construction and on every copy, so a cache can tell which
// parameter object produced it.
class InstanceId {
 public:
  InstanceId() : value_(next()) {}
  InstanceId(const InstanceId&) : value_(next()) {}
  InstanceId& operator=(const InstanceId&) {
    value_ = next();
    return *this;
  }
  std::uint64_t value() const { return value_; }

 private:
  static std::uint64_t next();
  std::uint64_t value_;
};

// All parameters of one network, shaped by the config variant and vocab.
class Model {
 public:
  Model(ModelConfig config, Vocab vocab);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  std::size_t num_tags() const { return vocab_.num_tags(); }

  // Scaled-uniform weights, zero biases (forget gate 1), zero transitions
  // apart from forbidden entries.
  void init(SeededRng& rng);

  // Every learnable tensor in a fixed order; names are unique.
  ParamRefs params();
  std::vector<const ParamTensor*> params() const;
  void zero_grad();

  std::uint64_t instance() const { return id_.value(); }
  std::uint64_t version() const { return version_; }
  void bump_version() { ++version_; }

  EmbeddingTable embed;
  LstmParams fwd;
  LstmParams bwd;
  std::optional<AttentionParams> attention;
  ProjectionParams projection;
  std::optional<ParamTensor> transitions;

 private:
  ModelConfig config_;
  Vocab vocab_;
  InstanceId id_;
  std::uint64_t version_ = 0;
};

}  // namespace stagger
