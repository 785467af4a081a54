#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagger/rng.hpp"

namespace stagger {

using TokenSequence = std::vector<std::string>;

// Tag ids are the enum values; the CRF sees them as 0..T-1.
enum class BioTag : std::uint8_t { B = 0, I = 1, O = 2 };

inline constexpr std::size_t kNumBioTags = 3;

struct LabeledSequence {
  TokenSequence tokens;
  std::vector<BioTag> tags;

  friend bool operator==(const LabeledSequence&, const LabeledSequence&) = default;
};

// Half-open token range [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Extraction {
  Span span;
  std::string text;

  friend bool operator==(const Extraction&, const Extraction&) = default;
};

// Splits on runs of ASCII whitespace. Throws DomainError when no token remains.
TokenSequence tokenize(std::string_view title);

// B at span.start, I inside, O elsewhere; all O without a span.
std::vector<BioTag> encode_bio(const TokenSequence& seq, std::optional<Span> span);

// Maximal B I* runs become spans. An I that follows O or the sequence start
// opens a new span (IOB2-style repair).
std::vector<Extraction> decode_spans(const TokenSequence& seq,
                                     const std::vector<BioTag>& tags);

// Spans only, for callers that do not need the text.
std::vector<Span> tag_spans(const std::vector<BioTag>& tags);

std::string tag_to_string(BioTag tag, const std::string& attribute = "attribute");
std::optional<BioTag> tag_from_string(std::string_view s,
                                      const std::string& attribute = "attribute");

// token<TAB>tag per line, one blank line between sequences.
std::vector<LabeledSequence> read_conll(const std::string& path,
                                        const std::string& attribute = "attribute");
std::vector<LabeledSequence> parse_conll(std::string_view text,
                                         const std::string& source = "<memory>",
                                         const std::string& attribute = "attribute");
void write_conll(const std::string& path, const std::vector<LabeledSequence>& data,
                 const std::string& attribute = "attribute");
std::string format_conll(const std::vector<LabeledSequence>& data,
                         const std::string& attribute = "attribute");

// Raw title file: one title per line, returned verbatim (minus a trailing CR).
std::vector<std::string> read_lines(const std::string& path);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

// Sizes for a three-way split: val and test are floored, the remainder goes
// to train. Throws ConfigError unless the ratios are non-negative and sum to 1.
SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& ratios);

// Index-level split after a seeded shuffle: [train | val | test].
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n,
                                                      const std::array<double, 3>& ratios,
                                                      SeededRng& rng);

// Held-out index sets for k folds after a seeded shuffle. The first n mod k
// folds receive one extra item.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    SeededRng& rng);

template <typename T>
struct DatasetSplit {
  std::vector<T> train, val, test;
};

template <typename T>
struct Fold {
  std::vector<T> train, held_out;
};

template <typename T>
std::vector<T> gather(const std::vector<T>& data, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(data[i]);
  return out;
}

void require_nonempty_dataset(std::size_t n);

template <typename T>
DatasetSplit<T> split_dataset(const std::vector<T>& data,
                              const std::array<double, 3>& ratios, SeededRng& rng) {
  require_nonempty_dataset(data.size());
  auto parts = split_indices(data.size(), ratios, rng);
  return {gather(data, parts[0]), gather(data, parts[1]), gather(data, parts[2])};
}

template <typename T>
std::vector<Fold<T>> kfold(const std::vector<T>& data, std::size_t k, SeededRng& rng) {
  auto held = kfold_indices(data.size(), k, rng);
  std::vector<Fold<T>> folds;
  folds.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_idx.insert(train_idx.end(), held[g].begin(), held[g].end());
    }
    folds.push_back({gather(data, train_idx), gather(data, held[f])});
  }
  return folds;
}

// Joins tokens with single spaces.
std::string join_tokens(const TokenSequence& tokens, std::size_t begin, std::size_t end);

}  // namespace stagger
