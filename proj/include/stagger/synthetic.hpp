#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stagger/corpus.hpp"

namespace stagger {

struct SyntheticOptions {
  std::size_t num_titles = 2000;
  std::size_t num_brands = 200;
  // Share of titles that carry no brand at all.
  double unbranded_fraction = 0.1;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<std::string> brands;  // multi-token brand names
  std::vector<LabeledSequence> data;
};

// Templated product titles: one multi-token brand from a fixed lexicon placed
// at the start, after a few filler tokens, or at the end, surrounded by
// product filler (nouns, adjectives, sizes, model numbers). Brand tokens and
// filler tokens are disjoint. The lexicon always contains "Woodland Imports",
// "Home Essentials" and "Plum Island Silver".
SyntheticCorpus generate_synthetic(const SyntheticOptions& options);

// Filler vocabulary the generator draws from (no brand tokens).
const std::vector<std::string>& synthetic_filler_words();

}  // namespace stagger
