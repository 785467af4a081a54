#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stagger/params.hpp"
#include "stagger/vocab.hpp"

namespace stagger {

// Learned word and character lookup tables.
struct EmbeddingTable {
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t num_words, std::size_t word_dim, std::size_t num_chars,
                 std::size_t char_dim);

  ParamTensor words;
  ParamTensor chars;

  std::size_t word_dim() const { return words.value.cols(); }
  std::size_t char_dim() const { return chars.value.cols(); }
  std::size_t output_dim() const { return word_dim() + char_dim(); }

  void init(SeededRng& rng);
  ParamRefs refs() { return {&words, &chars}; }
};

struct TokenIds {
  std::size_t word = SymbolTable::kUnknown;
  std::vector<std::size_t> chars;
};

TokenIds token_ids(const Vocab& vocab, std::string_view word);

// Mean of the character rows. Throws DomainError for an empty id list.
Vector char_encode(const Matrix& char_table, std::span<const std::size_t> char_ids);
Vector char_encode(const Vocab& vocab, const Matrix& char_table, std::string_view word);

// [word row ; char_encode(word)]
Vector embed_token(const Vocab& vocab, const EmbeddingTable& tables, std::string_view word);
Vector embed_ids(const EmbeddingTable& tables, const TokenIds& ids);

// Scatters `grad` (length output_dim) into the touched word and char rows.
void embed_backward(EmbeddingTable& tables, const TokenIds& ids, std::span<const double> grad);

}  // namespace stagger
