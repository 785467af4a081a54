#include "stagger/embedding.hpp"

#include "stagger/error.hpp"

namespace stagger {

EmbeddingTable::EmbeddingTable(std::size_t num_words, std::size_t word_dim,
                               std::size_t num_chars, std::size_t char_dim)
    : words("embed.words", num_words, word_dim), chars("embed.chars", num_chars, char_dim) {}

void EmbeddingTable::init(SeededRng& rng) {
  init_uniform_scaled(words.value, rng);
  init_uniform_scaled(chars.value, rng);
}

TokenIds token_ids(const Vocab& vocab, std::string_view word) {
  return {vocab.word_id(word), vocab.char_ids(word)};
}

Vector char_encode(const Matrix& char_table, std::span<const std::size_t> char_ids) {
  if (char_ids.empty()) throw DomainError("char_encode of an empty word");
  Vector out(char_table.cols(), 0.0);
  for (std::size_t id : char_ids) {
    if (id >= char_table.rows()) throw RangeError("char id " + std::to_string(id) + " out of range");
    auto row = char_table.row(id);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(char_ids.size());
  for (double& v : out) v *= inv;
  return out;
}

Vector char_encode(const Vocab& vocab, const Matrix& char_table, std::string_view word) {
  return char_encode(char_table, vocab.char_ids(word));
}

Vector embed_ids(const EmbeddingTable& tables, const TokenIds& ids) {
  if (ids.word >= tables.words.value.rows()) {
    throw RangeError("word id " + std::to_string(ids.word) + " out of range");
  }
  Vector out;
  out.reserve(tables.output_dim());
  auto row = tables.words.value.row(ids.word);
  out.assign(row.begin(), row.end());
  Vector ch = char_encode(tables.chars.value, ids.chars);
  out.insert(out.end(), ch.begin(), ch.end());
  return out;
}

Vector embed_token(const Vocab& vocab, const EmbeddingTable& tables, std::string_view word) {
  return embed_ids(tables, token_ids(vocab, word));
}

void embed_backward(EmbeddingTable& tables, const TokenIds& ids, std::span<const double> grad) {
  const std::size_t wd = tables.word_dim();
  const std::size_t cd = tables.char_dim();
  if (grad.size() != wd + cd) {
    throw DimensionError("embed_backward: gradient length " + std::to_string(grad.size()) +
                         ", expected " + std::to_string(wd + cd));
  }
  auto wrow = tables.words.grad.row(ids.word);
  for (std::size_t k = 0; k < wd; ++k) wrow[k] += grad[k];
  const double inv = 1.0 / static_cast<double>(ids.chars.size());
  for (std::size_t id : ids.chars) {
    auto crow = tables.chars.grad.row(id);
    for (std::size_t k = 0; k < cd; ++k) crow[k] += grad[wd + k] * inv;
  }
}

}  // namespace stagger
