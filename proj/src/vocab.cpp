#include "stagger/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "stagger/error.hpp"

namespace stagger {

SymbolTable::SymbolTable() : symbols_{"<pad>", "<unk>"} {}

std::size_t SymbolTable::add(const std::string& symbol) {
  auto [it, inserted] = index_.try_emplace(symbol, symbols_.size());
  if (inserted) symbols_.push_back(symbol);
  return it->second;
}

std::size_t SymbolTable::lookup(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? kUnknown : it->second;
}

bool SymbolTable::contains(std::string_view symbol) const {
  return index_.count(std::string(symbol)) > 0;
}

std::vector<std::string> SymbolTable::real_symbols() const {
  return {symbols_.begin() + 2, symbols_.end()};
}

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead <= 0xF7) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (lead >= 0xF8 || (lead >= 0x80 && lead < 0xC0)) len = 1;
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::string Vocab::normalize(std::string_view word) const {
  std::string w(word);
  if (options_.lowercase_words) {
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  return w;
}

Vocab Vocab::build(const std::vector<LabeledSequence>& train, const VocabOptions& options) {
  if (train.empty()) throw DomainError("cannot build a vocabulary from empty data");
  if (options.min_frequency == 0) throw ConfigError("min_frequency must be at least 1");
  Vocab v;
  v.options_ = options;
  // Ordered map plus first-seen order keeps ids deterministic.
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto& seq : train) {
    for (const auto& tok : seq.tokens) {
      std::string w = v.normalize(tok);
      if (counts[w]++ == 0) order.push_back(w);
      for (const auto& ch : utf8_chars(tok)) v.chars_.add(ch);
    }
  }
  for (const auto& w : order) {
    if (counts[w] >= options.min_frequency) v.words_.add(w);
  }
  return v;
}

Vocab Vocab::from_symbols(const std::vector<std::string>& words,
                          const std::vector<std::string>& chars,
                          const VocabOptions& options) {
  Vocab v;
  v.options_ = options;
  for (const auto& w : words) v.words_.add(w);
  for (const auto& c : chars) v.chars_.add(c);
  if (v.words_.size() != words.size() + 2 || v.chars_.size() != chars.size() + 2) {
    throw DataError("duplicate symbols in stored vocabulary");
  }
  return v;
}

std::size_t Vocab::word_id(std::string_view word) const {
  return words_.lookup(normalize(word));
}

std::vector<std::size_t> Vocab::char_ids(std::string_view word) const {
  std::vector<std::size_t> ids;
  for (const auto& ch : utf8_chars(word)) ids.push_back(chars_.lookup(ch));
  return ids;
}

}  // namespace stagger
