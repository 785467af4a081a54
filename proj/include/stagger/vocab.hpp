#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stagger/corpus.hpp"

namespace stagger {

// Dense symbol table with two reserved ids.
class SymbolTable {
 public:
  static constexpr std::size_t kPadding = 0;
  static constexpr std::size_t kUnknown = 1;

  SymbolTable();

  // Returns the id of `symbol`, inserting it if new.
  std::size_t add(const std::string& symbol);
  // kUnknown for symbols not in the table.
  std::size_t lookup(std::string_view symbol) const;
  bool contains(std::string_view symbol) const;

  // Includes the two reserved entries.
  std::size_t size() const { return symbols_.size(); }
  // Real symbols in id order, reserved entries excluded.
  std::vector<std::string> real_symbols() const;
  const std::string& symbol(std::size_t id) const { return symbols_.at(id); }

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct VocabOptions {
  std::size_t min_frequency = 1;
  bool lowercase_words = false;
  std::string attribute = "attribute";
};

// Symbol index spaces for one attribute model.
class Vocab {
 public:
  Vocab() = default;

  // Built from the training split only.
  static Vocab build(const std::vector<LabeledSequence>& train, const VocabOptions& options);

  // Reassembles a vocabulary from stored symbol lists (model loading).
  static Vocab from_symbols(const std::vector<std::string>& words,
                            const std::vector<std::string>& chars,
                            const VocabOptions& options);

  std::size_t word_id(std::string_view word) const;
  // Code-point ids; unseen characters map to the unknown id.
  std::vector<std::size_t> char_ids(std::string_view word) const;

  const SymbolTable& words() const { return words_; }
  const SymbolTable& chars() const { return chars_; }
  const VocabOptions& options() const { return options_; }
  std::size_t num_tags() const { return kNumBioTags; }
  std::string tag_name(BioTag tag) const { return tag_to_string(tag, options_.attribute); }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.words_ == b.words_ && a.chars_ == b.chars_ &&
           a.options_.min_frequency == b.options_.min_frequency &&
           a.options_.lowercase_words == b.options_.lowercase_words &&
           a.options_.attribute == b.options_.attribute;
  }

 private:
  std::string normalize(std::string_view word) const;

  SymbolTable words_;
  SymbolTable chars_;
  VocabOptions options_;
};

// Splits UTF-8 text into code points, each returned as its byte sequence.
// Invalid bytes are returned one at a time.
std::vector<std::string> utf8_chars(std::string_view text);

}  // namespace stagger
