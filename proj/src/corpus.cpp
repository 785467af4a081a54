#include "stagger/corpus.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "stagger/error.hpp"

namespace stagger {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TokenSequence tokenize(std::string_view title) {
  TokenSequence tokens;
  std::size_t i = 0;
  while (i < title.size()) {
    while (i < title.size() && is_space(title[i])) ++i;
    std::size_t j = i;
    while (j < title.size() && !is_space(title[j])) ++j;
    if (j > i) tokens.emplace_back(title.substr(i, j - i));
    i = j;
  }
  if (tokens.empty()) throw DomainError("empty title");
  return tokens;
}

std::vector<BioTag> encode_bio(const TokenSequence& seq, std::optional<Span> span) {
  std::vector<BioTag> tags(seq.size(), BioTag::O);
  if (!span) return tags;
  if (span->start >= span->end || span->end > seq.size()) {
    throw RangeError("span [" + std::to_string(span->start) + ", " +
                     std::to_string(span->end) + ") invalid for " +
                     std::to_string(seq.size()) + " tokens");
  }
  tags[span->start] = BioTag::B;
  for (std::size_t i = span->start + 1; i < span->end; ++i) tags[i] = BioTag::I;
  return tags;
}

std::vector<Span> tag_spans(const std::vector<BioTag>& tags) {
  std::vector<Span> spans;
  std::optional<std::size_t> open;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    switch (tags[i]) {
      case BioTag::B:
        if (open) spans.push_back({*open, i});
        open = i;
        break;
      case BioTag::I:
        if (!open) open = i;  // orphan I
        break;
      case BioTag::O:
        if (open) spans.push_back({*open, i});
        open.reset();
        break;
    }
  }
  if (open) spans.push_back({*open, tags.size()});
  return spans;
}

std::string join_tokens(const TokenSequence& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<Extraction> decode_spans(const TokenSequence& seq,
                                     const std::vector<BioTag>& tags) {
  if (seq.size() != tags.size()) {
    throw DimensionError("decode_spans: " + std::to_string(seq.size()) + " tokens but " +
                         std::to_string(tags.size()) + " tags");
  }
  std::vector<Extraction> out;
  for (const Span& s : tag_spans(tags)) out.push_back({s, join_tokens(seq, s.start, s.end)});
  return out;
}

std::string tag_to_string(BioTag tag, const std::string& attribute) {
  switch (tag) {
    case BioTag::B:
      return "B-" + attribute;
    case BioTag::I:
      return "I-" + attribute;
    case BioTag::O:
      return "O";
  }
  return "O";
}

std::optional<BioTag> tag_from_string(std::string_view s, const std::string& attribute) {
  if (s == "O") return BioTag::O;
  if (s.size() == attribute.size() + 2 && s[1] == '-' && s.substr(2) == attribute) {
    if (s[0] == 'B') return BioTag::B;
    if (s[0] == 'I') return BioTag::I;
  }
  return std::nullopt;
}

std::vector<LabeledSequence> parse_conll(std::string_view text, const std::string& source,
                                         const std::string& attribute) {
  std::vector<LabeledSequence> data;
  LabeledSequence current;
  std::size_t line_no = 0;
  bool previous_blank = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      if (current.tokens.empty()) {
        throw ParseError(source, line_no,
                         previous_blank ? "empty record (consecutive blank lines)"
                                        : "empty record (blank line before any token)");
      }
      data.push_back(std::move(current));
      current = {};
      previous_blank = true;
      continue;
    }
    previous_blank = false;

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(source, line_no, "expected exactly two tab-separated fields");
    }
    std::string_view token = line.substr(0, tab);
    std::string_view tag_text = line.substr(tab + 1);
    if (token.empty()) throw ParseError(source, line_no, "empty token");
    for (char c : token) {
      if (is_space(c)) throw ParseError(source, line_no, "token contains whitespace");
    }
    auto tag = tag_from_string(tag_text, attribute);
    if (!tag) {
      throw ParseError(source, line_no, "unknown tag '" + std::string(tag_text) + "'");
    }
    current.tokens.emplace_back(token);
    current.tags.push_back(*tag);
  }
  if (!current.tokens.empty()) data.push_back(std::move(current));
  return data;
}

std::vector<LabeledSequence> read_conll(const std::string& path,
                                        const std::string& attribute) {
  return parse_conll(read_file(path), path, attribute);
}

std::string format_conll(const std::vector<LabeledSequence>& data,
                         const std::string& attribute) {
  std::string out;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto& seq = data[s];
    if (seq.tokens.size() != seq.tags.size()) {
      throw DimensionError("sequence " + std::to_string(s) + " has " +
                           std::to_string(seq.tokens.size()) + " tokens but " +
                           std::to_string(seq.tags.size()) + " tags");
    }
    if (s > 0) out += '\n';
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
      out += seq.tokens[i];
      out += '\t';
      out += tag_to_string(seq.tags[i], attribute);
      out += '\n';
    }
  }
  return out;
}

void write_conll(const std::string& path, const std::vector<LabeledSequence>& data,
                 const std::string& attribute) {
  const std::string text = format_conll(data, attribute);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void require_nonempty_dataset(std::size_t n) {
  if (n == 0) throw DomainError("empty dataset");
}

SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratios sum to " + std::to_string(sum) + ", expected 1");
  }
  // The small slack keeps products such as 10 * 0.2 from flooring to 1.
  const auto part = [n](double r) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  SplitSizes s;
  s.val = part(ratios[1]);
  s.test = part(ratios[2]);
  s.train = n - s.val - s.test;
  return s;
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n,
                                                      const std::array<double, 3>& ratios,
                                                      SeededRng& rng) {
  const SplitSizes sizes = split_sizes(n, ratios);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::array<std::vector<std::size_t>, 3> parts;
  parts[0].assign(order.begin(), order.begin() + sizes.train);
  parts[1].assign(order.begin() + sizes.train, order.begin() + sizes.train + sizes.val);
  parts[2].assign(order.begin() + sizes.train + sizes.val, order.end());
  return parts;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    SeededRng& rng) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2, got " + std::to_string(k));
  if (k > n) {
    throw ConfigError("k-fold with k = " + std::to_string(k) + " needs at least k items, got " +
                      std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return folds;
}

}  // namespace stagger
