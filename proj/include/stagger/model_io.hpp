#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "stagger/model.hpp"

namespace stagger {

inline constexpr int kModelFormatVersion = 1;

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::size_t epochs_completed = 0;
  std::size_t best_epoch = 0;
  std::string snapshot = "best";  // which parameters were stored: best or final

  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

struct LoadedModel {
  Model model;
  TrainingMeta meta;
};

// Model file layout:
//   a text header (magic, format version, config, training metadata,
//   vocabulary, tensor table) terminated by a line "end", followed by each
//   tensor as u64 rows, u64 cols and rows·cols IEEE-754 doubles, all
//   little-endian, row-major, in tensor-table order.
void write_model(std::ostream& out, const Model& model, const TrainingMeta& meta);
void save_model(const std::string& path, const Model& model, const TrainingMeta& meta);

// Throws DataError for a missing file, an unknown format version, or any
// header/shape inconsistency.
LoadedModel read_model(std::istream& in, const std::string& source = "<stream>");
LoadedModel load_model(const std::string& path);

}  // namespace stagger
