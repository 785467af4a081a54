#include "stagger/model_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "stagger/error.hpp"

namespace stagger {
namespace {

constexpr const char* kMagic = "stagger-model";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& source) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw DataError(source + ": truncated tensor data");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

class HeaderReader {
 public:
  HeaderReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string line() {
    std::string l;
    if (!std::getline(in_, l)) throw DataError(source_ + ": truncated header");
    ++line_no_;
    return l;
  }

  // Reads "<key> <value>" and checks the key.
  std::string expect(const std::string& key) {
    const std::string l = line();
    if (l.compare(0, key.size() + 1, key + " ") != 0) {
      fail("expected '" + key + "'");
    }
    return l.substr(key.size() + 1);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(source_ + ": header line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

std::uint64_t parse_uint(const std::string& s, const HeaderReader& r) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) r.fail("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    r.fail("bad integer '" + s + "'");
  }
}

double parse_double(const std::string& s, const HeaderReader& r) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) r.fail("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    r.fail("bad number '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const HeaderReader& r) {
  if (s == "1") return true;
  if (s == "0") return false;
  r.fail("bad flag '" + s + "'");
}

std::vector<std::string> read_symbols(HeaderReader& r, const std::string& key) {
  const std::size_t count = parse_uint(r.expect(key), r);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(r.line());
  return out;
}

}  // namespace

void write_model(std::ostream& out, const Model& model, const TrainingMeta& meta) {
  const ModelConfig& c = model.config();
  std::ostringstream h;
  h << kMagic << "\n";
  h << "version " << kModelFormatVersion << "\n";
  h << "variant " << variant_name(c.variant) << "\n";
  h << "word_dim " << c.word_dim << "\n";
  h << "char_dim " << c.char_dim << "\n";
  h << "hidden " << c.hidden << "\n";
  h << "attention_dim " << c.attention_dim << "\n";
  h << "dropout " << format_double(c.dropout) << "\n";
  h << "learning_rate " << format_double(c.learning_rate) << "\n";
  h << "clip_norm " << format_double(c.clip_norm) << "\n";
  h << "epochs " << c.epochs << "\n";
  h << "folds " << c.folds << "\n";
  h << "seed " << c.seed << "\n";
  h << "min_frequency " << c.min_frequency << "\n";
  h << "lowercase " << (c.lowercase ? 1 : 0) << "\n";
  h << "constrain_bio " << (c.constrain_bio ? 1 : 0) << "\n";
  h << "attribute " << c.attribute << "\n";
  h << "meta_seed " << meta.seed << "\n";
  h << "meta_epochs_completed " << meta.epochs_completed << "\n";
  h << "meta_best_epoch " << meta.best_epoch << "\n";
  h << "meta_snapshot " << meta.snapshot << "\n";
  const auto words = model.vocab().words().real_symbols();
  h << "words " << words.size() << "\n";
  for (const auto& w : words) h << w << "\n";
  const auto chars = model.vocab().chars().real_symbols();
  h << "chars " << chars.size() << "\n";
  for (const auto& ch : chars) h << ch << "\n";
  const auto params = model.params();
  h << "tensors " << params.size() << "\n";
  for (const ParamTensor* p : params) {
    h << "tensor " << p->name << " " << p->value.rows() << " " << p->value.cols() << "\n";
  }
  h << "end\n";
  out << h.str();
  for (const ParamTensor* p : params) {
    put_u64(out, p->value.rows());
    put_u64(out, p->value.cols());
    for (double v : p->value.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
}

void save_model(const std::string& path, const Model& model, const TrainingMeta& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  write_model(out, model, meta);
  out.flush();
  if (!out) throw DataError("write failed: " + path);
}

LoadedModel read_model(std::istream& in, const std::string& source) {
  HeaderReader r(in, source);
  if (r.line() != kMagic) r.fail("not a model file");
  const std::uint64_t version = parse_uint(r.expect("version"), r);
  if (version != kModelFormatVersion) {
    r.fail("unsupported model format version " + std::to_string(version) + " (this build reads " +
           std::to_string(kModelFormatVersion) + ")");
  }
  ModelConfig c;
  try {
    c.variant = parse_variant(r.expect("variant"));
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  c.word_dim = parse_uint(r.expect("word_dim"), r);
  c.char_dim = parse_uint(r.expect("char_dim"), r);
  c.hidden = parse_uint(r.expect("hidden"), r);
  c.attention_dim = parse_uint(r.expect("attention_dim"), r);
  c.dropout = parse_double(r.expect("dropout"), r);
  c.learning_rate = parse_double(r.expect("learning_rate"), r);
  c.clip_norm = parse_double(r.expect("clip_norm"), r);
  c.epochs = parse_uint(r.expect("epochs"), r);
  c.folds = parse_uint(r.expect("folds"), r);
  c.seed = parse_uint(r.expect("seed"), r);
  c.min_frequency = parse_uint(r.expect("min_frequency"), r);
  c.lowercase = parse_bool(r.expect("lowercase"), r);
  c.constrain_bio = parse_bool(r.expect("constrain_bio"), r);
  c.attribute = r.expect("attribute");
  TrainingMeta meta;
  meta.seed = parse_uint(r.expect("meta_seed"), r);
  meta.epochs_completed = parse_uint(r.expect("meta_epochs_completed"), r);
  meta.best_epoch = parse_uint(r.expect("meta_best_epoch"), r);
  meta.snapshot = r.expect("meta_snapshot");
  const auto words = read_symbols(r, "words");
  const auto chars = read_symbols(r, "chars");

  std::optional<Model> model;
  try {
    model.emplace(c, Vocab::from_symbols(words, chars, c.vocab_options()));
  } catch (const ConfigError& e) {
    r.fail(std::string("invalid stored config: ") + e.what());
  }
  ParamRefs params = model->params();
  const std::size_t count = parse_uint(r.expect("tensors"), r);
  if (count != params.size()) {
    r.fail("file has " + std::to_string(count) + " tensors, config implies " +
           std::to_string(params.size()));
  }
  for (ParamTensor* p : params) {
    std::istringstream ls(r.expect("tensor"));
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(ls >> name >> rows >> cols)) r.fail("bad tensor entry");
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols()) {
      r.fail("tensor " + name + " " + shape_string(rows, cols) + " does not match expected " +
             p->name + " " + p->value.shape_string());
    }
  }
  if (r.line() != "end") r.fail("expected 'end'");
  for (ParamTensor* p : params) {
    const std::uint64_t rows = get_u64(in, source), cols = get_u64(in, source);
    if (rows != p->value.rows() || cols != p->value.cols()) {
      throw DataError(source + ": tensor " + p->name + " data is prefixed " +
                      shape_string(rows, cols) + ", header says " + p->value.shape_string());
    }
    for (double& v : p->value.data()) v = std::bit_cast<double>(get_u64(in, source));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(source + ": trailing bytes after tensor data");
  }
  return {std::move(*model), meta};
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  return read_model(in, path);
}

}  // namespace stagger
