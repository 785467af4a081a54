#include "stagger/synthetic.hpp"

#include <set>

#include "stagger/error.hpp"

namespace stagger {
namespace {

const std::vector<std::string> kSyllables = {
    "bel", "mor", "vik", "zan", "tor", "ril", "qua", "dex", "lum", "sar", "nov", "kel",
    "pra", "gol", "fin", "ost", "var", "ley", "cru", "mit", "dal", "rho", "sen", "wyn"};

const std::vector<std::string> kBrandSuffixes = {
    "Imports", "Essentials", "Labs",  "Works",     "Outfitters", "Brands", "Trading",
    "Goods",   "Supply",     "Craft", "Designs",   "Collective", "Studio", "Company",
    "Mills",   "Forge",      "Home",  "Silver",    "Island",     "Plum",   "Woodland"};

const std::vector<std::string> kNouns = {
    "Bottle", "Pad",    "Vase",   "Lamp",    "Mug",     "Cable",  "Charger", "Shirt",
    "Blanket", "Pillow", "Kettle", "Skillet", "Bowl",    "Jar",    "Basket",  "Towel",
    "Curtain", "Rug",    "Clock",  "Mirror",  "Candle",  "Frame",  "Cuff",    "Piece",
    "Sugar",  "Creamer", "Bed",   "Leash",   "Collar",  "Speaker", "Headphones", "Case"};

const std::vector<std::string> kAdjectives = {
    "Decorative", "Cooling",  "White",   "Black",    "Large",    "Small",   "Stainless",
    "Sterling",   "Ceramic",  "Wooden",  "Portable", "Wireless", "Organic", "Vintage",
    "Modern",     "Classic",  "Deluxe",  "Round",    "Square",   "Soft",    "Fairy",
    "Ear",        "Self",     "Dog",     "Pet",      "Kitchen",  "Outdoor", "Blue"};

const std::vector<std::string> kSizes = {"12oz", "3-Pack", "XL", "16in", "2-Piece",
                                         "500ml", "Queen", "King", "6ft", "Set", "&"};

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string pseudo_word(SeededRng& rng) {
  const std::size_t parts = 2 + rng.below(2);
  std::string w;
  for (std::size_t i = 0; i < parts; ++i) w += kSyllables[rng.below(kSyllables.size())];
  return capitalize(w);
}

std::string model_number(SeededRng& rng) {
  static const std::string kAlnum = "ABCDEFGHJKLMNPRSTUVWXYZ0123456789";
  std::string s;
  const std::size_t len = 5 + rng.below(3);
  for (std::size_t i = 0; i < len; ++i) s += kAlnum[rng.below(kAlnum.size())];
  return s;
}

template <typename T>
const T& pick(const std::vector<T>& v, SeededRng& rng) {
  return v[rng.below(v.size())];
}

std::string filler_token(SeededRng& rng) {
  const std::uint64_t k = rng.below(10);
  if (k < 4) return pick(kAdjectives, rng);
  if (k < 8) return pick(kNouns, rng);
  if (k < 9) return pick(kSizes, rng);
  return model_number(rng);
}

}  // namespace

const std::vector<std::string>& synthetic_filler_words() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w = kNouns;
    w.insert(w.end(), kAdjectives.begin(), kAdjectives.end());
    w.insert(w.end(), kSizes.begin(), kSizes.end());
    return w;
  }();
  return words;
}

SyntheticCorpus generate_synthetic(const SyntheticOptions& options) {
  if (options.num_brands < 3) throw ConfigError("synthetic corpus needs at least 3 brands");
  if (!(options.unbranded_fraction >= 0.0 && options.unbranded_fraction < 1.0)) {
    throw ConfigError("unbranded fraction must lie in [0, 1)");
  }
  SeededRng rng(options.seed);
  SyntheticCorpus corpus;
  std::set<std::string> seen = {"Woodland Imports", "Home Essentials", "Plum Island Silver"};
  corpus.brands = {"Woodland Imports", "Home Essentials", "Plum Island Silver"};
  while (corpus.brands.size() < options.num_brands) {
    std::string brand;
    switch (rng.below(3)) {
      case 0:
        brand = pseudo_word(rng) + " " + pick(kBrandSuffixes, rng);
        break;
      case 1:
        brand = pseudo_word(rng) + " " + pseudo_word(rng);
        break;
      default:
        brand = pseudo_word(rng) + " " + pseudo_word(rng) + " " + pick(kBrandSuffixes, rng);
        break;
    }
    if (seen.insert(brand).second) corpus.brands.push_back(brand);
  }

  corpus.data.reserve(options.num_titles);
  for (std::size_t n = 0; n < options.num_titles; ++n) {
    const std::size_t filler_count = 2 + rng.below(5);
    TokenSequence tokens;
    for (std::size_t i = 0; i < filler_count; ++i) tokens.push_back(filler_token(rng));

    if (rng.uniform() < options.unbranded_fraction) {
      corpus.data.push_back({tokens, encode_bio(tokens, std::nullopt)});
      continue;
    }
    const TokenSequence brand = tokenize(pick(corpus.brands, rng));
    const double placement = rng.uniform();
    std::size_t at = 0;
    if (placement < 0.6) {
      at = 0;
    } else if (placement < 0.9) {
      at = 1 + rng.below(std::min<std::size_t>(2, filler_count));
    } else {
      at = filler_count;
    }
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), brand.begin(), brand.end());
    const Span span{at, at + brand.size()};
    corpus.data.push_back({tokens, encode_bio(tokens, span)});
  }
  return corpus;
}

}  // namespace stagger
