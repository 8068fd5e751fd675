#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hardatt/corpus.hpp"
#include "hardatt/transducer.hpp"
#include "hardatt/unicode.hpp"

namespace testing {

inline std::u32string u(std::string_view s) { return hardatt::utf8_decode(s); }
inline std::string s8(std::u32string_view s) { return hardatt::utf8_encode(s); }

// Small seeded generator for property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  std::u32string string(std::u32string_view alphabet, std::size_t min_len, std::size_t max_len) {
    const std::size_t len = min_len + index(max_len - min_len + 1);
    std::u32string out;
    for (std::size_t k = 0; k < len; ++k) out += alphabet[index(alphabet.size())];
    return out;
  }

  // A form related to the lemma by a few random edits, so alignments mix
  // matches, substitutions, deletions and insertions.
  std::u32string mutate(std::u32string lemma, std::u32string_view alphabet, std::size_t edits) {
    for (std::size_t e = 0; e < edits; ++e) {
      const std::size_t kind = index(3);
      if (kind == 0 || lemma.empty()) {
        lemma.insert(lemma.begin() + static_cast<std::ptrdiff_t>(index(lemma.size() + 1)),
                     alphabet[index(alphabet.size())]);
      } else if (kind == 1) {
        lemma.erase(index(lemma.size()), 1);
      } else {
        lemma[index(lemma.size())] = alphabet[index(alphabet.size())];
      }
    }
    return lemma;
  }

  std::mt19937_64 rng;
};

inline hardatt::Sample sample(std::string_view lemma, std::string_view form,
                              std::vector<std::string> features = {"V", "PST"}) {
  return {u(lemma), std::move(features), u(form)};
}

inline hardatt::ModelConfig tiny_config(hardatt::Arch arch, std::size_t hidden = 6,
                                        bool extended = true) {
  hardatt::ModelConfig config;
  config.arch = arch;
  config.hidden = hidden;
  config.embedding = 5;
  config.feature_embedding = 3;
  config.extended = extended;
  return config;
}

// Brute-force edit distance by plain recursion.
inline std::size_t naive_edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::size_t sub = naive_edit_distance(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
  const std::size_t del = naive_edit_distance(a.substr(1), b) + 1;
  const std::size_t ins = naive_edit_distance(a, b.substr(1)) + 1;
  return std::min({sub, del, ins});
}

}  // namespace testing
