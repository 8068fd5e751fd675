#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hardatt/corpus.hpp"

namespace hardatt {

enum class RuleKind { kSuffix, kPrefix, kAblaut };

struct SynthRule {
  RuleKind kind = RuleKind::kSuffix;
  std::u32string from;  // ablaut only
  std::u32string to;    // affix, or ablaut replacement

  std::u32string apply(std::u32string_view stem) const;
};

// "V;PST=ablaut:i>o+suffix:te" : features V and PST, ablaut then suffix.
struct SynthParadigm {
  std::vector<std::string> features;
  std::vector<SynthRule> rules;

  std::u32string inflect(std::u32string_view lemma) const;
};

SynthParadigm parse_paradigm(std::string_view text);

struct SynthConfig {
  std::vector<SynthParadigm> paradigms;
  std::size_t train_size = 100;
  std::size_t dev_size = 50;
  std::size_t test_size = 50;
  std::uint64_t seed = 1;
  std::u32string consonants = U"bdfgklmnprstz";
  std::u32string vowels = U"aeiou";
  std::size_t min_syllables = 2;
  std::size_t max_syllables = 3;
};

struct SynthLanguage {
  Dataset train;
  Dataset dev;
  Dataset test;
};

// Every sample has its own stem; stems are unique across all three splits.
SynthLanguage synth_language(const SynthConfig& config);

// Writes <dir>/train.tsv, dev.tsv and test.tsv (all with gold forms).
void write_language(const SynthLanguage& language, const std::filesystem::path& dir);

}  // namespace hardatt
