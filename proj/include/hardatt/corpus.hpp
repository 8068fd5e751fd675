#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hardatt {

// One lemma/features/form triple. `features` keeps file order so that
// parse -> serialize -> parse is the identity.
struct Sample {
  std::u32string lemma;
  std::vector<std::string> features;
  std::optional<std::u32string> form;

  bool operator==(const Sample&) const = default;
};

using Dataset = std::vector<Sample>;

// Parses "lemma<TAB>form<TAB>f1;f2;..." lines (or "lemma<TAB>f1;..." when
// `has_form` is false). Errors carry the 1-based line number.
Dataset parse_dataset_text(std::string_view text, bool has_form);
Dataset parse_dataset(const std::filesystem::path& path, bool has_form);
// Infers the layout from the column count of the first non-empty line.
Dataset parse_dataset_text(std::string_view text);
Dataset parse_dataset(const std::filesystem::path& path);

// True when every sample carries a form (and there is at least one sample).
bool has_forms(const Dataset& samples);

std::string serialize_dataset(const Dataset& samples, bool has_form);

// Writes to a temporary file next to `path` and renames it into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

// A character after vocabulary lookup. Out-of-vocabulary characters get
// id kUnk but keep the raw character so it can be copied verbatim.
struct Symbol {
  std::size_t id = 0;
  char32_t ch = 0;

  bool oov() const;
};

class CharVocabulary {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::size_t kBos = 1;
  static constexpr std::size_t kEos = 2;
  static constexpr std::size_t kFirstChar = 3;

  CharVocabulary() = default;
  // Sorted by code point and deduplicated.
  explicit CharVocabulary(std::vector<char32_t> chars);

  // Total id count, sentinels included.
  std::size_t size() const { return kFirstChar + chars_.size(); }
  std::size_t num_chars() const { return chars_.size(); }
  const std::vector<char32_t>& chars() const { return chars_; }

  bool contains(char32_t ch) const;
  // 0-based position among real characters.
  std::optional<std::size_t> char_index(char32_t ch) const;
  std::size_t id(char32_t ch) const;
  char32_t char_at(std::size_t char_index) const { return chars_.at(char_index); }

  Symbol lookup(char32_t ch) const;
  std::vector<Symbol> encode(std::u32string_view text) const;

  bool operator==(const CharVocabulary&) const = default;

 private:
  std::vector<char32_t> chars_;
};

class FeatureAlphabet {
 public:
  FeatureAlphabet() = default;
  // Sorted lexicographically and deduplicated.
  explicit FeatureAlphabet(std::vector<std::string> features);

  std::size_t size() const { return features_.size(); }
  const std::vector<std::string>& features() const { return features_; }

  // Index of `feature`, or kUnknown (== size()) for a feature never seen in
  // training. The UNK slot contributes nothing to feature encodings.
  std::size_t index(const std::string& feature) const;
  std::size_t unknown_slot() const { return features_.size(); }

  // Indices of known features; unseen ones are logged once and skipped.
  std::vector<std::size_t> known_indices(const std::vector<std::string>& features) const;

  bool operator==(const FeatureAlphabet&) const = default;

 private:
  std::vector<std::string> features_;
};

std::pair<CharVocabulary, FeatureAlphabet> build_vocab(const Dataset& train);

}  // namespace hardatt
