#include "hardatt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hardatt/errors.hpp"
#include "hardatt/log.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

}  // namespace

Dataset parse_dataset_text(std::string_view text, bool has_form) {
  Dataset samples;
  const std::size_t expected_columns = has_form ? 3 : 2;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto columns = split(line, '\t');
    if (columns.size() != expected_columns) {
      throw DataError(line_error(line_no, "expected " + std::to_string(expected_columns) +
                                              " tab-separated columns, found " +
                                              std::to_string(columns.size())));
    }
    Sample sample;
    try {
      sample.lemma = utf8_decode(columns[0]);
      if (has_form) sample.form = utf8_decode(columns[1]);
    } catch (const DataError& e) {
      throw DataError(line_error(line_no, e.what()));
    }
    if (sample.lemma.empty()) throw DataError(line_error(line_no, "empty lemma"));
    for (std::string_view feature : split(columns.back(), ';')) {
      if (feature.empty()) throw DataError(line_error(line_no, "empty feature tag"));
      sample.features.emplace_back(feature);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Dataset parse_dataset_text(std::string_view text) {
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    return parse_dataset_text(text, split(line, '\t').size() == 3);
  }
  return {};
}

Dataset parse_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset_text(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

bool has_forms(const Dataset& samples) {
  return !samples.empty() &&
         std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.form.has_value(); });
}

Dataset parse_dataset(const std::filesystem::path& path, bool has_form) {
  try {
    return parse_dataset_text(read_text_file(path), has_form);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string serialize_dataset(const Dataset& samples, bool has_form) {
  std::string out;
  for (const auto& sample : samples) {
    out += utf8_encode(sample.lemma);
    out += '\t';
    if (has_form) {
      out += utf8_encode(sample.form.value_or(U""));
      out += '\t';
    }
    for (std::size_t k = 0; k < sample.features.size(); ++k) {
      if (k) out += ';';
      out += sample.features[k];
    }
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

bool Symbol::oov() const { return id == CharVocabulary::kUnk; }

CharVocabulary::CharVocabulary(std::vector<char32_t> chars) : chars_(std::move(chars)) {
  std::sort(chars_.begin(), chars_.end());
  chars_.erase(std::unique(chars_.begin(), chars_.end()), chars_.end());
}

std::optional<std::size_t> CharVocabulary::char_index(char32_t ch) const {
  const auto it = std::lower_bound(chars_.begin(), chars_.end(), ch);
  if (it == chars_.end() || *it != ch) return std::nullopt;
  return static_cast<std::size_t>(it - chars_.begin());
}

bool CharVocabulary::contains(char32_t ch) const { return char_index(ch).has_value(); }

std::size_t CharVocabulary::id(char32_t ch) const {
  const auto index = char_index(ch);
  return index ? kFirstChar + *index : kUnk;
}

Symbol CharVocabulary::lookup(char32_t ch) const { return Symbol{id(ch), ch}; }

std::vector<Symbol> CharVocabulary::encode(std::u32string_view text) const {
  std::vector<Symbol> out;
  out.reserve(text.size());
  for (char32_t ch : text) out.push_back(lookup(ch));
  return out;
}

FeatureAlphabet::FeatureAlphabet(std::vector<std::string> features)
    : features_(std::move(features)) {
  std::sort(features_.begin(), features_.end());
  features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
}

std::size_t FeatureAlphabet::index(const std::string& feature) const {
  const auto it = std::lower_bound(features_.begin(), features_.end(), feature);
  if (it == features_.end() || *it != feature) return unknown_slot();
  return static_cast<std::size_t>(it - features_.begin());
}

std::vector<std::size_t> FeatureAlphabet::known_indices(
    const std::vector<std::string>& features) const {
  std::vector<std::size_t> out;
  out.reserve(features.size());
  for (const auto& feature : features) {
    const auto slot = index(feature);
    if (slot == unknown_slot()) {
      log_once(LogLevel::kWarn, "unseen-feature:" + feature,
               "feature '" + feature + "' not seen in training; mapped to UNK");
      continue;
    }
    out.push_back(slot);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::pair<CharVocabulary, FeatureAlphabet> build_vocab(const Dataset& train) {
  std::set<char32_t> chars;
  std::set<std::string> features;
  for (const auto& sample : train) {
    chars.insert(sample.lemma.begin(), sample.lemma.end());
    if (sample.form) chars.insert(sample.form->begin(), sample.form->end());
    features.insert(sample.features.begin(), sample.features.end());
  }
  return {CharVocabulary({chars.begin(), chars.end()}),
          FeatureAlphabet({features.begin(), features.end()})};
}

}  // namespace hardatt
