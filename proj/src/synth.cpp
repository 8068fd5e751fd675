#include "hardatt/synth.hpp"

#include <random>
#include <unordered_set>

#include "hardatt/errors.hpp"
#include "hardatt/numcore/random.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {

std::u32string SynthRule::apply(std::u32string_view stem) const {
  switch (kind) {
    case RuleKind::kSuffix: return std::u32string(stem) + to;
    case RuleKind::kPrefix: return to + std::u32string(stem);
    case RuleKind::kAblaut: {
      std::u32string out;
      std::size_t pos = 0;
      while (pos < stem.size()) {
        if (stem.substr(pos, from.size()) == from) {
          out += to;
          pos += from.size();
        } else {
          out += stem[pos++];
        }
      }
      return out;
    }
  }
  return std::u32string(stem);
}

std::u32string SynthParadigm::inflect(std::u32string_view lemma) const {
  std::u32string form(lemma);
  for (const auto& rule : rules) form = rule.apply(form);
  return form;
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

SynthRule parse_rule(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("rule '" + text + "' lacks ':'");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  SynthRule rule;
  if (kind == "suffix" || kind == "prefix") {
    if (arg.empty()) throw ConfigError("rule '" + text + "' has an empty affix");
    rule.kind = kind == "suffix" ? RuleKind::kSuffix : RuleKind::kPrefix;
    rule.to = utf8_decode(arg);
  } else if (kind == "ablaut") {
    auto gt = arg.find('>');
    if (gt == std::string::npos || gt == 0) throw ConfigError("ablaut rule '" + text + "' must read from>to");
    rule.kind = RuleKind::kAblaut;
    rule.from = utf8_decode(arg.substr(0, gt));
    rule.to = utf8_decode(arg.substr(gt + 1));
  } else {
    throw ConfigError("unknown rule kind '" + kind + "'");
  }
  return rule;
}

}  // namespace

SynthParadigm parse_paradigm(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("paradigm '" + std::string(text) + "' lacks '='");
  SynthParadigm paradigm;
  paradigm.features = split(text.substr(0, eq), ';');
  for (const auto& f : paradigm.features) {
    if (f.empty()) throw ConfigError("paradigm '" + std::string(text) + "' has an empty feature");
  }
  for (const auto& rule : split(text.substr(eq + 1), '+')) paradigm.rules.push_back(parse_rule(rule));
  return paradigm;
}

SynthLanguage synth_language(const SynthConfig& config) {
  if (config.paradigms.empty()) throw ConfigError("synthetic language needs at least one paradigm");
  if (config.consonants.empty() || config.vowels.empty()) throw ConfigError("empty phoneme inventory");
  if (config.min_syllables < 1 || config.min_syllables > config.max_syllables) {
    throw ConfigError("invalid syllable range");
  }
  const std::size_t total = config.train_size + config.dev_size + config.test_size;

  std::mt19937_64 rng(config.seed);
  std::unordered_set<std::u32string> seen;
  std::vector<Sample> samples;
  samples.reserve(total);
  std::size_t attempts = 0;
  while (samples.size() < total) {
    if (++attempts > 100 * total + 1000) {
      throw ConfigError("cannot draw " + std::to_string(total) + " unique stems from the inventory");
    }
    const std::size_t syllables =
        config.min_syllables + nc::uniform_index(rng, config.max_syllables - config.min_syllables + 1);
    std::u32string stem;
    for (std::size_t s = 0; s < syllables; ++s) {
      stem += config.consonants[nc::uniform_index(rng, config.consonants.size())];
      stem += config.vowels[nc::uniform_index(rng, config.vowels.size())];
    }
    if (!seen.insert(stem).second) continue;
    const auto& paradigm = config.paradigms[nc::uniform_index(rng, config.paradigms.size())];
    samples.push_back({stem, paradigm.features, paradigm.inflect(stem)});
  }

  SynthLanguage language;
  auto first = samples.begin();
  language.train.assign(first, first + config.train_size);
  first += config.train_size;
  language.dev.assign(first, first + config.dev_size);
  first += config.dev_size;
  language.test.assign(first, samples.end());
  return language;
}

void write_language(const SynthLanguage& language, const std::filesystem::path& dir) {
  write_text_atomic(dir / "train.tsv", serialize_dataset(language.train, true));
  write_text_atomic(dir / "dev.tsv", serialize_dataset(language.dev, true));
  write_text_atomic(dir / "test.tsv", serialize_dataset(language.test, true));
}

}  // namespace hardatt
