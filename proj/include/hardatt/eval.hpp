#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hardatt {

// Exact-match fraction. Throws std::invalid_argument on length mismatch.
double accuracy(const std::vector<std::u32string>& gold, const std::vector<std::u32string>& pred);

// Unit-cost edit distance over Unicode scalar values.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

double mean_levenshtein(const std::vector<std::u32string>& gold,
                        const std::vector<std::u32string>& pred);

struct LanguageResult {
  std::string language;
  std::string setting;  // low | medium | high
  double accuracy = 0.0;
  double mean_levenshtein = 0.0;
};

struct SettingAverage {
  std::string setting;
  std::size_t languages = 0;
  double accuracy = 0.0;
  double mean_levenshtein = 0.0;
};

struct EvalReport {
  std::vector<LanguageResult> languages;
  std::vector<SettingAverage> macro;  // one row per setting, in first-seen order
};

// Unweighted mean over languages, grouped by setting. Requires >= 1 language.
EvalReport macro_report(const std::vector<LanguageResult>& results);

// Tab-separated per-language rows followed by "macro" rows.
std::string render_tsv(const EvalReport& report);
// Fixed-width table of macro averages per setting (accuracy in percent).
std::string render_table(const EvalReport& report);

}  // namespace hardatt
