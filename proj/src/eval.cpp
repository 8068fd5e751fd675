#include "hardatt/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hardatt {

double accuracy(const std::vector<std::u32string>& gold, const std::vector<std::u32string>& pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("accuracy: gold has " + std::to_string(gold.size()) +
                                " items, prediction has " + std::to_string(pred.size()));
  }
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < gold.size(); ++k) correct += gold[k] == pred[k] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double mean_levenshtein(const std::vector<std::u32string>& gold,
                        const std::vector<std::u32string>& pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("mean_levenshtein: length mismatch");
  }
  if (gold.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    total += static_cast<double>(levenshtein(gold[k], pred[k]));
  }
  return total / static_cast<double>(gold.size());
}

EvalReport macro_report(const std::vector<LanguageResult>& results) {
  if (results.empty()) throw std::invalid_argument("macro_report: no languages");
  EvalReport report;
  report.languages = results;
  std::map<std::string, std::size_t> slot;
  for (const auto& result : results) {
    auto [it, inserted] = slot.emplace(result.setting, report.macro.size());
    if (inserted) report.macro.push_back({result.setting, 0, 0.0, 0.0});
    auto& row = report.macro[it->second];
    ++row.languages;
    row.accuracy += result.accuracy;
    row.mean_levenshtein += result.mean_levenshtein;
  }
  for (auto& row : report.macro) {
    row.accuracy /= static_cast<double>(row.languages);
    row.mean_levenshtein /= static_cast<double>(row.languages);
  }
  return report;
}

namespace {

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

std::string pad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

std::string lpad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

}  // namespace

std::string render_tsv(const EvalReport& report) {
  std::string out = "language\tsetting\taccuracy\tlevenshtein\n";
  for (const auto& row : report.languages) {
    out += row.language + '\t' + row.setting + '\t' + fixed(row.accuracy, 4) + '\t' +
           fixed(row.mean_levenshtein, 4) + '\n';
  }
  for (const auto& row : report.macro) {
    out += "macro\t" + row.setting + '\t' + fixed(row.accuracy, 4) + '\t' +
           fixed(row.mean_levenshtein, 4) + '\n';
  }
  return out;
}

std::string render_table(const EvalReport& report) {
  std::string out = pad("Setting", 10) + lpad("Langs", 6) + lpad("Acc", 8) + lpad("Lev", 8) + '\n';
  out += std::string(32, '-') + '\n';
  for (const auto& row : report.macro) {
    out += pad(row.setting, 10) + lpad(std::to_string(row.languages), 6) +
           lpad(fixed(100.0 * row.accuracy, 1), 8) + lpad(fixed(row.mean_levenshtein, 2), 8) + '\n';
  }
  return out;
}

}  // namespace hardatt
