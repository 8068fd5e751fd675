#include "hardatt/align.hpp"

#include <algorithm>

#include "hardatt/errors.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {

std::string to_string(AlignerKind kind) {
  return kind == AlignerKind::kNaive ? "naive" : "smart";
}

AlignerKind parse_aligner_kind(std::string_view name) {
  if (name == "naive") return AlignerKind::kNaive;
  if (name == "smart") return AlignerKind::kSmart;
  throw ConfigError("unknown aligner '" + std::string(name) + "' (expected naive|smart)");
}

Alignment naive_align(std::u32string_view lemma, std::u32string_view form) {
  const std::size_t length = std::max(lemma.size(), form.size());
  Alignment out;
  out.reserve(length);
  for (std::size_t k = 0; k < length; ++k) {
    AlignmentPair pair;
    if (k < lemma.size()) pair.lemma_char = lemma[k];
    if (k < form.size()) pair.form_char = form[k];
    out.push_back(pair);
  }
  return out;
}

Alignment smart_align(std::u32string_view lemma, std::u32string_view form) {
  const std::size_t n = lemma.size();
  const std::size_t m = form.size();
  // suffix[i][j] = edit distance between lemma[i:] and form[j:].
  std::vector<std::size_t> suffix((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return suffix[i * (m + 1) + j]; };
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n) {
        at(i, j) = m - j;
      } else if (j == m) {
        at(i, j) = n - i;
      } else {
        const std::size_t sub = at(i + 1, j + 1) + (lemma[i] == form[j] ? 0 : 1);
        at(i, j) = std::min({sub, at(i + 1, j) + 1, at(i, j + 1) + 1});
      }
    }
  }

  Alignment out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    const std::size_t here = at(i, j);
    if (i < n && j < m && at(i + 1, j + 1) + (lemma[i] == form[j] ? 0 : 1) == here) {
      out.push_back({lemma[i], form[j]});
      ++i;
      ++j;
    } else if (i < n && at(i + 1, j) + 1 == here) {
      out.push_back({lemma[i], std::nullopt});
      ++i;
    } else {
      out.push_back({std::nullopt, form[j]});
      ++j;
    }
  }
  return out;
}

namespace {

class NaiveAligner final : public Aligner {
 public:
  Alignment align(std::u32string_view lemma, std::u32string_view form) const override {
    return naive_align(lemma, form);
  }
  AlignerKind kind() const override { return AlignerKind::kNaive; }
};

class SmartAligner final : public Aligner {
 public:
  Alignment align(std::u32string_view lemma, std::u32string_view form) const override {
    return smart_align(lemma, form);
  }
  AlignerKind kind() const override { return AlignerKind::kSmart; }
};

}  // namespace

std::unique_ptr<Aligner> make_aligner(AlignerKind kind) {
  if (kind == AlignerKind::kNaive) return std::make_unique<NaiveAligner>();
  return std::make_unique<SmartAligner>();
}

Alignment align_with(AlignerKind kind, std::u32string_view lemma, std::u32string_view form) {
  return kind == AlignerKind::kNaive ? naive_align(lemma, form) : smart_align(lemma, form);
}

bool is_valid_alignment(const Alignment& alignment, std::u32string_view lemma,
                        std::u32string_view form) {
  std::u32string lemma_side;
  std::u32string form_side;
  for (const auto& pair : alignment) {
    if (!pair.lemma_char && !pair.form_char) return false;
    if (pair.lemma_char) lemma_side.push_back(*pair.lemma_char);
    if (pair.form_char) form_side.push_back(*pair.form_char);
  }
  return lemma_side == lemma && form_side == form;
}

std::size_t alignment_cost(const Alignment& alignment) {
  std::size_t cost = 0;
  for (const auto& pair : alignment) {
    if (!(pair.lemma_char && pair.form_char && *pair.lemma_char == *pair.form_char)) ++cost;
  }
  return cost;
}

std::string format_alignment(const Alignment& alignment) {
  std::string out;
  for (std::size_t k = 0; k < alignment.size(); ++k) {
    if (k) out += ' ';
    const auto& pair = alignment[k];
    out += pair.lemma_char ? utf8_encode(*pair.lemma_char) : "_";
    out += ':';
    out += pair.form_char ? utf8_encode(*pair.form_char) : "_";
  }
  return out;
}

}  // namespace hardatt
