#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hardatt {

// One aligned column; an empty side is std::nullopt. Never both empty.
struct AlignmentPair {
  std::optional<char32_t> lemma_char;
  std::optional<char32_t> form_char;

  bool operator==(const AlignmentPair&) const = default;
};

using Alignment = std::vector<AlignmentPair>;

enum class AlignerKind { kNaive, kSmart };

std::string to_string(AlignerKind kind);
AlignerKind parse_aligner_kind(std::string_view name);

// Positional 1-to-1 pairs up to the shorter length, then 1-to-0 or 0-to-1.
Alignment naive_align(std::u32string_view lemma, std::u32string_view form);

// Minimum unit-cost edit alignment. Ties prefer match/substitute, then
// deletion, then insertion, scanning left to right, so 1-to-1 pairs are
// placed as early as possible.
Alignment smart_align(std::u32string_view lemma, std::u32string_view form);

class Aligner {
 public:
  virtual ~Aligner() = default;
  virtual Alignment align(std::u32string_view lemma, std::u32string_view form) const = 0;
  virtual AlignerKind kind() const = 0;
};

std::unique_ptr<Aligner> make_aligner(AlignerKind kind);
Alignment align_with(AlignerKind kind, std::u32string_view lemma, std::u32string_view form);

// Projection and monotonicity: the non-empty sides spell lemma and form.
bool is_valid_alignment(const Alignment& alignment, std::u32string_view lemma,
                        std::u32string_view form);

// Unit edit cost of the alignment (match 0, everything else 1).
std::size_t alignment_cost(const Alignment& alignment);

// "l:f" pairs separated by spaces, "_" for an empty side.
std::string format_alignment(const Alignment& alignment);

}  // namespace hardatt
