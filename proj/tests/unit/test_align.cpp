#include <doctest.h>

#include "hardatt/align.hpp"
#include "hardatt/eval.hpp"
#include "support.hpp"

using namespace hardatt;
using testing::u;

namespace {

AlignmentPair pair(char32_t l, char32_t f) {
  return {l ? std::optional<char32_t>(l) : std::nullopt, f ? std::optional<char32_t>(f) : std::nullopt};
}

}  // namespace

TEST_CASE("smart alignment of fliegen and flog") {
  const Alignment expected = {pair('f', 'f'), pair('l', 'l'), pair('i', 'o'), pair('e', 0),
                              pair('g', 'g'), pair('e', 0),   pair('n', 0)};
  CHECK(smart_align(U"fliegen", U"flog") == expected);
  CHECK(format_alignment(expected) == "f:f l:l i:o e:_ g:g e:_ n:_");
}

TEST_CASE("naive alignment pairs positions then pads") {
  const Alignment expected = {pair('f', 'f'), pair('l', 'l'), pair('i', 'o'), pair('e', 'g'),
                              pair('g', 0),   pair('e', 0),   pair('n', 0)};
  CHECK(naive_align(U"fliegen", U"flog") == expected);
  CHECK(naive_align(U"ab", U"abcd").back() == pair(0, 'd'));
}

TEST_CASE("identical strings align by matches only") {
  const auto a = smart_align(U"gehen", U"gehen");
  CHECK(a.size() == 5);
  CHECK(alignment_cost(a) == 0);
}

TEST_CASE("a prefixed character is inserted first") {
  const auto a = smart_align(U"abc", U"xabc");
  REQUIRE(a.size() == 4);
  CHECK(a[0] == pair(0, 'x'));
  CHECK(alignment_cost(a) == 1);
}

TEST_CASE("empty form aligns every lemma character to nothing") {
  for (auto kind : {AlignerKind::kNaive, AlignerKind::kSmart}) {
    const auto a = align_with(kind, U"abc", U"");
    CHECK(a.size() == 3);
    CHECK(is_valid_alignment(a, U"abc", U""));
  }
}

TEST_CASE("aligner names round-trip") {
  for (auto kind : {AlignerKind::kNaive, AlignerKind::kSmart}) {
    CHECK(parse_aligner_kind(to_string(kind)) == kind);
    CHECK(make_aligner(kind)->kind() == kind);
  }
  CHECK_THROWS(parse_aligner_kind("greedy"));
}

TEST_CASE("property: both aligners project onto lemma and form") {
  testing::Gen gen(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto lemma = gen.string(U"abcde", 1, 9);
    const auto form = gen.coin() ? gen.mutate(lemma, U"abcdef", 1 + gen.index(4)) : gen.string(U"abcde", 0, 9);
    CHECK(is_valid_alignment(naive_align(lemma, form), lemma, form));
    CHECK(is_valid_alignment(smart_align(lemma, form), lemma, form));
  }
}

TEST_CASE("property: smart alignment cost equals the edit distance") {
  testing::Gen gen(22);
  for (int trial = 0; trial < 1500; ++trial) {
    const auto lemma = gen.string(U"abc", 1, 6);
    const auto form = gen.string(U"abc", 0, 6);
    const auto a = smart_align(lemma, form);
    CHECK(alignment_cost(a) == testing::naive_edit_distance(lemma, form));
    CHECK(alignment_cost(a) <= alignment_cost(naive_align(lemma, form)));
  }
}

TEST_CASE("property: no alignment pair is empty on both sides") {
  testing::Gen gen(23);
  for (int trial = 0; trial < 500; ++trial) {
    const auto lemma = gen.string(U"xyz", 1, 7);
    const auto form = gen.string(U"xyz", 0, 7);
    for (const auto& p : smart_align(lemma, form)) CHECK((p.lemma_char || p.form_char));
  }
}
