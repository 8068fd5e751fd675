#include <doctest.h>

#include <algorithm>

#include "hardatt/ensemble.hpp"
#include "hardatt/errors.hpp"
#include "support.hpp"

using namespace hardatt;
using testing::u;

namespace {

Vote v(std::string_view text, double acc) { return {u(text), acc}; }

// A table where member m predicts row m of `dev` and `test` strings.
PredictionTable table_of(const std::vector<Member>& members, const std::vector<std::string>& gold,
                         const std::vector<std::vector<std::string>>& preds) {
  Dataset dev;
  for (const auto& g : gold) dev.push_back({u("lemma" + g), {"V"}, u(g)});
  std::vector<std::vector<Prediction>> rows;
  for (const auto& row : preds) {
    std::vector<Prediction> r;
    for (const auto& p : row) r.push_back(p == "-" ? Prediction() : Prediction(u(p)));
    rows.push_back(r);
  }
  return PredictionTable(members, dev, dev, rows, rows);
}

Member member(std::string name, double acc, Arch arch, AlignerKind aligner) {
  return {std::move(name), acc, false, arch, aligner};
}

double exact(const std::vector<std::u32string>& pred, const std::vector<std::string>& gold) {
  std::size_t hits = 0;
  for (std::size_t k = 0; k < gold.size(); ++k) hits += pred[k] == u(gold[k]);
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

}  // namespace

TEST_CASE("vote: single model and simple majority") {
  CHECK(vote({v("flog", 0.1)}) == U"flog");
  CHECK(vote({v("flog", 0.2), v("flog", 0.1), v("flug", 0.9)}) == U"flog");
}

TEST_CASE("vote: ties go to the candidate of the most accurate model") {
  CHECK(vote({v("flug", 0.5), v("flog", 0.8), v("flug", 0.4), v("flog", 0.3)}) == U"flog");
  CHECK(vote({v("flug", 0.5), v("flog", 0.5)}) == U"flug");
}

TEST_CASE("vote: abstentions are skipped") {
  CHECK(vote({{std::nullopt, 1.0}, v("a", 0.1)}) == U"a");
  CHECK(vote({{std::nullopt, 1.0}}) == std::nullopt);
}

TEST_CASE("MAX picks the best dev accuracy and breaks ties toward the later candidate") {
  Candidate n{"N", {}, {}, {}, 0.5};
  Candidate s{"S", {}, {}, {}, 0.4};
  CHECK(max_strategy({n, s}).label == "N");
  s.dev_accuracy = 0.5;
  CHECK(max_strategy({n, s}).label == "S");
}

TEST_CASE("ENSEMBLE_n keeps exactly the n best members") {
  testing::Gen gen(61);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Member> members;
    const std::size_t size = 1 + gen.index(12);
    for (std::size_t k = 0; k < size; ++k) {
      members.push_back(member("m" + std::to_string(k), static_cast<double>(gen.index(5)) / 4.0, Arch::kHaem,
                               AlignerKind::kSmart));
    }
    const auto table = table_of(members, {"x"}, std::vector<std::vector<std::string>>(size, {"x"}));
    std::vector<std::size_t> all(size);
    for (std::size_t k = 0; k < size; ++k) all[k] = k;
    const std::size_t n = 1 + gen.index(15);
    const auto chosen = select_n_best(table, all, n);
    CHECK(chosen.size() == std::min(n, size));
    CHECK(std::is_sorted(chosen.begin(), chosen.end()));
    double lowest_chosen = 2.0, highest_left = -1.0;
    for (std::size_t k = 0; k < size; ++k) {
      const bool in = std::find(chosen.begin(), chosen.end(), k) != chosen.end();
      if (in) {
        lowest_chosen = std::min(lowest_chosen, members[k].dev_accuracy);
      } else {
        highest_left = std::max(highest_left, members[k].dev_accuracy);
      }
    }
    CHECK(lowest_chosen >= highest_left);
  }
}

TEST_CASE("ENSEMBLE_n ties keep registration order") {
  std::vector<Member> members{member("a", 0.5, Arch::kHaem, AlignerKind::kSmart),
                              member("b", 0.9, Arch::kHaem, AlignerKind::kSmart),
                              member("c", 0.5, Arch::kHaem, AlignerKind::kSmart)};
  const auto table = table_of(members, {"x"}, {{"x"}, {"x"}, {"x"}});
  CHECK(select_n_best(table, {0, 1, 2}, 2) == std::vector<std::size_t>{0, 1});
  CHECK(select_n_best(table, {0, 1, 2}, 10).size() == 3);
}

TEST_CASE("run strategies compose the cells") {
  const std::vector<std::string> gold{"a", "b", "c", "d"};
  std::vector<Member> members{
      member("cm-n", 0.5, Arch::kHacm, AlignerKind::kNaive), member("cm-s", 0.25, Arch::kHacm, AlignerKind::kSmart),
      member("em-n", 0.75, Arch::kHaem, AlignerKind::kNaive), member("em-s", 1.0, Arch::kHaem, AlignerKind::kSmart)};
  const auto table = table_of(members, gold,
                              {{"a", "b", "x", "x"}, {"a", "x", "x", "x"}, {"a", "b", "c", "x"}, {"a", "b", "c", "d"}});
  CHECK(run_strategy(1, table).dev_accuracy == 0.5);
  CHECK(run_strategy(3, table).dev_accuracy == 1.0);
  CHECK(run_strategy(3, table).label == "E(S_EM)");
  CHECK(run_strategy(5, table).label == "E(S_EM)");
  const auto six = run_strategy(6, table);
  CHECK(six.members.size() == 4);
  CHECK(run_strategy(7, table).dev_accuracy >= std::max(run_strategy(5, table).dev_accuracy, six.dev_accuracy));
  for (int run = 1; run <= kNumRuns; ++run) CHECK_FALSE(describe_run(run).empty());
  CHECK_THROWS_AS(describe_run(8), ConfigError);
}

TEST_CASE("Run 7 picks Run 5 when it is better on dev") {
  const std::vector<std::string> gold{"a", "b", "c"};
  // The single best model wins Run 5; a three-way majority of weak models
  // drags ENSEMBLE_15 down.
  std::vector<Member> members{
      member("cm-n", 0.1, Arch::kHacm, AlignerKind::kNaive), member("cm-s", 0.1, Arch::kHacm, AlignerKind::kSmart),
      member("em-n", 0.1, Arch::kHaem, AlignerKind::kNaive), member("em-s", 1.0, Arch::kHaem, AlignerKind::kSmart)};
  const auto table =
      table_of(members, gold, {{"x", "y", "z"}, {"x", "y", "z"}, {"x", "y", "z"}, {"a", "b", "c"}});
  const auto five = run_strategy(5, table);
  const auto six = run_strategy(6, table);
  CHECK(five.dev_accuracy > six.dev_accuracy);
  const auto seven = run_strategy(7, table);
  CHECK(seven.label == "run5");
  CHECK(seven.dev == five.dev);
}

TEST_CASE("a missing cell is named") {
  std::vector<Member> members{member("cm-n", 0.5, Arch::kHacm, AlignerKind::kNaive)};
  const auto table = table_of(members, {"a"}, {{"a"}});
  try {
    run_strategy(1, table);
    FAIL("expected a missing-cell error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("hacm-smart") != std::string::npos);
  }
}

TEST_CASE("external predictions join the edit sub-ensembles and abstain when missing") {
  const std::vector<std::string> gold{"a", "b"};
  std::vector<Member> members{
      member("cm-n", 0.0, Arch::kHacm, AlignerKind::kNaive), member("cm-s", 0.0, Arch::kHacm, AlignerKind::kSmart),
      member("em-n", 0.5, Arch::kHaem, AlignerKind::kNaive), member("em-s", 0.5, Arch::kHaem, AlignerKind::kSmart),
      {"external", 0.9, true}};
  const auto table =
      table_of(members, gold, {{"x", "x"}, {"x", "x"}, {"a", "x"}, {"a", "x"}, {"-", "b"}});
  CHECK(table.external_index() == 4);
  const auto six = run_strategy(6, table);
  CHECK(std::find(six.members.begin(), six.members.end(), 4) != six.members.end());
  CHECK(six.dev[0] == U"a");
  const auto five = run_strategy(5, table);
  CHECK(five.dev_accuracy == 1.0);
}

TEST_CASE("all-abstain samples fall back to the lemma") {
  std::vector<Member> members{{"external", 0.9, true}};
  const auto table = table_of(members, {"a"}, {{"-"}});
  CHECK(vote_ensemble(table, "ext", {0}).dev[0] == U"lemmaa");
}

TEST_CASE("MAX returns an argmax member on random pools") {
  testing::Gen gen(62);
  const std::vector<std::string> gold{"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Member> members;
    std::vector<std::vector<std::string>> preds;
    for (Arch arch : {Arch::kHacm, Arch::kHaem}) {
      for (AlignerKind kind : {AlignerKind::kNaive, AlignerKind::kSmart}) {
        for (std::size_t k = 0, n = 1 + gen.index(3); k < n; ++k) {
          members.push_back(member("m", gen.real(0, 1), arch, kind));
          std::vector<std::string> row;
          for (const auto& g : gold) row.push_back(gen.coin(0.6) ? g : "x");
          preds.push_back(row);
        }
      }
    }
    const auto table = table_of(members, gold, preds);
    const auto chosen = run_strategy(5, table);
    double best = 0;
    for (auto cell : {table.cell(Arch::kHacm, AlignerKind::kNaive), table.cell(Arch::kHacm, AlignerKind::kSmart),
                      table.cell(Arch::kHaem, AlignerKind::kNaive), table.cell(Arch::kHaem, AlignerKind::kSmart)}) {
      best = std::max(best, exact(vote_ensemble(table, "c", cell).dev, gold));
    }
    CHECK(chosen.dev_accuracy == best);
    CHECK(exact(chosen.dev, gold) == best);
  }
}

TEST_CASE("prediction tables validate their shape") {
  Dataset dev{{U"a", {"V"}, U"a"}};
  CHECK_THROWS_AS(PredictionTable({member("m", 0.1, Arch::kHaem, AlignerKind::kSmart)}, dev, dev, {}, {}),
                  ConfigError);
}
