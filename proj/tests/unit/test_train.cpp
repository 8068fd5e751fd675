#include <doctest.h>

#include <algorithm>
#include <limits>

#include "hardatt/checkpoint.hpp"
#include "hardatt/decode.hpp"
#include "hardatt/errors.hpp"
#include "hardatt/oracle.hpp"
#include "hardatt/train.hpp"
#include "support.hpp"

using namespace hardatt;
using testing::u;

namespace {

Dataset identity_language(std::uint64_t seed, std::size_t n) {
  testing::Gen gen(seed);
  Dataset out;
  while (out.size() < n) {
    const auto stem = gen.string(U"abcde", 2, 4);
    out.push_back({stem, {"V"}, stem});
  }
  return out;
}

// Every form is the stem plus "s", so a lemma fallback is never right.
Dataset suffix_language(std::uint64_t seed, std::size_t n) {
  Dataset out = identity_language(seed, n);
  for (auto& sample : out) sample.form = sample.lemma + U"s";
  return out;
}

TrainConfig quick_config(std::size_t epochs, std::uint64_t seed = 1) {
  TrainConfig config;
  config.max_epochs = epochs;
  config.patience = epochs;
  config.dropout = 0.0;
  config.seed = seed;
  config.optimizer.learning_rate = 0.01;
  return config;
}

ModelConfig small(Arch arch) {
  ModelConfig mc = testing::tiny_config(arch, 16);
  mc.embedding = 12;
  return mc;
}

}  // namespace

TEST_CASE("post-filter replaces capped or repetitive predictions with the lemma") {
  CHECK(has_repeat_run(U"aaaaaaaaaa"));
  CHECK_FALSE(has_repeat_run(U"aaaaaaaaa"));
  CHECK_FALSE(has_repeat_run(U""));
  CHECK(has_repeat_run(U"xyzzzzzzzzzzz"));

  DecodeResult capped{U"abc", {}, TerminatedBy::kLengthCap, false};
  CHECK(post_filter(capped, U"lemma") == U"lemma");
  CHECK(capped.filtered);

  DecodeResult repeating{U"gooooooooooo", {}, TerminatedBy::kEndAction, false};
  CHECK(post_filter(repeating, U"go") == U"go");

  DecodeResult fine{U"ging", {}, TerminatedBy::kEndAction, false};
  CHECK(post_filter(fine, U"gehen") == U"ging");
  CHECK_FALSE(fine.filtered);
  CHECK(decode_cap(7) == 57);
}

TEST_CASE("both architectures learn a suffixing language") {
  const Dataset data = suffix_language(3, 10);
  for (Arch arch : {Arch::kHacm, Arch::kHaem}) {
    CAPTURE(to_string(arch));
    const auto result = train_model(small(arch), AlignerKind::kSmart, data, data, quick_config(20));
    CHECK(result.best_dev_accuracy == 1.0);
    for (const auto& sample : data) {
      DecodeResult r = result.model->greedy_decode(sample.lemma, sample.features);
      CAPTURE(format_actions(r.trace));
      CHECK(r.prediction == *sample.form);
      CHECK(r.terminated_by == TerminatedBy::kEndAction);
    }
  }
}

TEST_CASE("the returned model is the best logged epoch") {
  const Dataset data = identity_language(4, 10);
  const auto result = train_model(small(Arch::kHaem), AlignerKind::kNaive, data, data, quick_config(6));
  double best = -1;
  for (const auto& r : result.log) best = std::max(best, r.dev_accuracy);
  CHECK(result.best_dev_accuracy == best);
  CHECK(dev_accuracy(*result.model, data) == best);
  CHECK(result.log[result.best_epoch - 1].dev_accuracy == best);
}

TEST_CASE("a fixed seed gives bit-identical parameters") {
  const Dataset data = identity_language(5, 8);
  for (Arch arch : {Arch::kHacm, Arch::kHaem}) {
    TrainConfig config = quick_config(3, 11);
    config.dropout = 0.3;
    const auto a = train_model(small(arch), AlignerKind::kSmart, data, data, config);
    const auto b = train_model(small(arch), AlignerKind::kSmart, data, data, config);
    CHECK(nc::encode_parameters(a.model->params()) == nc::encode_parameters(b.model->params()));
    config.seed = 12;
    const auto c = train_model(small(arch), AlignerKind::kSmart, data, data, config);
    CHECK(nc::encode_parameters(a.model->params()) != nc::encode_parameters(c.model->params()));
  }
}

TEST_CASE("patience one with frozen parameters stops after two epochs") {
  const Dataset data = identity_language(6, 6);
  TrainConfig config = quick_config(10);
  config.patience = 1;
  config.optimizer.learning_rate = 0.0;
  const auto result = train_model(small(Arch::kHaem), AlignerKind::kSmart, data, data, config);
  CHECK(result.log.size() == 2);
  CHECK(result.best_epoch == 1);
}

TEST_CASE("training errors") {
  const Dataset data = identity_language(7, 4);
  CHECK_THROWS_AS(train_model(small(Arch::kHacm), AlignerKind::kSmart, data, {}, quick_config(1)), DataError);
  TrainConfig bad = quick_config(1);
  bad.patience = 0;
  CHECK_THROWS_AS(train_model(small(Arch::kHacm), AlignerKind::kSmart, data, data, bad), ConfigError);

  auto [vocab, features] = build_vocab(data);
  auto model = make_model(vocab, features, small(Arch::kHaem), 1);
  model->params().get("haem.state.b").value[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    train_existing(std::move(model), AlignerKind::kSmart, data, data, quick_config(1));
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}

TEST_CASE("epoch records serialize as one JSON object per line") {
  CHECK(to_json_line({3, 0.5, 0.25}) == R"({"dev_acc":0.25,"epoch":3,"loss":0.5})");
}

TEST_CASE("oracle precomputation is pure") {
  const Dataset data = {testing::sample("fliegen", "flog"), testing::sample("gehen", "ging")};
  for (Arch arch : {Arch::kHacm, Arch::kHaem}) {
    for (AlignerKind kind : {AlignerKind::kNaive, AlignerKind::kSmart}) {
      CHECK(compute_oracles(arch, kind, data) == compute_oracles(arch, kind, data));
    }
  }
}

TEST_CASE("default population sizes per setting") {
  const auto low = default_counts(Setting::kLow);
  CHECK(low.total() == 20);
  for (Arch arch : {Arch::kHacm, Arch::kHaem}) {
    for (AlignerKind kind : {AlignerKind::kNaive, AlignerKind::kSmart}) CHECK(low.at(arch, kind) == 5);
  }
  const auto medium = default_counts(Setting::kMedium);
  CHECK(medium.at(Arch::kHacm, AlignerKind::kSmart) == 5);
  CHECK(medium.at(Arch::kHacm, AlignerKind::kNaive) == 5);
  CHECK(medium.at(Arch::kHaem, AlignerKind::kSmart) == 5);
  CHECK(medium.at(Arch::kHaem, AlignerKind::kNaive) == 3);
  const auto high = default_counts(Setting::kHigh);
  CHECK(high.at(Arch::kHacm, AlignerKind::kSmart) == 3);
  CHECK(high.at(Arch::kHacm, AlignerKind::kNaive) == 3);
  CHECK(high.at(Arch::kHaem, AlignerKind::kSmart) == 3);
  CHECK(high.at(Arch::kHaem, AlignerKind::kNaive) == 2);
  CHECK(parse_setting("medium") == Setting::kMedium);
  CHECK_THROWS_AS(parse_setting("tiny"), ConfigError);
}

TEST_CASE("population of one per cell, sequential and parallel agree") {
  const Dataset data = identity_language(8, 6);
  PopulationConfig config;
  config.counts = {{1, 1, 1, 1}};
  config.train = quick_config(2);
  config.hacm = small(Arch::kHacm);
  config.haem = small(Arch::kHaem);
  const ModelPool serial = train_population(data, data, config);
  config.jobs = 3;
  const ModelPool parallel = train_population(data, data, config);
  REQUIRE(serial.size() == 4);
  REQUIRE(parallel.size() == 4);
  const auto a = serial.entries();
  const auto b = parallel.entries();
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(a[k].name == b[k].name);
    CHECK(a[k].dev_accuracy == b[k].dev_accuracy);
    CHECK(nc::encode_parameters(a[k].model->params()) == nc::encode_parameters(b[k].model->params()));
  }
  CHECK(a[0].name == "hacm-naive-1");
  CHECK(a[3].name == "haem-smart-1");
  CHECK(serial.cell(Arch::kHaem, AlignerKind::kNaive).size() == 1);
  CHECK(member_seed(1, Arch::kHacm, AlignerKind::kNaive, 0) != member_seed(1, Arch::kHacm, AlignerKind::kNaive, 1));
}

TEST_CASE("checkpoints round-trip through disk") {
  const Dataset data = identity_language(9, 6);
  const auto dir = std::filesystem::temp_directory_path() / "hardatt_checkpoint_test";
  std::filesystem::remove_all(dir);
  for (Arch arch : {Arch::kHacm, Arch::kHaem}) {
    ModelConfig mc = small(arch);
    mc.extended = arch == Arch::kHacm;
    const auto trained = train_model(mc, AlignerKind::kNaive, data, data, quick_config(2));
    save_checkpoint(dir, *trained.model, {AlignerKind::kNaive, 7, trained.best_dev_accuracy});
    const auto loaded = load_checkpoint(dir);
    CHECK(loaded.model->arch() == arch);
    CHECK(loaded.model->config().extended == mc.extended);
    CHECK(loaded.meta.aligner == AlignerKind::kNaive);
    CHECK(loaded.meta.seed == 7);
    CHECK(loaded.meta.dev_accuracy == trained.best_dev_accuracy);
    CHECK(loaded.model->vocab() == trained.model->vocab());
    CHECK(nc::encode_parameters(loaded.model->params()) == nc::encode_parameters(trained.model->params()));
    CHECK(predict_all(*loaded.model, data) == predict_all(*trained.model, data));
  }
  write_text_atomic(dir / "manifest.json", "{\"format\": \"other\"}");
  CHECK_THROWS_AS(load_checkpoint(dir), DataError);
  std::filesystem::remove_all(dir);
}
