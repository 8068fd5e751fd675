#include "hardatt/train.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include <json.hpp>

#include "hardatt/checkpoint.hpp"
#include "hardatt/decode.hpp"
#include "hardatt/errors.hpp"
#include "hardatt/eval.hpp"
#include "hardatt/log.hpp"
#include "hardatt/numcore/graph.hpp"
#include "hardatt/numcore/random.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {

std::string to_string(Setting setting) {
  switch (setting) {
    case Setting::kLow: return "low";
    case Setting::kMedium: return "medium";
    case Setting::kHigh: return "high";
  }
  return "low";
}

Setting parse_setting(std::string_view name) {
  if (name == "low") return Setting::kLow;
  if (name == "medium") return Setting::kMedium;
  if (name == "high") return Setting::kHigh;
  throw ConfigError("unknown setting '" + std::string(name) + "' (expected low, medium or high)");
}

void TrainConfig::validate() const {
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_epochs < 1) throw ConfigError("max epochs must be at least 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (!(optimizer.learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
}

std::string to_json_line(const EpochRecord& record) {
  nlohmann::json line{{"epoch", record.epoch},
                      {"loss", record.loss},
                      {"dev_acc", record.dev_accuracy}};
  return line.dump();
}

std::vector<OracleSequence> compute_oracles(Arch arch, AlignerKind aligner, const Dataset& samples) {
  auto align = make_aligner(aligner);
  std::vector<OracleSequence> out;
  out.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& sample = samples[k];
    if (!sample.form) throw DataError("training sample " + std::to_string(k + 1) + " has no form");
    Alignment alignment = align->align(sample.lemma, *sample.form);
    out.push_back(arch == Arch::kHacm ? hacm_oracle(alignment) : haem_oracle(alignment));
  }
  return out;
}

double dev_accuracy(const Transducer& model, const Dataset& dev) {
  std::vector<std::u32string> gold;
  gold.reserve(dev.size());
  for (std::size_t k = 0; k < dev.size(); ++k) {
    if (!dev[k].form) throw DataError("dev sample " + std::to_string(k + 1) + " has no form");
    gold.push_back(*dev[k].form);
  }
  return accuracy(gold, predict_all(model, dev));
}

TrainResult train_existing(std::unique_ptr<Transducer> model, AlignerKind aligner,
                           const Dataset& train, const Dataset& dev, const TrainConfig& config,
                           const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty()) throw DataError("training set is empty");
  if (dev.empty()) throw DataError("dev set is empty");

  const auto oracles = compute_oracles(model->arch(), aligner, train);
  nc::Optimizer optimizer(model->params(), config.optimizer);
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5851f42d4c957f2dULL);
  std::mt19937_64 dropout_rng(config.seed ^ 0x14057b7ef767814fULL);
  LossOptions options{config.dropout, &dropout_rng};

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  auto best = model->params().snapshot();
  result.best_dev_accuracy = -1.0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    nc::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t k : order) {
      model->params().zero_grad();
      nc::Graph graph;
      nc::Var loss;
      try {
        loss = model->sample_loss(graph, train[k], oracles[k], options);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", sample " + std::to_string(k + 1) +
                           " (" + utf8_encode(train[k].lemma) + "): " + e.what());
      }
      const double value = loss.scalar();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
                           std::to_string(k + 1) + " (" + utf8_encode(train[k].lemma) + ")");
      }
      total += value;
      graph.backward(loss);
      optimizer.step();
    }

    EpochRecord record{epoch, total / static_cast<double>(train.size()),
                       dev_accuracy(*model, dev)};
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.dev_accuracy > result.best_dev_accuracy) {
      result.best_dev_accuracy = record.dev_accuracy;
      result.best_epoch = epoch;
      best = model->params().snapshot();
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }

  model->params().restore(best);
  result.model = std::move(model);
  return result;
}

TrainResult train_model(const ModelConfig& model_config, AlignerKind aligner, const Dataset& train,
                        const Dataset& dev, const TrainConfig& config,
                        const EpochCallback& on_epoch) {
  if (train.empty()) throw DataError("training set is empty");
  auto [vocab, features] = build_vocab(train);
  auto model = make_model(std::move(vocab), std::move(features), model_config, config.seed);
  return train_existing(std::move(model), aligner, train, dev, config, on_epoch);
}

namespace {

std::size_t cell_index(Arch arch, AlignerKind aligner) {
  return (arch == Arch::kHacm ? 0 : 2) + (aligner == AlignerKind::kNaive ? 0 : 1);
}

constexpr std::array<std::pair<Arch, AlignerKind>, 4> kCells{{
    {Arch::kHacm, AlignerKind::kNaive},
    {Arch::kHacm, AlignerKind::kSmart},
    {Arch::kHaem, AlignerKind::kNaive},
    {Arch::kHaem, AlignerKind::kSmart},
}};

}  // namespace

std::size_t& CellCounts::at(Arch arch, AlignerKind aligner) {
  return counts[cell_index(arch, aligner)];
}

std::size_t CellCounts::at(Arch arch, AlignerKind aligner) const {
  return counts[cell_index(arch, aligner)];
}

std::size_t CellCounts::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

CellCounts default_counts(Setting setting) {
  switch (setting) {
    case Setting::kLow: return {{5, 5, 5, 5}};
    case Setting::kMedium: return {{5, 5, 3, 5}};
    case Setting::kHigh: return {{3, 3, 2, 3}};
  }
  return {};
}

std::uint64_t member_seed(std::uint64_t base, Arch arch, AlignerKind aligner, std::size_t k) {
  return base * 1000 + cell_index(arch, aligner) * 100 + k;
}

ModelPool train_population(const Dataset& train, const Dataset& dev, const PopulationConfig& config) {
  struct Job {
    Arch arch;
    AlignerKind aligner;
    std::size_t k;
  };
  std::vector<Job> jobs;
  for (const auto& [arch, aligner] : kCells) {
    for (std::size_t k = 0; k < config.counts.at(arch, aligner); ++k) jobs.push_back({arch, aligner, k});
  }

  std::vector<PoolEntry> slots(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      try {
        TrainConfig tc = config.train;
        tc.seed = member_seed(config.train.seed, job.arch, job.aligner, job.k);
        const ModelConfig& mc = job.arch == Arch::kHacm ? config.hacm : config.haem;
        auto result = train_model(mc, job.aligner, train, dev, tc);
        PoolEntry& entry = slots[j];
        entry.name = cell_name(job.arch, job.aligner) + "-" + std::to_string(job.k + 1);
        entry.arch = job.arch;
        entry.aligner = job.aligner;
        entry.dev_accuracy = result.best_dev_accuracy;
        entry.seed = tc.seed;
        entry.model = std::move(result.model);
        log(LogLevel::kInfo, "trained " + entry.name + " dev_acc=" + std::to_string(entry.dev_accuracy));
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(config.jobs, jobs.size()));
  std::vector<std::thread> pool_threads;
  for (std::size_t t = 1; t < threads; ++t) pool_threads.emplace_back(worker);
  worker();
  for (auto& t : pool_threads) t.join();

  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  ModelPool pool;
  for (auto& entry : slots) pool.add(std::move(entry));
  return pool;
}

}  // namespace hardatt
