#include "hardatt/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "hardatt/decode.hpp"
#include "hardatt/errors.hpp"
#include "hardatt/eval.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {

namespace {

std::string join_features(const std::vector<std::string>& features) {
  std::string out;
  for (std::size_t k = 0; k < features.size(); ++k) {
    if (k) out += ';';
    out += features[k];
  }
  return out;
}

std::vector<Prediction> decode_all(const Transducer& model, const Dataset& samples, std::size_t jobs) {
  std::vector<Prediction> out(samples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < samples.size(); k = next++) out[k] = predict(model, samples[k]);
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, samples.size()));
  std::vector<std::thread> extra;
  for (std::size_t t = 1; t < threads; ++t) extra.emplace_back(worker);
  worker();
  for (auto& t : extra) t.join();
  return out;
}

std::vector<std::u32string> resolve(const std::vector<Prediction>& predictions, const Dataset& samples) {
  std::vector<std::u32string> out;
  out.reserve(predictions.size());
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    out.push_back(predictions[k] ? *predictions[k] : samples[k].lemma);
  }
  return out;
}

double gold_accuracy(const Dataset& samples, const std::vector<std::u32string>& predictions) {
  std::vector<std::u32string> gold;
  gold.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!samples[k].form) throw DataError("dev sample " + std::to_string(k + 1) + " has no form");
    gold.push_back(*samples[k].form);
  }
  return accuracy(gold, predictions);
}

}  // namespace

Prediction ExternalPredictions::lookup(const Sample& sample) const {
  auto it = table.find({sample.lemma, join_features(sample.features)});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

ExternalPredictions load_external(const std::filesystem::path& path, double dev_accuracy) {
  if (dev_accuracy < 0.0 || dev_accuracy > 1.0) throw ConfigError("external dev accuracy outside [0, 1]");
  ExternalPredictions external;
  external.name = "external:" + path.filename().string();
  external.dev_accuracy = dev_accuracy;
  for (const auto& sample : parse_dataset(path, true)) {
    external.table[{sample.lemma, join_features(sample.features)}] = *sample.form;
  }
  return external;
}

Prediction vote(const std::vector<Vote>& votes) {
  struct Tally {
    std::u32string text;
    std::size_t count = 0;
    double best_accuracy = -1.0;
    std::size_t first_best = 0;  // earliest vote reaching best_accuracy
  };
  std::vector<Tally> tallies;
  for (std::size_t k = 0; k < votes.size(); ++k) {
    if (!votes[k].prediction) continue;
    auto it = std::find_if(tallies.begin(), tallies.end(),
                           [&](const Tally& t) { return t.text == *votes[k].prediction; });
    if (it == tallies.end()) {
      tallies.push_back({*votes[k].prediction});
      it = tallies.end() - 1;
    }
    ++it->count;
    if (votes[k].dev_accuracy > it->best_accuracy) {
      it->best_accuracy = votes[k].dev_accuracy;
      it->first_best = k;
    }
  }
  if (tallies.empty()) return std::nullopt;
  auto better = [](const Tally& a, const Tally& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.best_accuracy != b.best_accuracy) return a.best_accuracy > b.best_accuracy;
    return a.first_best < b.first_best;
  };
  return std::min_element(tallies.begin(), tallies.end(), better)->text;
}

PredictionTable::PredictionTable(const ModelPool& pool,
                                 const std::optional<ExternalPredictions>& external,
                                 const Dataset& dev, const Dataset& test, std::size_t jobs)
    : dev_(dev), test_(test) {
  for (const auto& entry : pool.entries()) {
    members_.push_back({entry.name, entry.dev_accuracy, false, entry.arch, entry.aligner});
    dev_preds_.push_back(decode_all(*entry.model, dev_, jobs));
    test_preds_.push_back(decode_all(*entry.model, test_, jobs));
  }
  if (external) {
    members_.push_back({external->name, external->dev_accuracy, true});
    std::vector<Prediction> d, t;
    for (const auto& s : dev_) d.push_back(external->lookup(s));
    for (const auto& s : test_) t.push_back(external->lookup(s));
    dev_preds_.push_back(std::move(d));
    test_preds_.push_back(std::move(t));
  }
}

PredictionTable::PredictionTable(std::vector<Member> members, Dataset dev, Dataset test,
                                 std::vector<std::vector<Prediction>> dev_predictions,
                                 std::vector<std::vector<Prediction>> test_predictions)
    : members_(std::move(members)),
      dev_(std::move(dev)),
      test_(std::move(test)),
      dev_preds_(std::move(dev_predictions)),
      test_preds_(std::move(test_predictions)) {
  if (dev_preds_.size() != members_.size() || test_preds_.size() != members_.size()) {
    throw ConfigError("prediction rows do not match the member count");
  }
  for (std::size_t m = 0; m < members_.size(); ++m) {
    if (dev_preds_[m].size() != dev_.size() || test_preds_[m].size() != test_.size()) {
      throw ConfigError("member '" + members_[m].name + "' has a wrong number of predictions");
    }
  }
}

std::vector<std::size_t> PredictionTable::cell(Arch arch, AlignerKind aligner) const {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    if (!members_[m].external && members_[m].arch == arch && members_[m].aligner == aligner) out.push_back(m);
  }
  return out;
}

std::optional<std::size_t> PredictionTable::external_index() const {
  for (std::size_t m = 0; m < members_.size(); ++m) {
    if (members_[m].external) return m;
  }
  return std::nullopt;
}

Candidate vote_ensemble(const PredictionTable& table, std::string label,
                        const std::vector<std::size_t>& members) {
  if (members.empty()) throw ConfigError("ensemble '" + label + "' has no members");
  auto combine = [&](const Dataset& samples, bool dev) {
    std::vector<Prediction> out(samples.size());
    std::vector<Vote> votes(members.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      for (std::size_t j = 0; j < members.size(); ++j) {
        const auto& preds = dev ? table.dev_predictions(members[j]) : table.test_predictions(members[j]);
        votes[j] = {preds[k], table.members()[members[j]].dev_accuracy};
      }
      out[k] = vote(votes);
    }
    return resolve(out, samples);
  };
  Candidate c;
  c.label = std::move(label);
  c.members = members;
  c.dev = combine(table.dev(), true);
  c.test = combine(table.test(), false);
  c.dev_accuracy = gold_accuracy(table.dev(), c.dev);
  return c;
}

std::vector<std::size_t> select_n_best(const PredictionTable& table,
                                       const std::vector<std::size_t>& members, std::size_t n) {
  if (n < 1) throw ConfigError("ensemble size must be at least 1");
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.members()[members[a]].dev_accuracy > table.members()[members[b]].dev_accuracy;
  });
  order.resize(std::min(n, order.size()));
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> out;
  for (std::size_t k : order) out.push_back(members[k]);
  return out;
}

Candidate ensemble_n(const PredictionTable& table, std::string label,
                     const std::vector<std::size_t>& members, std::size_t n) {
  return vote_ensemble(table, std::move(label), select_n_best(table, members, n));
}

std::size_t max_index(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw ConfigError("MAX over no candidates");
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    if (candidates[k].dev_accuracy >= candidates[best].dev_accuracy) best = k;
  }
  return best;
}

Candidate max_strategy(const std::vector<Candidate>& candidates) {
  return candidates[max_index(candidates)];
}

std::string describe_run(int run) {
  switch (run) {
    case 1: return "MAX{E(N_CM), E(S_CM)}";
    case 2: return "ENSEMBLE_7(N_CM + S_CM)";
    case 3: return "MAX{E(N_EM), E(S_EM)}";
    case 4: return "ENSEMBLE_7(N_EM + S_EM)";
    case 5: return "MAX{E(N_CM), E(S_CM), E(N_EM), E(S_EM)}";
    case 6: return "ENSEMBLE_15(N_CM + S_CM + N_EM + S_EM)";
    case 7: return "MAX{Run 5, Run 6}";
    default: throw ConfigError("run id must be in 1..7, got " + std::to_string(run));
  }
}

namespace {

std::vector<std::size_t> require_cell(const PredictionTable& table, Arch arch, AlignerKind aligner) {
  auto members = table.cell(arch, aligner);
  if (members.empty()) throw ConfigError("missing pool cell " + cell_name(arch, aligner));
  return members;
}

std::vector<std::size_t> with_external(std::vector<std::size_t> members, const PredictionTable& table) {
  if (auto ext = table.external_index()) members.push_back(*ext);
  return members;
}

std::vector<std::size_t> merge(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

Candidate run_strategy(int run, const PredictionTable& table) {
  const std::string label = "run" + std::to_string(run);
  describe_run(run);
  auto cm = [&](AlignerKind a) { return require_cell(table, Arch::kHacm, a); };
  auto em = [&](AlignerKind a) { return require_cell(table, Arch::kHaem, a); };
  const auto N = AlignerKind::kNaive;
  const auto S = AlignerKind::kSmart;

  switch (run) {
    case 1:
      return max_strategy({vote_ensemble(table, "E(N_CM)", cm(N)), vote_ensemble(table, "E(S_CM)", cm(S))});
    case 2: return ensemble_n(table, label, merge(cm(N), cm(S)), 7);
    case 3:
      return max_strategy({vote_ensemble(table, "E(N_EM)", em(N)), vote_ensemble(table, "E(S_EM)", em(S))});
    case 4: return ensemble_n(table, label, merge(em(N), em(S)), 7);
    case 5:
      return max_strategy({vote_ensemble(table, "E(N_CM)", cm(N)), vote_ensemble(table, "E(S_CM)", cm(S)),
                           vote_ensemble(table, "E(N_EM)", with_external(em(N), table)),
                           vote_ensemble(table, "E(S_EM)", with_external(em(S), table))});
    case 6:
      return ensemble_n(table, label, with_external(merge(merge(cm(N), cm(S)), merge(em(N), em(S))), table), 15);
    default: {
      Candidate five = run_strategy(5, table);
      five.label = "run5";
      Candidate six = run_strategy(6, table);
      return max_strategy({five, six});
    }
  }
}

}  // namespace hardatt
