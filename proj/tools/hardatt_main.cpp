// Command-line entry point: align, oracle, train, predict, ensemble, eval,
// run and synth.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hardatt/align.hpp"
#include "hardatt/checkpoint.hpp"
#include "hardatt/corpus.hpp"
#include "hardatt/decode.hpp"
#include "hardatt/ensemble.hpp"
#include "hardatt/errors.hpp"
#include "hardatt/eval.hpp"
#include "hardatt/log.hpp"
#include "hardatt/oracle.hpp"
#include "hardatt/pipeline.hpp"
#include "hardatt/synth.hpp"
#include "hardatt/train.hpp"
#include "hardatt/unicode.hpp"

namespace fs = std::filesystem;
using namespace hardatt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

void emit(const std::optional<fs::path>& output, const std::string& text) {
  if (output) {
    write_text_atomic(*output, text);
  } else {
    std::cout << text;
  }
}

Dataset pairs_input(const std::optional<fs::path>& input, const std::string& lemma, const std::string& form) {
  if (input) return parse_dataset(*input, true);
  if (lemma.empty()) throw ConfigError("give --input or --lemma/--form");
  return {Sample{utf8_decode(lemma), {"_"}, utf8_decode(form)}};
}

// Flags given in a --config file ("key = value" per line) are inserted right
// after the subcommand name, so flags on the command line take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  for (std::size_t k = 1; k < args.size(); ++k) {
    std::string path;
    std::size_t erase = 0;
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      erase = 2;
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
      erase = 1;
    } else {
      continue;
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + erase));
    std::vector<std::string> injected;
    for (const auto& [key, value] : parse_key_values(read_text_file(path))) {
      injected.push_back("--" + key + "=" + value);
    }
    const std::size_t at = args.size() > 1 ? 2 : args.size();
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard monotonic attention transducers for morphological inflection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug, info, warn or error")
      ->check(CLI::IsMember({"debug", "info", "warn", "error"}));
  app.add_option("--config", "Flat key = value file of flag defaults");

  std::function<void()> action;

  // align
  auto* align_cmd = app.add_subcommand("align", "Align lemma/form pairs");
  struct {
    std::string aligner = "smart", arch = "haem", lemma, form;
    std::optional<fs::path> input, output;
  } pa;
  align_cmd->add_option("--aligner", pa.aligner)->check(CLI::IsMember({"naive", "smart"}));
  align_cmd->add_option("--lemma", pa.lemma);
  align_cmd->add_option("--form", pa.form);
  align_cmd->add_option("--input", pa.input, "Training-format file");
  align_cmd->add_option("--output", pa.output);
  align_cmd->callback([&] {
    action = [&] {
      auto aligner = make_aligner(parse_aligner_kind(pa.aligner));
      std::string out;
      for (const auto& s : pairs_input(pa.input, pa.lemma, pa.form)) {
        out += utf8_encode(s.lemma) + "\t" + utf8_encode(*s.form) + "\t" +
               format_alignment(aligner->align(s.lemma, *s.form)) + "\n";
      }
      emit(pa.output, out);
    };
  });

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Derive oracle action sequences");
  oracle_cmd->add_option("--aligner", pa.aligner)->check(CLI::IsMember({"naive", "smart"}));
  oracle_cmd->add_option("--arch", pa.arch)->check(CLI::IsMember({"hacm", "haem"}));
  oracle_cmd->add_option("--lemma", pa.lemma);
  oracle_cmd->add_option("--form", pa.form);
  oracle_cmd->add_option("--input", pa.input, "Training-format file");
  oracle_cmd->add_option("--output", pa.output);
  oracle_cmd->callback([&] {
    action = [&] {
      const Arch arch = parse_arch(pa.arch);
      const Dataset samples = pairs_input(pa.input, pa.lemma, pa.form);
      const auto oracles = compute_oracles(arch, parse_aligner_kind(pa.aligner), samples);
      std::string out;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        std::string trace;
        for (std::size_t i : attention_trace(oracles[k])) trace += (trace.empty() ? "" : " ") + std::to_string(i);
        out += utf8_encode(samples[k].lemma) + "\t" + utf8_encode(*samples[k].form) + "\t" +
               format_actions(oracles[k]) + "\t" + trace + "\n";
      }
      emit(pa.output, out);
    };
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one model");
  struct {
    std::string arch = "haem", aligner = "smart", setting = "low", optimizer = "adam";
    std::uint64_t seed = 1;
    fs::path train, dev, out;
    std::size_t epochs = 30, patience = 5, hidden = 100, embedding = 100, feature_embedding = 20;
    double dropout = 0.3, lr = 1e-3;
    bool basic = false;
  } pt;
  train_cmd->add_option("--arch", pt.arch)->check(CLI::IsMember({"hacm", "haem"}));
  train_cmd->add_option("--aligner", pt.aligner)->check(CLI::IsMember({"naive", "smart"}));
  train_cmd->add_option("--setting", pt.setting)->check(CLI::IsMember({"low", "medium", "high"}));
  train_cmd->add_option("--seed", pt.seed);
  train_cmd->add_option("--train", pt.train)->required();
  train_cmd->add_option("--dev", pt.dev)->required();
  train_cmd->add_option("--out", pt.out, "Checkpoint directory")->required();
  train_cmd->add_option("--epochs", pt.epochs);
  train_cmd->add_option("--patience", pt.patience);
  train_cmd->add_option("--dropout", pt.dropout);
  train_cmd->add_option("--optimizer", pt.optimizer)->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--learning-rate", pt.lr);
  train_cmd->add_option("--hidden", pt.hidden);
  train_cmd->add_option("--embedding", pt.embedding);
  train_cmd->add_option("--feature-embedding", pt.feature_embedding);
  train_cmd->add_flag("--basic", pt.basic, "Edit model without history and deletion LSTMs");
  train_cmd->callback([&] {
    action = [&] {
      ModelConfig mc;
      mc.arch = parse_arch(pt.arch);
      mc.hidden = pt.hidden;
      mc.embedding = pt.embedding;
      mc.feature_embedding = pt.feature_embedding;
      mc.extended = !pt.basic;
      TrainConfig tc;
      tc.optimizer.kind = nc::parse_optimizer_kind(pt.optimizer);
      tc.optimizer.learning_rate = pt.lr;
      tc.max_epochs = pt.epochs;
      tc.patience = pt.patience;
      tc.dropout = pt.dropout;
      tc.seed = pt.seed;
      tc.setting = parse_setting(pt.setting);
      const AlignerKind aligner = parse_aligner_kind(pt.aligner);
      std::string log_lines;
      auto result = train_model(mc, aligner, parse_dataset(pt.train, true), parse_dataset(pt.dev, true), tc,
                                [&](const EpochRecord& r) {
                                  const std::string line = to_json_line(r);
                                  std::cout << line << std::endl;
                                  log_lines += line + "\n";
                                });
      save_checkpoint(pt.out, *result.model, {aligner, pt.seed, result.best_dev_accuracy});
      write_text_atomic(pt.out / "train_log.jsonl", log_lines);
    };
  });

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Decode a file with one checkpoint");
  struct {
    fs::path model, input;
    std::optional<fs::path> output;
  } pp;
  predict_cmd->add_option("--model", pp.model, "Checkpoint directory")->required();
  predict_cmd->add_option("--input", pp.input)->required();
  predict_cmd->add_option("--output", pp.output);
  predict_cmd->callback([&] {
    action = [&] {
      const auto loaded = load_checkpoint(pp.model);
      const Dataset samples = parse_dataset(pp.input);
      emit(pp.output, format_predictions(samples, predict_all(*loaded.model, samples)));
    };
  });

  // ensemble
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Combine a model pool with a run strategy");
  struct {
    int run = 7;
    fs::path pool, dev, test;
    std::optional<fs::path> external, output;
    double external_dev_acc = 0.0;
    std::size_t jobs = 1;
  } pe;
  ensemble_cmd->add_option("--run", pe.run)->check(CLI::Range(1, kNumRuns));
  ensemble_cmd->add_option("--pool", pe.pool)->required();
  ensemble_cmd->add_option("--dev", pe.dev)->required();
  ensemble_cmd->add_option("--test", pe.test)->required();
  ensemble_cmd->add_option("--external", pe.external, "Predictions file joining as a pseudo-model");
  ensemble_cmd->add_option("--external-dev-acc", pe.external_dev_acc);
  ensemble_cmd->add_option("--output", pe.output);
  ensemble_cmd->add_option("--jobs", pe.jobs);
  ensemble_cmd->callback([&] {
    action = [&] {
      const ModelPool pool = load_pool(pe.pool);
      std::optional<ExternalPredictions> external;
      if (pe.external) external = load_external(*pe.external, pe.external_dev_acc);
      const Dataset test = parse_dataset(pe.test);
      PredictionTable table(pool, external, parse_dataset(pe.dev, true), test, pe.jobs);
      const Candidate result = run_strategy(pe.run, table);
      log(LogLevel::kInfo, describe_run(pe.run) + ": chose " + result.label +
                               " dev_acc=" + std::to_string(result.dev_accuracy));
      emit(pe.output, format_predictions(test, result.test));
    };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score prediction files against gold files");
  struct {
    std::vector<fs::path> gold, pred;
    std::vector<std::string> language, setting;
    std::string format = "tsv";
  } pv;
  eval_cmd->add_option("--gold", pv.gold)->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  eval_cmd->add_option("--pred", pv.pred)->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  eval_cmd->add_option("--language", pv.language)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  eval_cmd->add_option("--setting", pv.setting)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  eval_cmd->add_option("--format", pv.format)->check(CLI::IsMember({"tsv", "golden"}));
  eval_cmd->callback([&] {
    action = [&] {
      if (pv.gold.size() != pv.pred.size()) throw ConfigError("--gold and --pred counts differ");
      auto pick = [](const std::vector<std::string>& values, std::size_t k, const std::string& fallback) {
        if (values.empty()) return fallback;
        if (values.size() == 1) return values[0];
        if (k >= values.size()) throw ConfigError("too few --language/--setting values");
        return values[k];
      };
      std::vector<LanguageResult> results;
      for (std::size_t k = 0; k < pv.gold.size(); ++k) {
        const Dataset gold = parse_dataset(pv.gold[k], true);
        const Dataset pred = parse_dataset(pv.pred[k], true);
        if (gold.size() != pred.size()) {
          throw DataError(pv.pred[k].string() + ": " + std::to_string(pred.size()) + " lines, gold has " +
                          std::to_string(gold.size()));
        }
        std::vector<std::u32string> g, p;
        for (std::size_t j = 0; j < gold.size(); ++j) {
          if (gold[j].lemma != pred[j].lemma) {
            throw DataError(pv.pred[k].string() + ": line " + std::to_string(j + 1) + " lemma differs from gold");
          }
          g.push_back(*gold[j].form);
          p.push_back(*pred[j].form);
        }
        const std::string language = pick(pv.language, k, pv.gold[k].stem().string());
        const std::string setting = pick(pv.setting, k, "low");
        parse_setting(setting);
        results.push_back({language, setting, accuracy(g, p), mean_levenshtein(g, p)});
      }
      const EvalReport report = macro_report(results);
      std::cout << (pv.format == "golden" ? render_table(report) : render_tsv(report));
    };
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "Train a population, ensemble it and evaluate");
  struct {
    fs::path manifest;
    std::optional<fs::path> out;
    std::optional<std::size_t> jobs;
  } pr;
  run_cmd->add_option("--manifest", pr.manifest)->required();
  run_cmd->add_option("--out", pr.out, "Override the manifest output directory");
  run_cmd->add_option("--jobs", pr.jobs, "Override the manifest job count");
  run_cmd->callback([&] {
    action = [&] {
      RunManifest manifest = load_manifest(pr.manifest);
      if (pr.out) manifest.out = *pr.out;
      if (pr.jobs) manifest.jobs = *pr.jobs;
      const RunArtifacts artifacts = cmd_run(manifest);
      std::cout << render_tsv(artifacts.report);
    };
  });

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic language");
  struct {
    std::vector<std::string> paradigms;
    std::size_t train = 100, dev = 50, test = 50;
    std::uint64_t seed = 1;
    std::string consonants = "bdfgklmnprstz", vowels = "aeiou";
    fs::path out;
  } ps;
  synth_cmd->add_option("--paradigm", ps.paradigms, "e.g. V;PST=ablaut:i>o+suffix:te")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  synth_cmd->add_option("--train-size", ps.train);
  synth_cmd->add_option("--dev-size", ps.dev);
  synth_cmd->add_option("--test-size", ps.test);
  synth_cmd->add_option("--seed", ps.seed);
  synth_cmd->add_option("--consonants", ps.consonants);
  synth_cmd->add_option("--vowels", ps.vowels);
  synth_cmd->add_option("--out", ps.out)->required();
  synth_cmd->callback([&] {
    action = [&] {
      SynthConfig config;
      for (const auto& p : ps.paradigms) config.paradigms.push_back(parse_paradigm(p));
      config.train_size = ps.train;
      config.dev_size = ps.dev;
      config.test_size = ps.test;
      config.seed = ps.seed;
      config.consonants = utf8_decode(ps.consonants);
      config.vowels = utf8_decode(ps.vowels);
      write_language(synth_language(config), ps.out);
    };
  });

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (log_level == "debug") set_log_level(LogLevel::kDebug);
  if (log_level == "warn") set_log_level(LogLevel::kWarn);
  if (log_level == "error") set_log_level(LogLevel::kError);

  try {
    if (action) action();
    return kExitOk;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const TransitionError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
