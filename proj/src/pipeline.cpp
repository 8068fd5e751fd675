#include "hardatt/pipeline.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "hardatt/errors.hpp"
#include "hardatt/log.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    const auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("manifest key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("manifest key '" + key + "': expected a number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("manifest key '" + key + "': expected true or false, got '" + value + "'");
}

// Rethrows a stage failure with the stage name prefixed, keeping its type.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = std::string("stage ") + name + ": ";
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const NumericError& e) {
    throw NumericError(prefix + e.what());
  } catch (const TransitionError& e) {
    throw TransitionError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  }
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

CellCounts RunManifest::effective_counts() const { return counts ? *counts : default_counts(setting); }

PopulationConfig RunManifest::population() const {
  PopulationConfig config;
  config.counts = effective_counts();
  config.train.optimizer.kind = optimizer;
  config.train.optimizer.learning_rate = learning_rate;
  config.train.max_epochs = epochs;
  config.train.patience = patience;
  config.train.dropout = dropout;
  config.train.seed = seed;
  config.train.setting = setting;
  for (ModelConfig* mc : {&config.hacm, &config.haem}) {
    mc->hidden = hidden;
    mc->embedding = embedding;
    mc->feature_embedding = feature_embedding;
    mc->extended = extended;
  }
  config.jobs = jobs;
  return config;
}

RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base) {
  RunManifest m;
  auto path = [&](const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
  };
  std::optional<std::size_t> cell[4];
  static const char* const kCellKeys[4] = {"hacm_naive", "hacm_smart", "haem_naive", "haem_smart"};

  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "language") m.language = value;
    else if (key == "setting") m.setting = parse_setting(value);
    else if (key == "train") m.train = path(value);
    else if (key == "dev") m.dev = path(value);
    else if (key == "test") m.test = path(value);
    else if (key == "out") m.out = path(value);
    else if (key == "seed") m.seed = to_size(key, value);
    else if (key == "run") m.run = static_cast<int>(to_size(key, value));
    else if (key == "hidden") m.hidden = to_size(key, value);
    else if (key == "embedding") m.embedding = to_size(key, value);
    else if (key == "feature_embedding") m.feature_embedding = to_size(key, value);
    else if (key == "extended") m.extended = to_bool(key, value);
    else if (key == "epochs") m.epochs = to_size(key, value);
    else if (key == "patience") m.patience = to_size(key, value);
    else if (key == "dropout") m.dropout = to_double(key, value);
    else if (key == "optimizer") m.optimizer = nc::parse_optimizer_kind(value);
    else if (key == "learning_rate") m.learning_rate = to_double(key, value);
    else if (key == "jobs") m.jobs = to_size(key, value);
    else if (key == "external") m.external = path(value);
    else if (key == "external_dev_acc") m.external_dev_accuracy = to_double(key, value);
    else {
      bool matched = false;
      for (int c = 0; c < 4; ++c) {
        if (key == kCellKeys[c]) {
          cell[c] = to_size(key, value);
          matched = true;
        }
      }
      if (!matched) throw ConfigError("unknown manifest key '" + key + "'");
    }
  }
  if (cell[0] || cell[1] || cell[2] || cell[3]) {
    CellCounts counts = default_counts(m.setting);
    for (int c = 0; c < 4; ++c) {
      if (cell[c]) counts.counts[c] = *cell[c];
    }
    m.counts = counts;
  }
  for (const auto* required : {&m.train, &m.dev, &m.test, &m.out}) {
    if (required->empty()) throw ConfigError("manifest must set train, dev, test and out");
  }
  describe_run(m.run);
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(read_text_file(path), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string render_manifest(const RunManifest& m) {
  const CellCounts counts = m.effective_counts();
  std::ostringstream out;
  out << "language = " << m.language << "\n"
      << "setting = " << to_string(m.setting) << "\n"
      << "train = " << m.train.string() << "\n"
      << "dev = " << m.dev.string() << "\n"
      << "test = " << m.test.string() << "\n"
      << "out = " << m.out.string() << "\n"
      << "hacm_naive = " << counts.counts[0] << "\n"
      << "hacm_smart = " << counts.counts[1] << "\n"
      << "haem_naive = " << counts.counts[2] << "\n"
      << "haem_smart = " << counts.counts[3] << "\n"
      << "seed = " << m.seed << "\n"
      << "run = " << m.run << "\n"
      << "hidden = " << m.hidden << "\n"
      << "embedding = " << m.embedding << "\n"
      << "feature_embedding = " << m.feature_embedding << "\n"
      << "extended = " << (m.extended ? "true" : "false") << "\n"
      << "epochs = " << m.epochs << "\n"
      << "patience = " << m.patience << "\n"
      << "dropout = " << format_double(m.dropout) << "\n"
      << "optimizer = " << nc::to_string(m.optimizer) << "\n"
      << "learning_rate = " << format_double(m.learning_rate) << "\n"
      << "jobs = " << m.jobs << "\n";
  if (m.external) {
    out << "external = " << m.external->string() << "\n"
        << "external_dev_acc = " << format_double(m.external_dev_accuracy) << "\n";
  }
  return out.str();
}

std::string format_predictions(const Dataset& samples, const std::vector<std::u32string>& predictions) {
  if (samples.size() != predictions.size()) {
    throw std::invalid_argument("format_predictions: " + std::to_string(samples.size()) + " samples but " +
                                std::to_string(predictions.size()) + " predictions");
  }
  Dataset rows = samples;
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].form = predictions[k];
  return serialize_dataset(rows, true);
}

RunArtifacts cmd_run(const RunManifest& manifest) {
  const PopulationConfig population = manifest.population();
  if (population.counts.total() == 0) throw ConfigError("empty pool: every cell count is zero");

  struct Data {
    Dataset train, dev, test;
  };
  Data data = stage("load", [&] {
    Data d{parse_dataset(manifest.train, true), parse_dataset(manifest.dev, true),
           parse_dataset(manifest.test)};
    if (d.train.empty()) throw DataError(manifest.train.string() + ": no samples");
    if (d.dev.empty()) throw DataError(manifest.dev.string() + ": no samples");
    return d;
  });

  ModelPool pool = stage("train", [&] { return train_population(data.train, data.dev, population); });
  stage("save pool", [&] { save_pool(pool, manifest.out / "pool"); });

  Candidate result = stage("ensemble", [&] {
    std::optional<ExternalPredictions> external;
    if (manifest.external) external = load_external(*manifest.external, manifest.external_dev_accuracy);
    PredictionTable table(pool, external, data.dev, data.test, manifest.jobs);
    return run_strategy(manifest.run, table);
  });
  log(LogLevel::kInfo, "run " + std::to_string(manifest.run) + " chose " + result.label +
                           " dev_acc=" + std::to_string(result.dev_accuracy));

  RunArtifacts artifacts;
  artifacts.predictions = manifest.out / "predictions.tsv";
  stage("write", [&] {
    const bool test_gold = has_forms(data.test);
    const Dataset& scored = test_gold ? data.test : data.dev;
    const auto& predicted = test_gold ? result.test : result.dev;
    std::vector<std::u32string> gold;
    for (const auto& s : scored) gold.push_back(*s.form);
    artifacts.report = macro_report({{manifest.language, to_string(manifest.setting),
                                      accuracy(gold, predicted), mean_levenshtein(gold, predicted)}});
    write_text_atomic(artifacts.predictions, format_predictions(data.test, result.test));
    write_text_atomic(manifest.out / "dev_predictions.tsv", format_predictions(data.dev, result.dev));
    write_text_atomic(manifest.out / "report.tsv", render_tsv(artifacts.report));
    write_text_atomic(manifest.out / "manifest.txt", render_manifest(manifest));
  });
  artifacts.result = std::move(result);
  return artifacts;
}

}  // namespace hardatt
