#include "hardatt/checkpoint.hpp"

#include <json.hpp>

#include "hardatt/errors.hpp"
#include "hardatt/hacm.hpp"
#include "hardatt/haem.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {

using nlohmann::json;

std::unique_ptr<Transducer> make_model(CharVocabulary vocab, FeatureAlphabet features,
                                       const ModelConfig& config, std::uint64_t seed) {
  if (config.arch == Arch::kHacm) {
    return std::make_unique<HacmModel>(std::move(vocab), std::move(features), config, seed);
  }
  return std::make_unique<HaemModel>(std::move(vocab), std::move(features), config, seed);
}

void save_checkpoint(const std::filesystem::path& dir, const Transducer& model,
                     const CheckpointMeta& meta) {
  std::filesystem::create_directories(dir);
  const ModelConfig& config = model.config();
  json manifest;
  manifest["format"] = "hardatt-checkpoint";
  manifest["version"] = 1;
  manifest["inventory"] = to_string(inventory_of(model.arch()));
  manifest["variant"] = config.extended ? "extended" : "basic";
  manifest["aligner"] = to_string(meta.aligner);
  manifest["sizes"] = {{"hidden", config.hidden},
                       {"embedding", config.embedding},
                       {"feature_embedding", config.feature_embedding}};
  json chars = json::array();
  for (char32_t ch : model.vocab().chars()) chars.push_back(utf8_encode(ch));
  manifest["chars"] = chars;
  manifest["features"] = model.features().features();
  manifest["seed"] = meta.seed;
  manifest["dev_accuracy"] = meta.dev_accuracy;
  manifest["params"] = "params.bin";
  nc::save_parameters(model.params(), dir / "params.bin");
  write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw DataError((dir / "manifest.json").string() + ": " + e.what());
  }
  try {
    if (manifest.at("format") != "hardatt-checkpoint") throw DataError("not a checkpoint manifest");
    ModelConfig config;
    config.arch = manifest.at("inventory") == "HACM" ? Arch::kHacm : Arch::kHaem;
    config.extended = manifest.at("variant") == "extended";
    config.hidden = manifest.at("sizes").at("hidden");
    config.embedding = manifest.at("sizes").at("embedding");
    config.feature_embedding = manifest.at("sizes").at("feature_embedding");
    std::vector<char32_t> chars;
    for (const auto& entry : manifest.at("chars")) {
      const auto decoded = utf8_decode(entry.get<std::string>());
      if (decoded.size() != 1) throw DataError("vocabulary entry is not a single character");
      chars.push_back(decoded[0]);
    }
    CheckpointMeta meta;
    meta.aligner = parse_aligner_kind(manifest.at("aligner").get<std::string>());
    meta.seed = manifest.at("seed");
    meta.dev_accuracy = manifest.at("dev_accuracy");
    auto model = make_model(CharVocabulary(chars),
                            FeatureAlphabet(manifest.at("features").get<std::vector<std::string>>()),
                            config, meta.seed);
    nc::load_parameters(model->params(), dir / manifest.at("params").get<std::string>());
    return {std::move(model), meta};
  } catch (const json::exception& e) {
    throw DataError((dir / "manifest.json").string() + ": " + e.what());
  }
}

}  // namespace hardatt
