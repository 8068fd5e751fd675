#include "hardatt/pool.hpp"

#include <json.hpp>

#include "hardatt/checkpoint.hpp"
#include "hardatt/corpus.hpp"
#include "hardatt/errors.hpp"

namespace hardatt {

ModelPool::ModelPool(const ModelPool& other) : entries_(other.entries()) {}

ModelPool& ModelPool::operator=(const ModelPool& other) {
  if (this != &other) {
    auto copy = other.entries();
    std::lock_guard<std::mutex> lock(mutex_);
    entries_ = std::move(copy);
  }
  return *this;
}

void ModelPool::add(PoolEntry entry) {
  if (entry.dev_accuracy < 0.0 || entry.dev_accuracy > 1.0) {
    throw ConfigError("dev accuracy of '" + entry.name + "' outside [0, 1]");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::vector<PoolEntry> ModelPool::entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_;
}

std::size_t ModelPool::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

std::vector<PoolEntry> ModelPool::cell(Arch arch, AlignerKind aligner) const {
  std::vector<PoolEntry> out;
  for (const auto& entry : entries()) {
    if (entry.arch == arch && entry.aligner == aligner) out.push_back(entry);
  }
  return out;
}

std::string cell_name(Arch arch, AlignerKind aligner) {
  return to_string(arch) + "-" + to_string(aligner);
}

void save_pool(const ModelPool& pool, const std::filesystem::path& dir) {
  nlohmann::json index = nlohmann::json::array();
  for (const auto& entry : pool.entries()) {
    if (!entry.model) throw ConfigError("pool entry '" + entry.name + "' has no model");
    save_checkpoint(dir / entry.name, *entry.model, {entry.aligner, entry.seed, entry.dev_accuracy});
    index.push_back({{"name", entry.name},
                     {"arch", to_string(entry.arch)},
                     {"aligner", to_string(entry.aligner)},
                     {"seed", entry.seed},
                     {"dev_accuracy", entry.dev_accuracy}});
  }
  write_text_atomic(dir / "pool.json", index.dump(2) + "\n");
}

ModelPool load_pool(const std::filesystem::path& dir) {
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(read_text_file(dir / "pool.json"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError((dir / "pool.json").string() + ": " + e.what());
  }
  ModelPool pool;
  for (const auto& item : index) {
    const std::string name = item.at("name");
    auto loaded = load_checkpoint(dir / name);
    PoolEntry entry;
    entry.name = name;
    entry.arch = parse_arch(item.at("arch").get<std::string>());
    entry.aligner = parse_aligner_kind(item.at("aligner").get<std::string>());
    entry.seed = item.at("seed");
    entry.dev_accuracy = item.at("dev_accuracy");
    entry.model = std::move(loaded.model);
    pool.add(std::move(entry));
  }
  return pool;
}

}  // namespace hardatt
