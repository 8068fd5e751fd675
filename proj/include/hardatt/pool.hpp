#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hardatt/align.hpp"
#include "hardatt/transducer.hpp"

namespace hardatt {

struct PoolEntry {
  std::string name;
  Arch arch = Arch::kHaem;
  AlignerKind aligner = AlignerKind::kSmart;
  double dev_accuracy = 0.0;  // in [0, 1]
  std::uint64_t seed = 0;
  std::shared_ptr<const Transducer> model;
};

// Registry of trained single models. Entries are immutable once added;
// add() may be called from several training workers.
class ModelPool {
 public:
  ModelPool() = default;
  ModelPool(const ModelPool& other);
  ModelPool& operator=(const ModelPool& other);

  void add(PoolEntry entry);
  std::vector<PoolEntry> entries() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  // Entries of one (arch, aligner) cell in registration order.
  std::vector<PoolEntry> cell(Arch arch, AlignerKind aligner) const;

 private:
  mutable std::mutex mutex_;
  std::vector<PoolEntry> entries_;
};

std::string cell_name(Arch arch, AlignerKind aligner);

// <dir>/pool.json plus one checkpoint directory per entry.
void save_pool(const ModelPool& pool, const std::filesystem::path& dir);
ModelPool load_pool(const std::filesystem::path& dir);

}  // namespace hardatt
