#include "hardatt/transducer.hpp"

#include "hardatt/errors.hpp"

namespace hardatt {

std::string to_string(Arch arch) { return arch == Arch::kHacm ? "hacm" : "haem"; }

Arch parse_arch(std::string_view name) {
  if (name == "hacm" || name == "HACM") return Arch::kHacm;
  if (name == "haem" || name == "HAEM") return Arch::kHaem;
  throw ConfigError("unknown architecture '" + std::string(name) + "' (expected hacm|haem)");
}

Inventory inventory_of(Arch arch) { return arch == Arch::kHacm ? Inventory::kHacm : Inventory::kHaem; }

OracleSequence Transducer::oracle(const Alignment& alignment) const {
  return arch() == Arch::kHacm ? hacm_oracle(alignment) : haem_oracle(alignment);
}

}  // namespace hardatt
