#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hardatt/numcore/tensor.hpp"

namespace hardatt::nc {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // accumulated by Graph::backward, cleared by zero_grad()
};

// Owns named trainable tensors. Addresses are stable for the set's lifetime.
class ParameterSet {
 public:
  Parameter& add(std::string name, Shape shape);

  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<std::unique_ptr<Parameter>>& all() const { return params_; }
  std::vector<Parameter*> pointers() const;

  // Total number of scalars across all parameters.
  std::size_t scalar_count() const;

  void zero_grad();
  double grad_norm() const;

  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

// Binary checkpoint, all integers and floats little-endian:
//   magic   8 bytes  "HATPARAM"
//   version u32      1
//   count   u32      number of records
//   record  u32 name length, name bytes (UTF-8), u32 rank (1|2),
//           u64 dims[rank], f64 values[product(dims)] row-major
void save_parameters(const ParameterSet& params, const std::filesystem::path& path);

// Loads values into an existing set; names and shapes must match exactly.
void load_parameters(ParameterSet& params, const std::filesystem::path& path);

std::string encode_parameters(const ParameterSet& params);
void decode_parameters(ParameterSet& params, const std::string& bytes);

}  // namespace hardatt::nc
