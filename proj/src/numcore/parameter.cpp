#include "hardatt/numcore/parameter.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <unordered_set>

#include "hardatt/corpus.hpp"
#include "hardatt/errors.hpp"

namespace hardatt::nc {

Parameter& ParameterSet::add(std::string name, Shape shape) {
  if (contains(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  auto param = std::make_unique<Parameter>();
  param->name = std::move(name);
  param->value = Tensor(shape);
  param->grad = Tensor(shape);
  params_.push_back(std::move(param));
  return *params_.back();
}

Parameter& ParameterSet::get(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw ConfigError("no parameter named '" + name + "'");
}

const Parameter& ParameterSet::get(const std::string& name) const {
  return const_cast<ParameterSet*>(this)->get(name);
}

bool ParameterSet::contains(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return true;
  }
  return false;
}

std::vector<Parameter*> ParameterSet::pointers() const {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p->value.size();
  return total;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->grad.fill(0.0);
}

double ParameterSet::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) {
    for (double g : p->grad.values()) sq += g * g;
  }
  return std::sqrt(sq);
}

std::vector<Tensor> ParameterSet::snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterSet::restore(const std::vector<Tensor>& values) {
  if (values.size() != params_.size()) throw ConfigError("snapshot size mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k].shape() == params_[k]->value.shape())) {
      throw ConfigError("snapshot shape mismatch for " + params_[k]->name);
    }
    params_[k]->value = values[k];
  }
}

namespace {

constexpr char kMagic[8] = {'H', 'A', 'T', 'P', 'A', 'R', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xFF));
  }
}

void put_double(std::string& out, double value) {
  put(out, std::bit_cast<std::uint64_t>(value));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += sizeof(T);
    return static_cast<T>(value);
  }

  double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw DataError("parameter file truncated");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_parameters(const ParameterSet& params) {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.all().size()));
  for (const auto& p : params.all()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out += p->name;
    const auto& shape = p->value.shape();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.rank()));
    for (std::size_t axis = 0; axis < shape.rank(); ++axis) put<std::uint64_t>(out, shape[axis]);
    for (double v : p->value.values()) put_double(out, v);
  }
  return out;
}

void decode_parameters(ParameterSet& params, const std::string& bytes) {
  Reader in(bytes);
  if (in.get_bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw DataError("not a parameter file (bad magic)");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kVersion) {
    throw DataError("unsupported parameter file version " + std::to_string(version));
  }
  const auto count = in.get<std::uint32_t>();
  if (count != params.all().size()) {
    throw DataError("parameter file has " + std::to_string(count) + " records, model expects " +
                    std::to_string(params.all().size()));
  }
  std::unordered_set<std::string> seen;
  for (std::uint32_t r = 0; r < count; ++r) {
    const std::string name = in.get_bytes(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    if (rank < 1 || rank > 2) throw DataError("bad rank for " + name);
    const auto d0 = static_cast<std::size_t>(in.get<std::uint64_t>());
    const Shape shape = rank == 1 ? Shape::vector(d0)
                                  : Shape::matrix(d0, static_cast<std::size_t>(in.get<std::uint64_t>()));
    if (!params.contains(name)) throw DataError("unexpected parameter '" + name + "'");
    if (!seen.insert(name).second) throw DataError("duplicate parameter '" + name + "'");
    auto& param = params.get(name);
    if (!(param.value.shape() == shape)) {
      throw DataError("shape mismatch for '" + name + "': file " + shape.str() + ", model " +
                      param.value.shape().str());
    }
    for (double& v : param.value.values()) v = in.get_double();
  }
  if (!in.done()) throw DataError("trailing bytes in parameter file");
}

void save_parameters(const ParameterSet& params, const std::filesystem::path& path) {
  write_text_atomic(path, encode_parameters(params));
}

void load_parameters(ParameterSet& params, const std::filesystem::path& path) {
  decode_parameters(params, read_text_file(path));
}

}  // namespace hardatt::nc
