#include "dyngraph/params.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

namespace {

constexpr char kMagic[4] = {'D', 'Y', 'N', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint8_t kKindParameter = 0;
constexpr std::uint8_t kKindLookup = 1;

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::is_integral_v<T> || std::is_same_v<T, float>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw FormatError("truncated checkpoint " + path.string());
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

void put_header(std::ostream& os, std::uint8_t kind, const std::string& name,
                std::span<const std::uint32_t> dims) {
  put<std::uint8_t>(os, kind);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(dims.size()));
  for (auto d : dims) put<std::uint32_t>(os, d);
}

void put_values(std::ostream& os, std::span<const real> values) {
  for (real v : values) put<float>(os, static_cast<float>(v));
}

void check_header(std::istream& is, const std::filesystem::path& path, std::uint8_t kind,
                  const std::string& name, std::span<const std::uint32_t> dims) {
  const auto got_kind = get<std::uint8_t>(is, path);
  const auto name_len = get<std::uint16_t>(is, path);
  std::string got_name(name_len, '\0');
  if (!is.read(got_name.data(), name_len)) throw FormatError("truncated checkpoint " + path.string());
  const auto rank = get<std::uint8_t>(is, path);
  std::vector<std::uint32_t> got_dims(rank);
  for (auto& d : got_dims) d = get<std::uint32_t>(is, path);
  if (got_kind != kind || got_name != name ||
      !std::equal(got_dims.begin(), got_dims.end(), dims.begin(), dims.end()))
    throw RosterMismatch("checkpoint entry '" + got_name + "' does not match model entry '" +
                         name + "'");
}

std::vector<std::uint32_t> dims_of(const Shape& s) {
  std::vector<std::uint32_t> d;
  for (unsigned i = 0; i < s.rank(); ++i) d.push_back(s[i]);
  return d;
}

}  // namespace

void LookupParameterStorage::clear_touched() {
  for (unsigned r : touched) touched_flag[r] = 0;
  touched.clear();
}

void Parameter::set_values(std::span<const real> values) const {
  if (values.size() != s_->size())
    throw LengthMismatch("parameter '" + s_->name + "' has " + std::to_string(s_->size()) +
                         " values, got " + std::to_string(values.size()));
  std::copy(values.begin(), values.end(), s_->values);
}

void LookupParameter::set_row(unsigned r, std::span<const real> values) const {
  if (r >= s_->rows) throw IndexOutOfBounds("row " + std::to_string(r) + " of '" + s_->name + "'");
  if (values.size() != s_->dim) throw LengthMismatch("row of '" + s_->name + "' has wrong length");
  std::copy(values.begin(), values.end(), s_->row(r).begin());
}

Model::Model(Pool& pool, std::uint64_t seed)
    : pool_(&pool), seed_(seed), rng_(static_cast<std::mt19937::result_type>(seed)) {}

void Model::check_name(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) throw DuplicateName("duplicate parameter name '" + name + "'");
  for (const auto& p : lookups_)
    if (p->name == name) throw DuplicateName("duplicate parameter name '" + name + "'");
}

real* Model::claim(std::size_t n) {
  Region r = pool_->allocate(n * sizeof(real));
  real* p = pool_->as<real>(r);
  std::fill(p, p + n, real(0));
  return p;
}

Parameter Model::add_parameters(const Shape& dims, std::string name) {
  if (dims.batch() != 1) throw BadShape("parameters cannot be batched");
  if (name.empty()) name = "p" + std::to_string(params_.size() + lookups_.size());
  check_name(name);
  auto s = std::make_unique<ParameterStorage>();
  s->name = std::move(name);
  s->shape = dims;
  s->id = static_cast<unsigned>(params_.size());
  s->values = claim(dims.size());
  s->grad = claim(dims.size());
  if (init_ == InitMode::kDefault) {
    const double fan_out = dims[0];
    const double fan_in = dims.rank() > 1 ? dims[1] : 1;
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : s->value_span()) v = static_cast<real>(dist(rng_));
  }
  params_.push_back(std::move(s));
  return Parameter(params_.back().get());
}

LookupParameter Model::add_lookup_parameters(unsigned rows, unsigned dim, std::string name) {
  if (rows == 0 || dim == 0) throw BadShape("lookup parameters need rows >= 1 and dim >= 1");
  if (name.empty()) name = "p" + std::to_string(params_.size() + lookups_.size());
  check_name(name);
  auto s = std::make_unique<LookupParameterStorage>();
  s->name = std::move(name);
  s->rows = rows;
  s->dim = dim;
  s->id = static_cast<unsigned>(lookups_.size());
  s->values = claim(s->size());
  s->grad = claim(s->size());
  s->touched.reserve(rows);
  s->touched_flag.assign(rows, 0);
  if (init_ == InitMode::kDefault) {
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    for (std::size_t i = 0; i < s->size(); ++i) s->values[i] = static_cast<real>(dist(rng_));
  }
  lookups_.push_back(std::move(s));
  return LookupParameter(lookups_.back().get());
}

void Model::zero_gradients() {
  for (auto& p : params_) std::fill(p->grad, p->grad + p->size(), real(0));
  for (auto& p : lookups_) {
    std::fill(p->grad, p->grad + p->size(), real(0));
    p->clear_touched();
  }
}

std::size_t Model::scalar_count() const {
  std::size_t n = 0;
  for (auto& p : params_) n += p->size();
  for (auto& p : lookups_) n += p->size();
  return n;
}

void Model::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FileError("cannot open '" + path.string() + "' for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params_.size() + lookups_.size()));
  for (const auto& p : params_) {
    put_header(os, kKindParameter, p->name, dims_of(p->shape));
    put_values(os, p->value_span());
  }
  for (const auto& p : lookups_) {
    const std::uint32_t dims[2] = {p->rows, p->dim};
    put_header(os, kKindLookup, p->name, dims);
    put_values(os, {p->values, p->size()});
  }
  if (!os) throw FileError("write to '" + path.string() + "' failed");
}

void Model::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileError("cannot open '" + path.string() + "'");
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("'" + path.string() + "' is not a dyngraph checkpoint (bad magic)");
  if (get<std::uint32_t>(is, path) != kFormatVersion)
    throw FormatError("unsupported checkpoint version in '" + path.string() + "'");
  const auto count = get<std::uint32_t>(is, path);
  if (count != params_.size() + lookups_.size())
    throw RosterMismatch("checkpoint has " + std::to_string(count) + " entries, model has " +
                         std::to_string(params_.size() + lookups_.size()));
  // Read everything before writing anything so a mismatch leaves the model intact.
  std::vector<std::vector<real>> staged;
  auto read_values = [&](std::size_t n) {
    std::vector<real> v(n);
    for (auto& x : v) x = static_cast<real>(get<float>(is, path));
    staged.push_back(std::move(v));
  };
  for (const auto& p : params_) {
    check_header(is, path, kKindParameter, p->name, dims_of(p->shape));
    read_values(p->size());
  }
  for (const auto& p : lookups_) {
    const std::uint32_t dims[2] = {p->rows, p->dim};
    check_header(is, path, kKindLookup, p->name, dims);
    read_values(p->size());
  }
  std::size_t k = 0;
  for (auto& p : params_) std::copy(staged[k].begin(), staged[k].end(), p->values), ++k;
  for (auto& p : lookups_) std::copy(staged[k].begin(), staged[k].end(), p->values), ++k;
}

GradientSlots::GradientSlots(const Model& model, Pool& pool) {
  auto claim = [&pool](std::size_t n) {
    real* p = pool.as<real>(pool.allocate(n * sizeof(real)));
    std::fill(p, p + n, real(0));
    return std::span<real>(p, n);
  };
  for (const auto& p : model.parameters()) params_.push_back(claim(p->size()));
  for (const auto& p : model.lookup_parameters()) lookups_.push_back(claim(p->size()));
}

void GradientSlots::zero() {
  for (auto s : params_) std::fill(s.begin(), s.end(), real(0));
  for (auto s : lookups_) std::fill(s.begin(), s.end(), real(0));
}

std::size_t gradient_slot_bytes(const Model& model) {
  auto rounded = [](std::size_t n) {
    return (n * sizeof(real) + Pool::kAlignment - 1) / Pool::kAlignment * Pool::kAlignment;
  };
  std::size_t bytes = 0;
  for (const auto& p : model.parameters()) bytes += rounded(p->size());
  for (const auto& p : model.lookup_parameters()) bytes += rounded(p->size());
  return bytes;
}

DYNGRAPH_END_NAMESPACE
