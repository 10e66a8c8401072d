#include "dyngraph/tensor.h"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

Shape::Shape(std::initializer_list<unsigned> dims, unsigned batch)
    : Shape(std::span<const unsigned>(dims.begin(), dims.size()), batch) {}

Shape::Shape(std::span<const unsigned> dims, unsigned batch) : batch_(batch) {
  if (dims.empty() || dims.size() > kMaxRank)
    throw BadShape("shape rank must be in [1, " + std::to_string(kMaxRank) + "], got " +
                   std::to_string(dims.size()));
  if (batch == 0) throw BadShape("batch count must be positive");
  rank_ = static_cast<unsigned>(dims.size());
  for (unsigned i = 0; i < rank_; ++i) {
    if (dims[i] == 0) throw BadShape("shape dimensions must be positive");
    dims_[i] = dims[i];
  }
}

std::size_t Shape::batch_size() const {
  std::size_t n = 1;
  for (unsigned i = 0; i < rank_; ++i) n *= dims_[i];
  return n;
}

Shape Shape::with_batch(unsigned batch) const {
  if (batch == 0) throw BadShape("batch count must be positive");
  Shape s = *this;
  s.batch_ = batch;
  return s;
}

bool Shape::same_dims(const Shape& other) const {
  if (rank_ != other.rank_) return false;
  for (unsigned i = 0; i < rank_; ++i)
    if (dims_[i] != other.dims_[i]) return false;
  return true;
}

std::string Shape::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Shape& s) {
  os << '{';
  for (unsigned i = 0; i < s.rank(); ++i) os << (i ? "," : "") << s[i];
  os << '}';
  if (s.batch() > 1) os << 'x' << s.batch();
  return os;
}

Tensor::Tensor(const Shape& shape) : shape_(shape), values_(shape.size(), real(0)) {}

Tensor::Tensor(const Shape& shape, std::vector<real> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size())
    throw LengthMismatch("tensor of shape " + shape_.str() + " needs " +
                         std::to_string(shape_.size()) + " values, got " +
                         std::to_string(values_.size()));
}

Tensor Tensor::from_values(const Shape& shape, std::span<const real> values) {
  return Tensor(shape, std::vector<real>(values.begin(), values.end()));
}

real Tensor::at(std::span<const unsigned> indices, unsigned batch) const {
  if (indices.size() != shape_.rank())
    throw IndexOutOfBounds("expected " + std::to_string(shape_.rank()) + " indices, got " +
                           std::to_string(indices.size()));
  if (batch >= shape_.batch())
    throw IndexOutOfBounds("batch index " + std::to_string(batch) + " out of range for " +
                           shape_.str());
  std::size_t offset = 0;
  std::size_t stride = 1;
  for (unsigned i = 0; i < shape_.rank(); ++i) {
    if (indices[i] >= shape_[i])
      throw IndexOutOfBounds("index " + std::to_string(indices[i]) + " out of range for dim " +
                             std::to_string(i) + " of " + shape_.str());
    offset += indices[i] * stride;
    stride *= shape_[i];
  }
  return values_[batch * shape_.batch_size() + offset];
}

real Tensor::scalar() const {
  if (values_.size() != 1) throw BadShape("scalar() on tensor of shape " + shape_.str());
  return values_[0];
}

unsigned argmax(const Tensor& t) {
  if (t.shape().batch() != 1 || t.shape().rank() != 1)
    throw BadShape("argmax expects an unbatched vector, got " + t.shape().str());
  auto d = t.data();
  return static_cast<unsigned>(std::max_element(d.begin(), d.end()) - d.begin());
}

DYNGRAPH_END_NAMESPACE
