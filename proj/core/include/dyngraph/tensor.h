#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dyngraph/config.h"

DYNGRAPH_BEGIN_NAMESPACE

// Dimensions of one batch element plus a separate batch count. The batch is
// not an ordinary dimension: operations broadcast a batch-1 operand against
// a batched one.
class Shape {
 public:
  static constexpr unsigned kMaxRank = 4;

  Shape() = default;  // scalar: dims {1}, batch 1
  Shape(std::initializer_list<unsigned> dims, unsigned batch = 1);
  explicit Shape(std::span<const unsigned> dims, unsigned batch = 1);

  unsigned rank() const { return rank_; }
  unsigned operator[](unsigned i) const { return i < rank_ ? dims_[i] : 1; }
  unsigned batch() const { return batch_; }
  unsigned rows() const { return dims_[0]; }
  unsigned cols() const { return rank_ > 1 ? dims_[1] : 1; }

  // Elements in one batch element.
  std::size_t batch_size() const;
  std::size_t size() const { return batch_size() * batch_; }

  Shape with_batch(unsigned batch) const;
  bool same_dims(const Shape& other) const;
  std::string str() const;

  friend bool operator==(const Shape& a, const Shape& b) {
    return a.batch_ == b.batch_ && a.same_dims(b);
  }

 private:
  std::array<unsigned, kMaxRank> dims_{1, 1, 1, 1};
  unsigned rank_ = 1;
  unsigned batch_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Shape& s);

// Owning dense array. Layout: column-major inside a batch element, batch as
// the slowest-varying index, so element b occupies
// data[b * batch_size() .. (b + 1) * batch_size()).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(const Shape& shape);  // zero-filled
  Tensor(const Shape& shape, std::vector<real> values);

  static Tensor from_values(const Shape& shape, std::span<const real> values);

  const Shape& shape() const { return shape_; }
  std::span<const real> data() const { return values_; }
  std::span<real> data() { return values_; }

  real at(std::span<const unsigned> indices, unsigned batch = 0) const;
  real at(std::initializer_list<unsigned> indices, unsigned batch = 0) const {
    return at(std::span<const unsigned>(indices.begin(), indices.size()), batch);
  }
  // Value of a single-element tensor.
  real scalar() const;
  std::vector<real> to_vector() const { return values_; }

 private:
  Shape shape_;
  std::vector<real> values_ = std::vector<real>(1, real(0));
};

// Index of the largest element of an unbatched vector; ties go to the lowest
// index. Throws BadShape for anything else.
unsigned argmax(const Tensor& t);

// Non-owning view over pool memory, used by the op kernels.
struct TensorView {
  Shape shape;
  real* v = nullptr;

  std::size_t size() const { return shape.size(); }
  // Pointer to batch element b; a batch-1 view returns its only element for
  // every b, which is how broadcasting is realized.
  real* batch_ptr(unsigned b) const {
    return shape.batch() == 1 ? v : v + static_cast<std::size_t>(b) * shape.batch_size();
  }
};

DYNGRAPH_END_NAMESPACE
