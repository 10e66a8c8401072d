#include <doctest.h>

#include <random>
#include <vector>

#include "dyngraph/error.h"
#include "dyngraph/tensor.h"

using namespace dyngraph;

TEST_CASE("column-major layout with batch outermost") {
  Tensor m = Tensor::from_values(Shape({2, 2}), std::vector<real>{1, 3, 2, 4});
  CHECK(m.at({0, 1}) == 2);
  CHECK(m.at({1, 0}) == 3);
  CHECK(m.at({0, 0}) == m.data()[0]);

  Tensor b = Tensor::from_values(Shape({2}, 2), std::vector<real>{1, 2, 3, 4});
  CHECK(b.at({0}, 1) == 3);
  CHECK(b.shape().batch() == 2);
  CHECK(b.shape().batch_size() == 2);
}

TEST_CASE("at over every index reproduces data") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    unsigned r = 1 + rng() % 4, c = 1 + rng() % 4, d = 1 + rng() % 3, nb = 1 + rng() % 3;
    Shape s({r, c, d}, nb);
    std::vector<real> xs(s.size());
    for (auto& x : xs) x = static_cast<real>(rng() % 1000);
    Tensor t = Tensor::from_values(s, xs);
    CHECK(t.to_vector() == xs);
    std::size_t k = 0;
    for (unsigned b = 0; b < nb; ++b)
      for (unsigned z = 0; z < d; ++z)
        for (unsigned j = 0; j < c; ++j)
          for (unsigned i = 0; i < r; ++i) CHECK(t.at({i, j, z}, b) == xs[k++]);
  }
}

TEST_CASE("from_values checks length") {
  CHECK(Tensor::from_values(Shape({2}), std::vector<real>{1, 2}).to_vector() == std::vector<real>{1, 2});
  CHECK_THROWS_AS(Tensor::from_values(Shape({2}), std::vector<real>{1, 2, 3}), LengthMismatch);
}

TEST_CASE("argmax") {
  CHECK(argmax(Tensor::from_values(Shape({3}), std::vector<real>{0.1f, 0.9f, 0.0f})) == 1);
  CHECK(argmax(Tensor::from_values(Shape({2}), std::vector<real>{0.5f, 0.5f})) == 0);
  CHECK(argmax(Tensor::from_values(Shape({1}), std::vector<real>{-1})) == 0);
  CHECK_THROWS_AS(argmax(Tensor(Shape({2}, 2))), BadShape);
}

TEST_CASE("shape validation and accessors") {
  CHECK_THROWS_AS(Shape({2, 0}), BadShape);
  CHECK_THROWS_AS(Shape({2}, 0), BadShape);
  CHECK_THROWS_AS(Shape({1, 1, 1, 1, 1}), BadShape);
  Shape s({3, 4}, 5);
  CHECK(s.rows() == 3);
  CHECK(s.cols() == 4);
  CHECK(s.size() == 60);
  CHECK(s.with_batch(1).size() == 12);
  CHECK(Tensor(s).to_vector() == std::vector<real>(60, 0));
  Tensor t(Shape({2}));
  CHECK_THROWS_AS(t.at({2}), IndexOutOfBounds);
  CHECK_THROWS_AS(t.at({0}, 1), IndexOutOfBounds);
}
