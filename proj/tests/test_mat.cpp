#include <doctest.h>

#include <random>

#include "cnnac/errors.hpp"
#include "cnnac/mat.hpp"

using namespace cnnac;

namespace {

Mat random_mat(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat m(r, c);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("hadamard") {
  const Mat a{{1, 2}, {3, 4}};
  CHECK(hadamard(a, Mat{{1, 1}, {1, 1}}) == a);
  CHECK(hadamard(a, Mat(2, 2)) == Mat(2, 2));
  CHECK(hadamard(Mat{{2, 3}}, Mat{{4, 5}}) == Mat{{8, 15}});
  CHECK_THROWS_AS(hadamard(a, Mat(2, 3)), ShapeError);
}

TEST_CASE("hadamard is commutative and associative") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = random_mat(rng, 3, 4), b = random_mat(rng, 3, 4), c = random_mat(rng, 3, 4);
    CHECK(hadamard(a, b) == hadamard(b, a));
    const Mat l = hadamard(hadamard(a, b), c), r = hadamard(a, hadamard(b, c));
    for (std::size_t k = 0; k < l.size(); ++k) CHECK(l.data()[k] == doctest::Approx(r.data()[k]).epsilon(1e-15));
  }
}

TEST_CASE("kronecker") {
  CHECK(kronecker(Mat::identity(2), Mat{{1, 2}}) == Mat{{1, 2, 0, 0}, {0, 0, 1, 2}});
  const Mat m{{1, 2, 3}, {4, 5, 6}};
  CHECK(kronecker(Mat{{1}}, m) == m);
  CHECK(kronecker(Mat{{2}}, Mat::identity(2)) == Mat{{2, 0}, {0, 2}});
  CHECK(kronecker(Mat{{1, 2}, {3, 4}}, Mat{{0, 1}}) == Mat{{0, 1, 0, 2}, {0, 3, 0, 4}});
}

TEST_CASE("kronecker with identity acts block-diagonally") {
  std::mt19937_64 rng(5);
  for (std::size_t k = 1; k <= 4; ++k) {
    const Mat b = random_mat(rng, 2, 3);
    Vec stacked(3 * k);
    for (double& v : stacked) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    const Vec out = kronecker(Mat::identity(k), b) * stacked;
    for (std::size_t blk = 0; blk < k; ++blk) {
      const Vec part = b * std::span<const double>(stacked).subspan(3 * blk, 3);
      for (std::size_t i = 0; i < 2; ++i) CHECK(out[2 * blk + i] == doctest::Approx(part[i]));
    }
  }
}

TEST_CASE("vec_rowmajor walks rows first") {
  CHECK(vec_rowmajor(Mat{{1, 2}, {3, 4}}) == Vec{1, 2, 3, 4});
  CHECK(vec_rowmajor(Mat{{5, 6, 7}}) == Vec{5, 6, 7});
  CHECK(vec_rowmajor(Mat{{5}, {6}}) == Vec{5, 6});
}

TEST_CASE("reshape_columns fills columns") {
  CHECK(reshape_columns(Vec{1, 2, 3, 4}, 2, 2) == Mat{{1, 3}, {2, 4}});
  CHECK(reshape_columns(Vec{1, 2, 3}, 3, 1) == Mat{{1}, {2}, {3}});
  CHECK(reshape_columns(Vec{1, 2, 3, 4, 5, 6}, 2, 3) == Mat{{1, 3, 5}, {2, 4, 6}});
  CHECK_THROWS_AS(reshape_columns(Vec{1, 2, 3}, 2, 2), ShapeError);
}

TEST_CASE("vec and reshape compose through a transpose") {
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t m = 1; m <= 4; ++m) {
      Vec v(n * m);
      for (double& x : v) x = std::uniform_real_distribution<double>(-1, 1)(rng);
      CHECK(vec_rowmajor(reshape_columns(v, n, m).transposed()) == v);
      const Mat a = random_mat(rng, n, m);
      CHECK(reshape_columns(vec_rowmajor(a.transposed()), n, m) == a);
    }
  }
}

TEST_CASE("row_slice is 1-based and inclusive") {
  const Mat m{{1, 2}, {3, 4}, {5, 6}};
  CHECK(row_slice(m, 2, 3) == Mat{{3, 4}, {5, 6}});
  CHECK(row_slice(m, 1, 3) == m);
  CHECK(row_slice(m, 2, 2) == Mat{{3, 4}});
  CHECK_THROWS_AS(row_slice(m, 0, 1), BoundsError);
  CHECK_THROWS_AS(row_slice(m, 2, 4), BoundsError);
  CHECK_THROWS_AS(row_slice(m, 3, 2), BoundsError);
}

TEST_CASE("products and norms") {
  const Mat a{{1, 2}, {3, 4}};
  CHECK(a * Mat::identity(2) == a);
  CHECK(a * Mat{{0, 1}, {1, 0}} == Mat{{2, 1}, {4, 3}});
  CHECK(a * Vec{1, 1} == Vec{3, 7});
  CHECK(a.transposed() == Mat{{1, 3}, {2, 4}});
  CHECK(norm2(Vec{3, 4}) == 5.0);
  CHECK(dot(Vec{1, 2}, Vec{3, 4}) == 11.0);
  CHECK_THROWS_AS(a * Mat(3, 1), ShapeError);
  CHECK(a.all_finite());
}
