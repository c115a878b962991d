#pragma once

// Dense row-major matrix plus the handful of structured operations the
// controller equations are written in (Hadamard, Kronecker, vec, reshape,
// row slicing).
//
// Ordering conventions, which differ on purpose:
//   vec_rowmajor(A)          walks A row by row.
//   reshape_columns(x, n, m) fills an n x m matrix column by column.
// So reshape_columns(vec_rowmajor(A^T), n, m) == A for an n x m matrix A. The
// concatenate layer and its backprop seed depend on exactly this pairing.
//
// row_slice takes 1-based indices. Element access through operator() is
// 0-based.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cnnac {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat from_rowmajor(std::size_t rows, std::size_t cols, std::span<const double> data);
  static Mat row_vector(std::span<const double> v);
  static Mat column_vector(std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  Mat transposed() const;
  double sum() const;
  double max_abs() const;
  double frobenius_norm() const;
  bool all_finite() const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, std::span<const double> x);

// Elementwise product; shapes must match.
Mat hadamard(const Mat& a, const Mat& b);

// Block matrix whose (i, j) block is a(i, j) * b.
Mat kronecker(const Mat& a, const Mat& b);

// [A(1,1), ..., A(1,m), A(2,1), ..., A(n,m)].
Vec vec_rowmajor(const Mat& a);

// n x m matrix whose column j holds x((j-1)n+1 : jn).
Mat reshape_columns(std::span<const double> x, std::size_t n, std::size_t m);

// Rows i..j (1-based, inclusive).
Mat row_slice(const Mat& a, std::size_t i, std::size_t j);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
bool all_finite(std::span<const double> v);

}  // namespace cnnac
