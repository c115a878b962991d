#include "cnnac/mat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cnnac/errors.hpp"

namespace cnnac {

namespace {

std::string dims(const Mat& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + dims(a) + " vs " + dims(b));
  }
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("Mat: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from_rowmajor(std::size_t rows, std::size_t cols, std::span<const double> data) {
  if (data.size() != rows * cols) throw ShapeError("from_rowmajor: length mismatch");
  Mat m(rows, cols);
  std::copy(data.begin(), data.end(), m.data_.begin());
  return m;
}

Mat Mat::row_vector(std::span<const double> v) { return from_rowmajor(1, v.size(), v); }
Mat Mat::column_vector(std::span<const double> v) { return from_rowmajor(v.size(), 1, v); }

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Mat::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double Mat::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Mat::frobenius_norm() const { return norm2(data_); }

bool Mat::all_finite() const { return cnnac::all_finite(data_); }

Mat& Mat::operator+=(const Mat& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimension mismatch " + dims(a) + " * " + dims(b));
  }
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Vec operator*(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ShapeError("matvec: length mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Mat hadamard(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "hadamard");
  Mat out(a.rows(), a.cols());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = x[k] * y[k];
  return out;
}

Mat kronecker(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s == 0.0) continue;
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
          out(i * b.rows() + r, j * b.cols() + c) = s * b(r, c);
    }
  return out;
}

Vec vec_rowmajor(const Mat& a) {
  auto d = a.data();
  return Vec(d.begin(), d.end());
}

Mat reshape_columns(std::span<const double> x, std::size_t n, std::size_t m) {
  if (x.size() != n * m) {
    throw ShapeError("reshape: length " + std::to_string(x.size()) + " != " +
                     std::to_string(n) + "*" + std::to_string(m));
  }
  Mat out(n, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) out(i, j) = x[j * n + i];
  return out;
}

Mat row_slice(const Mat& a, std::size_t i, std::size_t j) {
  if (i < 1 || i > j || j > a.rows()) {
    throw BoundsError("row_slice: rows " + std::to_string(i) + ".." + std::to_string(j) +
                      " outside 1.." + std::to_string(a.rows()));
  }
  return Mat::from_rowmajor(j - i + 1, a.cols(),
                            a.data().subspan((i - 1) * a.cols(), (j - i + 1) * a.cols()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace cnnac
