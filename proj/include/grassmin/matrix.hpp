#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace grassmin {

/// Dense row-major matrix of doubles. Deliberately small: the library
/// targets desk-scale problems, so there is no view machinery; all the
/// arithmetic funnels through the kernel layer.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}
  Mat(int rows, int cols, std::initializer_list<double> values);

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  std::size_t size() const { return a_.size(); }

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double a);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double a, Mat m);
Mat operator*(const Mat& a, const Mat& b);  ///< kernel gemm

Mat transpose(const Mat& a);
double frob_dot(const Mat& a, const Mat& b);
double frob_norm(const Mat& a);
double trace(const Mat& a);

/// [X, Y] = XY - YX
Mat commutator(const Mat& x, const Mat& y);

/// Require matching shapes; throws std::invalid_argument naming `where`.
void check_same_shape(const Mat& a, const Mat& b, const char* where);

/// Real symmetric matrix. Symmetry holds exactly (bitwise) by
/// construction: from() averages X and X^T, and every closed operation
/// preserves the property.
class SymMat {
 public:
  SymMat() = default;

  /// (X + X^T)/2; throws std::invalid_argument if X is not square.
  static SymMat from(const Mat& x);
  /// Wraps a matrix that is already exactly symmetric (checked).
  static SymMat from_exact(Mat x);
  static SymMat zero(int n) { return SymMat(Mat(n, n)); }
  static SymMat identity(int n) { return SymMat(Mat::identity(n)); }
  static SymMat diag(const std::vector<double>& d);

  int dim() const { return m_.rows(); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Mat& mat() const { return m_; }

  SymMat& operator+=(const SymMat& o) { m_ += o.m_; return *this; }
  SymMat& operator-=(const SymMat& o) { m_ -= o.m_; return *this; }
  SymMat& operator*=(double a) { m_ *= a; return *this; }

 private:
  explicit SymMat(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

SymMat operator+(SymMat a, const SymMat& b);
SymMat operator-(SymMat a, const SymMat& b);
SymMat operator*(double a, SymMat m);

inline SymMat symmetrize(const Mat& x) { return SymMat::from(x); }

double frob_dot(const SymMat& a, const SymMat& b);
double frob_norm(const SymMat& a);
double trace(const SymMat& a);

/// X*S*X^T symmetrized exactly; the workhorse for products like APA
/// that are symmetric in exact arithmetic but drift in floating point.
SymMat sandwich(const Mat& x, const SymMat& s);

std::string format_dims(const Mat& a);

}  // namespace grassmin
