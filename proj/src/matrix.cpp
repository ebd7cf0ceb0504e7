#include "grassmin/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "grassmin/kernels.hpp"

namespace grassmin {

Mat::Mat(int rows, int cols, std::initializer_list<double> values) : Mat(rows, cols) {
  if (values.size() != a_.size())
    throw std::invalid_argument("Mat: initializer has " + std::to_string(values.size()) +
                                " entries, expected " + std::to_string(a_.size()));
  std::size_t i = 0;
  for (double v : values) a_[i++] = v;
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat& Mat::operator+=(const Mat& o) {
  check_same_shape(*this, o, "Mat::operator+=");
  kernels::active().axpy(a_.data(), 1.0, o.a_.data(), a_.size());
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  check_same_shape(*this, o, "Mat::operator-=");
  kernels::active().axpy(a_.data(), -1.0, o.a_.data(), a_.size());
  return *this;
}

Mat& Mat::operator*=(double a) {
  kernels::active().scal(a_.data(), a, a_.size());
  return *this;
}

Mat operator+(Mat a, const Mat& b) { a += b; return a; }
Mat operator-(Mat a, const Mat& b) { a -= b; return a; }
Mat operator*(double a, Mat m) { m *= a; return m; }

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions " + format_dims(a) + " vs " + format_dims(b));
  Mat c(a.rows(), b.cols());
  kernels::active().gemm(c.data(), a.data(), b.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double frob_dot(const Mat& a, const Mat& b) {
  check_same_shape(a, b, "frob_dot");
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double frob_norm(const Mat& a) { return std::sqrt(frob_dot(a, a)); }

double trace(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("trace: matrix not square, " + format_dims(a));
  double t = 0.0;
  for (int i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

Mat commutator(const Mat& x, const Mat& y) {
  if (!x.square() || !y.square() || x.rows() != y.rows())
    throw std::invalid_argument("commutator: need equal square matrices, got " + format_dims(x) +
                                " and " + format_dims(y));
  return x * y - y * x;
}

void check_same_shape(const Mat& a, const Mat& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(where) + ": shape mismatch " + format_dims(a) +
                                " vs " + format_dims(b));
}

std::string format_dims(const Mat& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

SymMat SymMat::from(const Mat& x) {
  if (!x.square())
    throw std::invalid_argument("symmetrize: matrix not square, " + format_dims(x));
  const int n = x.rows();
  Mat s(n, n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = x(i, i);
    for (int j = i + 1; j < n; ++j) {
      const double v = (x(i, j) + x(j, i)) / 2.0;
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return SymMat(std::move(s));
}

SymMat SymMat::from_exact(Mat x) {
  if (!x.square())
    throw std::invalid_argument("SymMat::from_exact: matrix not square, " + format_dims(x));
  for (int i = 0; i < x.rows(); ++i)
    for (int j = i + 1; j < x.cols(); ++j)
      if (x(i, j) != x(j, i))
        throw std::invalid_argument("SymMat::from_exact: entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") not bitwise symmetric");
  return SymMat(std::move(x));
}

SymMat SymMat::diag(const std::vector<double>& d) {
  Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (int i = 0; i < m.rows(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return SymMat(std::move(m));
}

SymMat operator+(SymMat a, const SymMat& b) { a += b; return a; }
SymMat operator-(SymMat a, const SymMat& b) { a -= b; return a; }
SymMat operator*(double a, SymMat m) { m *= a; return m; }

double frob_dot(const SymMat& a, const SymMat& b) { return frob_dot(a.mat(), b.mat()); }
double frob_norm(const SymMat& a) { return frob_norm(a.mat()); }
double trace(const SymMat& a) { return trace(a.mat()); }

SymMat sandwich(const Mat& x, const SymMat& s) {
  return SymMat::from(x * s.mat() * transpose(x));
}

}  // namespace grassmin
