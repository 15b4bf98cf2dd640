// Small dense linear algebra over double and std::complex<double>.
//
// Index convention shared by every module: matrices are row-major, and in a
// tensor product the left factor is the most significant index, i.e. entry
// (i, j) of a (x) b lands at position i * dim(b) + j.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "tqkd/errors.hpp"

namespace tqkd {

using complex = std::complex<double>;
using CVector = std::vector<complex>;
using RVector = std::vector<double>;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
constexpr T conj(const T& x) {
  if constexpr (is_complex<T>::value) {
    return std::conj(x);
  } else {
    return x;
  }
}

}  // namespace detail

template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw dimension_mismatch("matrix data size does not equal rows * cols");
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw dimension_mismatch("matrix product: inner dimensions differ");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
    if (a.cols_ != v.size()) throw dimension_mismatch("matrix-vector product: size mismatch");
    std::vector<T> r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      T s{};
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw dimension_mismatch("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = Matrix<complex>;
using RMatrix = Matrix<double>;

template <class T>
Matrix<T> adjoint(const Matrix<T>& m) {
  Matrix<T> r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = detail::conj(m(i, j));
  return r;
}

template <class T>
T trace(const Matrix<T>& m) {
  if (!m.square()) throw dimension_mismatch("trace of a non-square matrix");
  T s{};
  for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, i);
  return s;
}

template <class T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw dimension_mismatch("matrix shapes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

template <class T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw dimension_mismatch("vector sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// <u|v>, antilinear in the first argument.
template <class T>
T inner(const std::vector<T>& u, const std::vector<T>& v) {
  if (u.size() != v.size()) throw dimension_mismatch("inner product: sizes differ");
  T s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += detail::conj(u[i]) * v[i];
  return s;
}

template <class T>
double norm(const std::vector<T>& v) {
  return std::sqrt(std::abs(inner(v, v)));
}

template <class T>
std::vector<T> scaled(std::vector<T> v, const T& s) {
  for (auto& x : v) x *= s;
  return v;
}

// y += s * x
template <class T>
void axpy(const T& s, const std::vector<T>& x, std::vector<T>& y) {
  if (x.size() != y.size()) throw dimension_mismatch("axpy: sizes differ");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

// |u><v|
template <class T>
Matrix<T> outer(const std::vector<T>& u, const std::vector<T>& v) {
  Matrix<T> m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * detail::conj(v[j]);
  return m;
}

template <class T>
Matrix<T> projector(const std::vector<T>& u) {
  return outer(u, u);
}

template <class T>
std::vector<T> tensor_product(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i * b.size() + j] = a[i] * b[j];
  return r;
}

template <class T>
Matrix<T> tensor_product(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

template <class T>
bool is_hermitian(const Matrix<T>& m, double tol = kHermitianTolerance) {
  if (!m.square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - detail::conj(m(j, i))) > tol) return false;
  return true;
}

template <class T>
bool is_unitary(const Matrix<T>& m, double tol = kUnitaryTolerance) {
  if (!m.square()) return false;
  return max_abs_diff(adjoint(m) * m, Matrix<T>::identity(m.rows())) <= tol;
}

namespace detail {

// Splits a flat index over `dims` into (kept index, traced index).
inline std::vector<std::pair<std::size_t, std::size_t>> split_indices(std::span<const std::size_t> dims,
                                                                     const std::vector<bool>& kept) {
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<std::pair<std::size_t, std::size_t>> out(total);
  std::vector<std::size_t> digit(dims.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t keep = 0;
    std::size_t drop = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (kept[f]) {
        keep = keep * dims[f] + digit[f];
      } else {
        drop = drop * dims[f] + digit[f];
      }
    }
    out[flat] = {keep, drop};
    for (std::size_t f = dims.size(); f-- > 0;) {
      if (++digit[f] < dims[f]) break;
      digit[f] = 0;
    }
  }
  return out;
}

inline std::vector<bool> kept_mask(std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  std::vector<bool> mask(dims.size(), false);
  for (auto k : keep) {
    if (k >= dims.size()) throw dimension_mismatch("partial trace: kept factor index out of range");
    mask[k] = true;
  }
  return mask;
}

inline std::size_t product(std::span<const std::size_t> dims, const std::vector<bool>& mask, bool want) {
  std::size_t p = 1;
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (mask[f] == want) p *= dims[f];
  return p;
}

}  // namespace detail

// Trace over every factor not listed in `keep`. Kept factors stay in their
// original relative order.
template <class T>
Matrix<T> partial_trace(const Matrix<T>& m, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  const auto mask = detail::kept_mask(dims, keep);
  const std::size_t total = detail::product(dims, mask, true) * detail::product(dims, mask, false);
  if (!m.square() || m.rows() != total) throw dimension_mismatch("partial trace: matrix does not match dims");
  const auto idx = detail::split_indices(dims, mask);
  const std::size_t kd = detail::product(dims, mask, true);
  Matrix<T> r(kd, kd);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j)
      if (idx[i].second == idx[j].second) r(idx[i].first, idx[j].first) += m(i, j);
  return r;
}

// Reduced state of a pure state |v><v| without forming the full projector.
template <class T>
Matrix<T> partial_trace(const std::vector<T>& v, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  const auto mask = detail::kept_mask(dims, keep);
  const std::size_t kd = detail::product(dims, mask, true);
  const std::size_t td = detail::product(dims, mask, false);
  if (v.size() != kd * td) throw dimension_mismatch("partial trace: vector does not match dims");
  const auto idx = detail::split_indices(dims, mask);
  Matrix<T> amp(kd, td);
  for (std::size_t i = 0; i < v.size(); ++i) amp(idx[i].first, idx[i].second) = v[i];
  Matrix<T> r(kd, kd);
  for (std::size_t a = 0; a < kd; ++a)
    for (std::size_t b = 0; b < kd; ++b) {
      T s{};
      for (std::size_t t = 0; t < td; ++t) s += amp(a, t) * detail::conj(amp(b, t));
      r(a, b) = s;
    }
  return r;
}

template <class T>
Matrix<T> partial_trace(const Matrix<T>& m, std::initializer_list<std::size_t> dims,
                        std::initializer_list<std::size_t> keep) {
  std::vector<std::size_t> d(dims), k(keep);
  return partial_trace(m, std::span<const std::size_t>(d), std::span<const std::size_t>(k));
}

template <class T>
Matrix<T> partial_trace(const std::vector<T>& v, std::initializer_list<std::size_t> dims,
                        std::initializer_list<std::size_t> keep) {
  std::vector<std::size_t> d(dims), k(keep);
  return partial_trace(v, std::span<const std::size_t>(d), std::span<const std::size_t>(k));
}

struct EigenResult {
  RVector values;   // descending
  CMatrix vectors;  // column j belongs to values[j]
};

// Cyclic Jacobi for Hermitian matrices. Each rotation first removes the phase
// of the pivot element, then applies the real symmetric Jacobi rotation.
inline EigenResult hermitian_eigen(const CMatrix& input) {
  if (!is_hermitian(input, kHermitianTolerance)) throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");
  const std::size_t n = input.rows();
  CMatrix a = input;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = std::conj(a(i, j));
  }
  CMatrix v = CMatrix::identity(n);

  double scale = 0.0;
  for (auto x : a.data()) scale = std::max(scale, std::abs(x));
  const double eps = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= eps) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= eps * 1e-3) continue;
        const complex phase = a(p, q) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        const complex upp = c;
        const complex upq = s;
        const complex uqp = -s * std::conj(phase);
        const complex uqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const complex akp = a(k, p);
          const complex akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
          const complex vkp = v(k, p);
          const complex vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const complex apk = a(p, k);
          const complex aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
  EigenResult r{RVector(n), CMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    r.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i, order[j]);
  }
  return r;
}

// f(m) for Hermitian m via its eigendecomposition.
template <class F>
CMatrix hermitian_function(const EigenResult& e, F&& f) {
  const std::size_t n = e.values.size();
  CMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.values[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r(i, j) += fk * e.vectors(i, k) * std::conj(e.vectors(j, k));
  }
  return r;
}

struct LstsqResult {
  RVector x;
  double residual = 0.0;   // ||a x - b||_2
  double condition = 1.0;  // max |R_ii| / min |R_ii|
};

inline constexpr double kRankTolerance = 1e-10;

// Least squares by Householder QR.
inline LstsqResult lstsq_real(RMatrix a, RVector b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw dimension_mismatch("lstsq: right-hand side length differs from row count");
  if (m < n) throw dimension_mismatch("lstsq: fewer rows than columns");
  const RMatrix a0 = a;
  const RVector b0 = b;

  RVector diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sigma = 0.0;
    for (std::size_t i = k; i < m; ++i) sigma += a(i, k) * a(i, k);
    double alpha = std::sqrt(sigma);
    if (a(k, k) > 0) alpha = -alpha;
    diag[k] = alpha;
    if (alpha == 0.0) continue;
    // v = x - alpha e1, stored in column k below the diagonal
    a(k, k) -= alpha;
    const double vnorm2 = sigma - 2.0 * alpha * (a(k, k) + alpha) + alpha * alpha;
    if (vnorm2 <= 0.0) continue;
    for (std::size_t j = k + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += a(i, k) * a(i, j);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) a(i, j) -= f * a(i, k);
    }
    double dot = 0.0;
    for (std::size_t i = k; i < m; ++i) dot += a(i, k) * b[i];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t i = k; i < m; ++i) b[i] -= f * a(i, k);
  }

  double rmax = 0.0;
  double rmin = std::numeric_limits<double>::infinity();
  for (auto d : diag) {
    rmax = std::max(rmax, std::abs(d));
    rmin = std::min(rmin, std::abs(d));
  }
  const double cond = rmin > 0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  if (n > 0 && (rmin <= kRankTolerance * rmax || !std::isfinite(cond))) {
    throw rank_deficient("lstsq: matrix is rank deficient", cond);
  }

  LstsqResult r;
  r.condition = n > 0 ? cond : 1.0;
  r.x.assign(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * r.x[j];
    r.x[k] = s / diag[k];
  }
  const RVector fitted = a0 * r.x;
  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) res += (fitted[i] - b0[i]) * (fitted[i] - b0[i]);
  r.residual = std::sqrt(res);
  return r;
}

}  // namespace tqkd
