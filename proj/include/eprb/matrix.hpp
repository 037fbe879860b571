#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eprb/jsonfmt.hpp"

namespace eprb {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Everything in this project is 2x2 or 4x4,
// so the implementation favors clarity over BLAS-style performance.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return dim_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  bool is_hermitian(double tol) const {
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = r; c < dim_; ++c)
        if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
    return true;
  }

  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b);
    ComplexMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] + b.data_[i];
    return out;
  }

  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b);
    ComplexMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] - b.data_[i];
    return out;
  }

  friend ComplexMatrix operator*(const cplx& s, const ComplexMatrix& a) {
    ComplexMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = s * a.data_[i];
    return out;
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b);
    ComplexMatrix out(a.dim_);
    for (std::size_t r = 0; r < a.dim_; ++r)
      for (std::size_t k = 0; k < a.dim_; ++k) {
        const cplx ark = a(r, k);
        if (ark == cplx{}) continue;
        for (std::size_t c = 0; c < a.dim_; ++c) out(r, c) += ark * b(k, c);
      }
    return out;
  }

 private:
  static void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("matrix dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  ComplexMatrix out(da * db);
  for (std::size_t ra = 0; ra < da; ++ra)
    for (std::size_t ca = 0; ca < da; ++ca)
      for (std::size_t rb = 0; rb < db; ++rb)
        for (std::size_t cb = 0; cb < db; ++cb)
          out(ra * db + rb, ca * db + cb) = a(ra, ca) * b(rb, cb);
  return out;
}

inline std::vector<cplx> kron(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

// |u><v|
inline ComplexMatrix outer(const std::vector<cplx>& u, const std::vector<cplx>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("outer: size mismatch");
  ComplexMatrix out(u.size());
  for (std::size_t r = 0; r < u.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) out(r, c) = u[r] * std::conj(v[c]);
  return out;
}

inline double vec_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k is the eigenvector of values[k]
};

// Cyclic Jacobi diagonalization for Hermitian matrices. Dimensions here are
// at most 4, where Jacobi converges in a handful of sweeps and is accurate to
// a few ulps.
inline EigenSystem hermitian_eigensystem(const ComplexMatrix& input) {
  const std::size_t n = input.dim();
  ComplexMatrix a = input;
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };

  const double scale = std::max(a.max_abs(), 1e-300);
  for (int sweep = 0; sweep < 100 && off_norm() > 1e-15 * scale; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double m = std::abs(apq);
        if (m <= 1e-18 * scale) continue;
        const cplx phase = apq / m;  // e^{i phi}
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * m);
        double t = 1.0;
        if (theta != 0.0) t = (theta > 0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A <- J^dag A J, V <- V J with J the (p,q) complex rotation.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * phase * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(phase) * vkq;
          v(k, q) = s * phase * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

// Golden-test serialization: dimension on the first line, then one line per
// row with (re, im) pairs at 17 significant digits.
inline std::string matrix_to_text(const ComplexMatrix& m) {
  std::string out = std::to_string(m.dim());
  out += '\n';
  for (std::size_t r = 0; r < m.dim(); ++r) {
    for (std::size_t c = 0; c < m.dim(); ++c) {
      if (c > 0) out += ' ';
      out += format_double17(m(r, c).real());
      out += ' ';
      out += format_double17(m(r, c).imag());
    }
    out += '\n';
  }
  return out;
}

inline ComplexMatrix matrix_from_text(const std::string& text) {
  std::istringstream in(text);
  std::size_t dim = 0;
  if (!(in >> dim) || dim == 0) throw std::runtime_error("matrix_from_text: bad dimension");
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im)) throw std::runtime_error("matrix_from_text: truncated data");
      m(r, c) = cplx(re, im);
    }
  return m;
}

}  // namespace eprb
