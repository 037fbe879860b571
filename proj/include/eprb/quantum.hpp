#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "eprb/matrix.hpp"

// Exact state and observable algebra for one- and two-photon polarization
// systems.
//
// Operator convention (everything angle-dependent depends on it): the
// polarization analyzer at angle theta is
//
//     A(theta) = cos(2 theta) Z + sin(2 theta) X
//
// in the fixed (|+>, |->) basis, with Z = diag(+1, -1). Analyzers are
// pi-periodic and the singlet-free Bell pair used here gives
// E(theta_a, theta_b) = cos 2(theta_a - theta_b).
//
// Two-photon basis order is (|++>, |+->, |-+>, |-->), photon 1 major.

namespace eprb {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kDichotomicTol = 1e-10;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kProbabilityClamp = 1e-12;

// Analyzer orientation, physically periodic with period pi.
struct Angle {
  double radians = 0.0;

  Angle canonical() const {
    constexpr double pi = std::numbers::pi;
    double t = std::fmod(radians, pi);
    if (t < 0.0) t += pi;
    return Angle{t};
  }
};

class PureState {
 public:
  explicit PureState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() != 2 && amps_.size() != 4)
      throw std::invalid_argument("PureState: dimension must be 2 or 4");
    if (std::abs(vec_norm(amps_) - 1.0) > kHermitianTol)
      throw std::invalid_argument("PureState: amplitudes are not normalized");
  }

  std::size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amplitudes() const { return amps_; }

 private:
  std::vector<cplx> amps_;
};

// Hermitian matrix with spectrum {-1, +1}, i.e. matrix^2 = identity.
class Observable {
 public:
  static Observable from_matrix(ComplexMatrix m) {
    if (m.dim() != 2 && m.dim() != 4)
      throw std::invalid_argument("Observable: dimension must be 2 or 4");
    if (!m.is_hermitian(kHermitianTol))
      throw std::invalid_argument("Observable: matrix is not Hermitian");
    if (max_abs_diff(m * m, ComplexMatrix::identity(m.dim())) > kDichotomicTol)
      throw std::invalid_argument("Observable: matrix^2 != identity (not dichotomic)");
    return Observable(std::move(m));
  }

  std::size_t dim() const { return m_.dim(); }
  const ComplexMatrix& matrix() const { return m_; }

  // Eigenspace projectors (I +- O)/2 onto the +1 and -1 outcomes. These are
  // eigenspace, not eigenvector, projectors, so degenerate spectra need no
  // special casing.
  ComplexMatrix projector(int outcome) const {
    if (outcome != +1 && outcome != -1)
      throw std::invalid_argument("Observable::projector: outcome must be +-1");
    const double half = 0.5 * outcome;
    return cplx(0.5) * ComplexMatrix::identity(dim()) + cplx(half) * m_;
  }

 private:
  explicit Observable(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class DensityOperator {
 public:
  static DensityOperator from_matrix(ComplexMatrix m) {
    if (m.dim() != 2 && m.dim() != 4)
      throw std::invalid_argument("DensityOperator: dimension must be 2 or 4");
    if (!m.is_hermitian(kHermitianTol))
      throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
    if (std::abs(m.trace() - cplx(1.0)) > kTraceTol)
      throw std::invalid_argument("DensityOperator: trace != 1");
    // Eigenvalues in [kEigenvalueFloor, 0) are float noise and clamp to zero;
    // anything more negative is a construction bug, not noise.
    for (double ev : hermitian_eigensystem(m).values)
      if (ev < kEigenvalueFloor)
        throw std::invalid_argument("DensityOperator: negative eigenvalue " + std::to_string(ev));
    return DensityOperator(std::move(m));
  }

  static DensityOperator from_pure(const PureState& psi) {
    return DensityOperator(outer(psi.amplitudes(), psi.amplitudes()));
  }

  std::size_t dim() const { return m_.dim(); }
  const ComplexMatrix& matrix() const { return m_; }

  std::vector<double> eigenvalues() const {
    auto vals = hermitian_eigensystem(m_).values;
    for (double& v : vals)
      if (v < 0.0) v = 0.0;
    return vals;
  }

 private:
  explicit DensityOperator(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

inline Observable pauli_z() {
  ComplexMatrix z(2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return Observable::from_matrix(std::move(z));
}

inline Observable pauli_x() {
  ComplexMatrix x(2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  return Observable::from_matrix(std::move(x));
}

// cos(2 theta) Z + sin(2 theta) X; eigenvalues exactly +-1 for any theta.
inline Observable polarizer_observable(Angle angle) {
  const double c = std::cos(2.0 * angle.radians);
  const double s = std::sin(2.0 * angle.radians);
  ComplexMatrix m(2);
  m(0, 0) = c;
  m(0, 1) = s;
  m(1, 0) = s;
  m(1, 1) = -c;
  return Observable::from_matrix(std::move(m));
}

// Eigenvector of polarizer_observable(theta) for the given outcome:
// |+,theta> = (cos theta, sin theta), |-,theta> = (-sin theta, cos theta).
inline std::vector<cplx> analyzer_ket(Angle angle, int outcome) {
  const double c = std::cos(angle.radians);
  const double s = std::sin(angle.radians);
  if (outcome == +1) return {cplx(c), cplx(s)};
  if (outcome == -1) return {cplx(-s), cplx(c)};
  throw std::invalid_argument("analyzer_ket: outcome must be +-1");
}

inline Observable tensor(const Observable& a, const Observable& b) {
  return Observable::from_matrix(kron(a.matrix(), b.matrix()));
}

// (1/sqrt 2)(|++> + |-->)
inline PureState bell_state() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState({cplx(r), cplx(0.0), cplx(0.0), cplx(r)});
}

inline DensityOperator maximally_mixed(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0 / static_cast<double>(dim);
  return DensityOperator::from_matrix(std::move(m));
}

// |Phi_theta><Phi_theta| with |Phi_theta> = (|+,t>|+,t> + |-,t>|-,t|)/sqrt 2.
// Equal rotations of both analyzers leave the matrix invariant, so this always
// reproduces the theta = 0 Bell density. Kept as an explicit construction so
// the invariance is checkable rather than assumed.
inline DensityOperator rotated_bell_state(Angle angle) {
  const auto plus = analyzer_ket(angle, +1);
  const auto minus = analyzer_ket(angle, -1);
  std::vector<cplx> phi = kron(plus, plus);
  const std::vector<cplx> mm = kron(minus, minus);
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = r * (phi[i] + mm[i]);
  return DensityOperator::from_pure(PureState(std::move(phi)));
}

// trace(state * obs), real part; a nonvanishing imaginary residue means the
// inputs were not Hermitian.
inline double expectation(const DensityOperator& state, const Observable& obs) {
  if (state.dim() != obs.dim())
    throw std::invalid_argument("expectation: dimension mismatch");
  const cplx t = (state.matrix() * obs.matrix()).trace();
  if (std::abs(t.imag()) > 1e-10)
    throw std::logic_error("expectation: imaginary residue " + std::to_string(t.imag()));
  const double v = t.real();
  if (std::abs(v) > 1.0 + 1e-9)
    throw std::logic_error("expectation: dichotomic expectation outside [-1, 1]");
  return v;
}

// rho_A = sum_a P_a rho P_a over the eigenprojectors of obs.
inline DensityOperator dephase(const DensityOperator& state, const Observable& obs) {
  if (state.dim() != obs.dim()) throw std::invalid_argument("dephase: dimension mismatch");
  const ComplexMatrix pp = obs.projector(+1);
  const ComplexMatrix pm = obs.projector(-1);
  return DensityOperator::from_matrix(pp * state.matrix() * pp + pm * state.matrix() * pm);
}

// Dephases one subsystem of a two-photon state: sandwiches with (P_a x I) or
// (I x P_a) and sums, revealing only that subsystem's distribution.
inline DensityOperator partial_dephase(const DensityOperator& state, const Observable& obs,
                                       int subsystem) {
  if (state.dim() != 4) throw std::invalid_argument("partial_dephase: state must be two-photon");
  if (obs.dim() != 2)
    throw std::invalid_argument("partial_dephase: observable must be single-photon");
  if (subsystem != 1 && subsystem != 2)
    throw std::invalid_argument("partial_dephase: subsystem must be 1 or 2");
  const ComplexMatrix eye = ComplexMatrix::identity(2);
  ComplexMatrix acc(4);
  for (int outcome : {+1, -1}) {
    const ComplexMatrix p = obs.projector(outcome);
    const ComplexMatrix wide = (subsystem == 1) ? kron(p, eye) : kron(eye, p);
    acc = acc + wide * state.matrix() * wide;
  }
  return DensityOperator::from_matrix(std::move(acc));
}

// Unrecorded polarization measurement along theta on photon 1. For the Bell
// state this already equals the full two-sided dephasing: the one-particle
// measurement reveals the complete distribution.
inline DensityOperator measure_collapse(const DensityOperator& state, Angle angle) {
  return partial_dephase(state, polarizer_observable(angle), 1);
}

// Born probabilities p(a, b) for analyzers at (theta_a, theta_b), ordered
// (++, +-, -+, --).
struct JointProbabilities {
  std::array<double, 4> p{};  // indexed by 2*(a<0) + (b<0)

  double p_pp() const { return p[0]; }
  double p_pm() const { return p[1]; }
  double p_mp() const { return p[2]; }
  double p_mm() const { return p[3]; }
};

inline JointProbabilities joint_probabilities(const DensityOperator& state, Angle theta_a,
                                              Angle theta_b) {
  if (state.dim() != 4)
    throw std::invalid_argument("joint_probabilities: state must be two-photon");
  const Observable oa = polarizer_observable(theta_a);
  const Observable ob = polarizer_observable(theta_b);
  JointProbabilities out;
  std::size_t k = 0;
  double sum = 0.0;
  for (int a : {+1, -1}) {
    for (int b : {+1, -1}) {
      const cplx t = (state.matrix() * kron(oa.projector(a), ob.projector(b))).trace();
      double p = t.real();
      if (p < -kProbabilityClamp)
        throw std::logic_error("joint_probabilities: negative probability " + std::to_string(p));
      if (p < 0.0) p = 0.0;
      out.p[k++] = p;
      sum += p;
    }
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::logic_error("joint_probabilities: probabilities sum to " + std::to_string(sum));
  return out;
}

}  // namespace eprb
