#include "phasecycle/qubit.hpp"

#include <cmath>

namespace phasecycle {

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double dot(const BlochVector& a, const BlochVector& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

QubitState QubitState::from_matrix(const Matrix2c& rho) {
  QubitState s;
  s.p1 = rho(1, 1).real();
  s.c_plus = rho(0, 1);
  return s;
}

QubitState QubitState::from_bloch(const BlochVector& b) {
  QubitState s;
  s.p1 = 0.5 * (1.0 - b.z);
  s.c_plus = Complex(0.5 * b.x, -0.5 * b.y);
  return s;
}

Matrix2c QubitState::matrix() const {
  Matrix2c rho;
  rho << Complex(1.0 - p1, 0.0), c_plus, std::conj(c_plus), Complex(p1, 0.0);
  return rho;
}

BlochVector QubitState::bloch() const {
  return {2.0 * c_plus.real(), -2.0 * c_plus.imag(), 1.0 - 2.0 * p1};
}

bool QubitState::is_physical(double tol) const {
  if (p1 < -tol || p1 > 1.0 + tol) return false;
  return std::norm(c_plus) <= p1 * (1.0 - p1) + tol;
}

Matrix2c rotation_operator(double angle, double phase) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex axis(std::cos(phase), std::sin(phase));
  const Complex i(0.0, 1.0);
  // cos I - i sin (cos(phase) X + sin(phase) Y); off-diagonals carry e^{-+i phase}.
  Matrix2c u;
  u << Complex(c, 0.0), -i * s * std::conj(axis), -i * s * axis, Complex(c, 0.0);
  return u;
}

const Matrix2c& pauli_x() {
  static const Matrix2c m = (Matrix2c() << 0, 1, 1, 0).finished();
  return m;
}

const Matrix2c& pauli_y() {
  static const Matrix2c m =
      (Matrix2c() << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0)).finished();
  return m;
}

const Matrix2c& pauli_z() {
  static const Matrix2c m = (Matrix2c() << 1, 0, 0, -1).finished();
  return m;
}

}  // namespace phasecycle
