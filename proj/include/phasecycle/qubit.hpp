#pragma once

// Single-qubit state in the coherence-order picture:
//   rho = [[1 - P1, C+], [C-, P1]],  C- = conj(C+)
// equivalently rho = I/2 + a_z Sz + C+ S+ + C- S- with a_z = 1/2 - P1,
// S+ = |0><1| (order +1), S- = |1><0| (order -1), Sz = diag(1, -1) (order 0).

#include <array>
#include <complex>

#include <Eigen/Core>

namespace phasecycle {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  BlochVector& operator+=(const BlochVector& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  BlochVector operator*(double s) const { return {x * s, y * s, z * s}; }
};

double dot(const BlochVector& a, const BlochVector& b);

struct QubitState {
  double p1 = 0.0;  // excited-state population
  Complex c_plus{0.0, 0.0};

  static QubitState ground() { return {}; }
  static QubitState from_matrix(const Matrix2c& rho);
  static QubitState from_bloch(const BlochVector& b);

  Matrix2c matrix() const;
  // <sigma_x> = 2 Re C+, <sigma_y> = -2 Im C+, <sigma_z> = 1 - 2 P1.
  BlochVector bloch() const;
  // Coefficient of Sz in the operator expansion.
  double a_z() const { return 0.5 - p1; }

  /// |C+|^2 <= P1 (1 - P1) within tol and 0 <= P1 <= 1 within tol.
  bool is_physical(double tol = 1e-12) const;
};

/// exp(-i angle/2 (cos(phase) sigma_x + sin(phase) sigma_y)): a right-handed
/// rotation of the Bloch vector by `angle` about the in-plane axis at `phase`.
Matrix2c rotation_operator(double angle, double phase);

const Matrix2c& pauli_x();
const Matrix2c& pauli_y();
const Matrix2c& pauli_z();

}  // namespace phasecycle
