#pragma once

#include <array>

#include "dsurf/types.hpp"

namespace dsurf {

// gamma^i for i = 1..4: tau1 x tau1, tau1 x tau2, tau1 x tau3, tau2 x I.
// Throws std::out_of_range for other indices.
const Mat4c& gamma(int i);

// Pauli matrices tau_1..tau_3.
const Mat2c& pauli(int k);

// sigma^34 = gamma^3 gamma^4 = i diag(1, -1, -1, 1); squares to -I.
const Mat4c& sigma34();

// Psi^[a]: the standard unit spinors (orthonormal relation).
const std::array<Spinor, 4>& basis_square();
// Psi^(k): spinors whose pairings give the ambient unit vectors (SO(4) representation).
const std::array<Spinor, 4>& basis_round();

inline CoSpinor conj(const Spinor& psi) { return psi.adjoint(); }
inline Spinor conj(const CoSpinor& psi) { return psi.adjoint(); }

// Component j is psi_bar gamma^j psi.
Eigen::Vector4cd so4_pairing(const CoSpinor& psi_bar, const Spinor& psi);

struct SpinLift {
  Mat4c U;          // exp(-Omega)
  Mat4c generator;  // Omega = 1/4 sum A_ij gamma^i gamma^j
  Mat4 log;         // A, the principal real logarithm of R
  // Some invariant plane turns by pi; the log (and so the sheet of U) is not unique there.
  bool branch_ambiguous = false;
};

// U gamma^i U^{-1} = sum_mu R(i, mu) gamma^mu. Only defined up to a global sign;
// every downstream quantity is bilinear in U. Throws GeometryError when R is not
// special orthogonal to 1e-10.
SpinLift spin_lift(const Mat4& R);

// exp(sigma34 theta) = cos(theta) I + sin(theta) sigma34.
Mat4c gauge_rotation(double theta);

// tau1 x a and I x a.
Mat4c iota_g(const Mat2c& a);
Mat4c iota_r(const Mat2c& a);

}  // namespace dsurf
