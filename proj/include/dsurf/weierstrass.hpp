#pragma once

#include <vector>

#include "dsurf/clifford.hpp"
#include "dsurf/dirac.hpp"

namespace dsurf {

// Frame-derived spinors psi = U Psi. Gauged: U = V(vartheta) U_frame with
// V = gauge_factor, so the basis lies in the kernel of the gauged operator.
struct KernelBasis {
  Vec2 s = Vec2::Zero();
  Mat4c U = Mat4c::Identity();
  SpinLift lift;
  double theta = 0.0;  // gauge angle used (0 when not gauged)
  bool gauged = false;
  FrameData frame;
  std::array<Spinor, 4> psi_square;
  std::array<Spinor, 4> psi_round;

  // max |conj(psi[a]) psi[b] - delta_ab|
  double orthonormality_error() const;
};

// With a neighbouring `reference`, the normal frame is sign-aligned to it, the
// gauge angle is unwrapped near its angle and the sheet of U nearest to its U is taken.
KernelBasis kernel_basis_at(const ImmersionSpec& spec, const Vec2& s, bool gauged,
                            const KernelBasis* reference = nullptr);

struct DiracResidual {
  std::vector<double> steps;
  std::vector<double> residuals;  // max_a |D psi[a]| per step
  std::vector<double> ratios;     // residual(h) / residual(h/2)

  // Every ratio >= min_ratio, or the finest residual is already at round-off.
  bool converges(double min_ratio = 3.5, double floor = 1e-12) const;
};

inline const std::vector<double> kResidualSteps{1e-2, 5e-3, 2.5e-3};

DiracResidual dirac_residual(const ImmersionSpec& spec, const Vec2& s,
                             const std::vector<double>& steps, bool gauged,
                             double symbol_step = kDefaultStep);

struct ReconstructionReport {
  Eigen::Matrix<double, 2, 4> W = Eigen::Matrix<double, 2, 4>::Zero();  // from bilinears
  Eigen::Matrix<double, 2, 4> T = Eigen::Matrix<double, 2, 4>::Zero();  // jets
  double residual_bilinear = 0.0;  // max |W - T|
  double max_imag = 0.0;           // largest imaginary part of a bilinear
  double orthonormality = 0.0;
};

// W^i_alpha = sum_beta g_{alpha beta} Re[conj(psi^(i)) A^beta psi^(i)].
ReconstructionReport reconstruct(const ImmersionSpec& spec, const Vec2& s, bool gauged);

}  // namespace dsurf
