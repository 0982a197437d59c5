#include "dsurf/weierstrass.hpp"

#include <cmath>

namespace dsurf {

double KernelBasis::orthonormality_error() const {
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const Complex p = psi_square[a].dot(psi_square[b]);
      worst = std::max(worst, std::abs(p - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

KernelBasis kernel_basis_at(const ImmersionSpec& spec, const Vec2& s, bool gauged,
                            const KernelBasis* reference) {
  KernelBasis kb;
  kb.s = s;
  kb.gauged = gauged;
  kb.frame = frame_at(spec, s, reference ? &reference->frame : nullptr);
  kb.lift = spin_lift(kb.frame.rotation());
  kb.U = kb.lift.U;
  if (gauged) {
    double th = gauge_angle(kb.frame);
    if (reference) th = reference->theta + std::remainder(th - reference->theta, 2.0 * M_PI);
    kb.theta = th;
    kb.U = gauge_factor(th) * kb.U;
  }
  // Nearest sheet of the double cover.
  if (reference && (kb.U - reference->U).norm() > (kb.U + reference->U).norm()) kb.U = -kb.U;

  for (int a = 0; a < 4; ++a) {
    kb.psi_square[a] = kb.U * basis_square()[a];
    kb.psi_round[a] = kb.U * basis_round()[a];
  }
  return kb;
}

bool DiracResidual::converges(double min_ratio, double floor) const {
  if (!residuals.empty() && residuals.back() <= floor) return true;
  for (double r : ratios) {
    if (!(r >= min_ratio)) return false;
  }
  return true;
}

DiracResidual dirac_residual(const ImmersionSpec& spec, const Vec2& s,
                             const std::vector<double>& steps, bool gauged, double symbol_step) {
  const PointGeometry pg = point_geometry(spec, s, symbol_step);
  const OperatorSymbol sym = gauged ? gauged_dirac_symbol(pg) : dirac_symbol(pg);
  const KernelBasis center = kernel_basis_at(spec, s, gauged);

  DiracResidual out;
  out.steps = steps;
  for (double h : steps) {
    double worst = 0.0;
    for (int a = 0; a < 4; ++a) {
      const SpinorField field = [&](const Vec2& p) -> Spinor {
        if (p == s) return center.psi_square[a];
        return kernel_basis_at(spec, p, gauged, &center).psi_square[a];
      };
      worst = std::max(worst, apply_pointwise(sym, field, s, h).norm());
    }
    out.residuals.push_back(worst);
  }
  for (size_t k = 1; k < out.residuals.size(); ++k) {
    out.ratios.push_back(out.residuals[k - 1] / out.residuals[k]);
  }
  return out;
}

ReconstructionReport reconstruct(const ImmersionSpec& spec, const Vec2& s, bool gauged) {
  const KernelBasis kb = kernel_basis_at(spec, s, gauged);
  const FrameData& f = kb.frame;
  const Mat2 finv = f.zweibein().inverse();

  std::array<Mat4c, 2> A;
  for (int be = 0; be < 2; ++be) A[be] = finv(be, 0) * gamma(1) + finv(be, 1) * gamma(2);

  ReconstructionReport r;
  r.orthonormality = kb.orthonormality_error();
  for (int i = 0; i < 4; ++i) {
    const Spinor& psi = kb.psi_round[i];
    Eigen::Vector2d bil;
    for (int be = 0; be < 2; ++be) {
      const Complex v = psi.dot(A[be] * psi);
      bil[be] = v.real();
      r.max_imag = std::max(r.max_imag, std::abs(v.imag()));
    }
    const Vec2 w = f.g * bil;
    r.W(0, i) = w[0];
    r.W(1, i) = w[1];
    r.T(0, i) = f.e[0][i];
    r.T(1, i) = f.e[1][i];
  }
  r.residual_bilinear = (r.W - r.T).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace dsurf
