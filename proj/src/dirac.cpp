#include "dsurf/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsurf/clifford.hpp"

namespace dsurf {

namespace {

constexpr Complex I(0.0, 1.0);

const Mat4c& gamma12() {
  static const Mat4c g = gamma(1) * gamma(2);
  return g;
}

std::array<Mat4c, 2> coordinate_gammas(const Mat2& finv) {
  std::array<Mat4c, 2> A;
  for (int al = 0; al < 2; ++al) A[al] = finv(al, 0) * gamma(1) + finv(al, 1) * gamma(2);
  return A;
}

OperatorSymbol assemble(const PointGeometry& pg, const Vec2& torsion, const Mat4c& H) {
  OperatorSymbol out;
  out.A = coordinate_gammas(pg.spin.inv_zweibein);
  out.H = H;
  out.B = H;
  for (int al = 0; al < 2; ++al) {
    const Mat4c K = 0.5 * pg.spin.omega[al] * gamma12() + 0.5 * torsion[al] * sigma34();
    out.B += out.A[al] * K;
  }
  return out;
}

double unwrap_near(double angle, double center) {
  return center + std::remainder(angle - center, 2.0 * M_PI);
}

}  // namespace

SpinConnection2D spin_connection_at(const ImmersionSpec& spec, const Vec2& s, double h) {
  const FrameData c = frame_at(spec, s);
  SpinConnection2D out;
  out.zweibein = c.zweibein();
  out.inv_zweibein = out.zweibein.inverse();

  // d_gamma g_{alpha beta} = d_gamma e_alpha . e_beta + e_alpha . d_gamma e_beta
  std::array<Mat2, 2> dg;
  for (int ga = 0; ga < 2; ++ga)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) dg[ga](a, b) = c.d2x[ga][a].dot(c.e[b]) + c.e[a].dot(c.d2x[ga][b]);

  for (int be = 0; be < 2; ++be) {
    Mat2 m;
    for (int al = 0; al < 2; ++al)
      for (int ga = 0; ga < 2; ++ga) {
        double sum = 0.0;
        for (int de = 0; de < 2; ++de)
          sum += c.g_inv(be, de) * (dg[al](de, ga) + dg[ga](de, al) - dg[de](al, ga));
        m(al, ga) = 0.5 * sum;
      }
    out.christoffel[be] = m;
  }

  for (int al = 0; al < 2; ++al) {
    const Mat2 dfinv = richardson_derivative(
        [&](double t) {
          Vec2 p = s;
          p[al] += t;
          return Mat2(frame_at(spec, p).zweibein().inverse());
        },
        h);
    // nabla_alpha of the inverse zweibein columns E_a^beta.
    Mat2 nab = dfinv;
    for (int be = 0; be < 2; ++be)
      for (int a = 0; a < 2; ++a)
        for (int ga = 0; ga < 2; ++ga) nab(be, a) += out.christoffel[be](al, ga) * out.inv_zweibein(ga, a);
    const double w12 = out.zweibein.row(0).dot(nab.col(1));
    const double w21 = out.zweibein.row(1).dot(nab.col(0));
    out.omega[al] = 0.5 * (w12 - w21);
  }
  return out;
}

PointGeometry point_geometry(const ImmersionSpec& spec, const Vec2& s, double h,
                             const FrameData* reference) {
  PointGeometry pg;
  pg.frame = frame_at(spec, s, reference);
  pg.conn = connection_at(spec, s, h, &pg.frame);
  pg.gauge = gauge_at(pg.conn);
  pg.spin = spin_connection_at(spec, s, h);
  return pg;
}

OperatorSymbol dirac_symbol(const PointGeometry& pg) {
  const Mat4c H = 0.5 * (pg.conn.trace3() * gamma(3) + pg.conn.trace4() * gamma(4));
  return assemble(pg, pg.conn.torsion(), H);
}

OperatorSymbol gauged_dirac_symbol(const PointGeometry& pg) {
  const Mat4c H = 0.5 * pg.gauge.hat_trace3 * gamma(3);
  OperatorSymbol out = assemble(pg, pg.gauge.hat_torsion, H);
  out.degenerate = pg.gauge.degenerate;
  return out;
}

OperatorSymbol dirac_symbol(const ImmersionSpec& spec, const Vec2& s, double h) {
  return dirac_symbol(point_geometry(spec, s, h));
}

OperatorSymbol gauged_dirac_symbol(const ImmersionSpec& spec, const Vec2& s, double h) {
  return gauged_dirac_symbol(point_geometry(spec, s, h));
}

Spinor apply_pointwise(const OperatorSymbol& symbol, const SpinorField& psi, const Vec2& s, double h) {
  Spinor out = symbol.B * psi(s);
  for (int al = 0; al < 2; ++al) {
    Vec2 sp = s, sm = s;
    sp[al] += h;
    sm[al] -= h;
    out += symbol.A[al] * ((psi(sp) - psi(sm)) / (2.0 * h));
  }
  return out;
}

Mat4c gauge_factor(double vartheta) { return gauge_rotation(-0.5 * vartheta); }

double gauge_covariance_defect(const ImmersionSpec& spec, const Vec2& s, const SpinorField& psi,
                               double h, double symbol_step) {
  const PointGeometry pg = point_geometry(spec, s, symbol_step);
  const OperatorSymbol plain = dirac_symbol(pg);
  const OperatorSymbol gauged = gauged_dirac_symbol(pg);
  const double theta_c = gauge_angle(pg.frame);
  auto theta = [&](const Vec2& p) { return unwrap_near(gauge_angle(frame_at(spec, p, &pg.frame)), theta_c); };

  const Spinor lhs = apply_pointwise(gauged, psi, s, h);
  const SpinorField pulled = [&](const Vec2& p) -> Spinor {
    return gauge_factor(-theta(p)) * psi(p);  // V^{-1}(p) psi(p)
  };
  const Spinor rhs = gauge_factor(theta_c) * apply_pointwise(plain, pulled, s, h);
  return (lhs - rhs).norm();
}

DiscreteOperator assemble_grid_operator(const ImmersionSpec& spec, int n1, int n2, bool gauged,
                                        double h, Eigen::Index cap) {
  if (!spec.periodic[0] || !spec.periodic[1]) {
    throw DomainError("grid operator needs a domain periodic in both parameters");
  }
  if (n1 < 4 || n2 < 4) throw DomainError("grid operator needs at least 4 sites per direction");
  const Eigen::Index dim = 4 * Eigen::Index(n1) * n2;
  if (dim > cap) {
    throw ResourceError("operator dimension " + std::to_string(dim) + " exceeds cap " +
                        std::to_string(cap));
  }

  DiscreteOperator op;
  op.n1 = n1;
  op.n2 = n2;
  op.h1 = spec.domain[0].width() / n1;
  op.h2 = spec.domain[1].width() / n2;
  op.lo = Vec2(spec.domain[0].lo, spec.domain[1].lo);

  // Sign-align site frames along the sweep (0,0) -> (i,0) -> (i,j). Each step is
  // continued through intermediate frames so coarse grids stay well conditioned.
  auto continue_to = [&](const FrameData& from, const Vec2& to) {
    const double step = 0.05;
    const int m = std::max(1, int(std::ceil((to - from.s).norm() / step)));
    FrameData prev = from;
    for (int k = 1; k <= m; ++k) {
      FrameData f = frame_at(spec, k == m ? to : Vec2(from.s + (to - from.s) * (double(k) / m)));
      align_normals(f, prev);
      prev = f;
    }
    return prev;
  };
  std::vector<FrameData> frames(n1 * n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if (j > 0) {
        frames[op.site(i, j)] = continue_to(frames[op.site(i, j - 1)], op.point(i, j));
      } else if (i > 0) {
        frames[op.site(i, 0)] = continue_to(frames[op.site(i - 1, 0)], op.point(i, 0));
      } else {
        frames[0] = frame_at(spec, op.point(0, 0));
      }
    }
  }
  // Across a seam the continued frame must come back to the site frame.
  auto closes = [&](int last, int first, const Vec2& period) {
    FrameData f = continue_to(frames[last], frames[first].s + period);
    return f.n[0].dot(frames[first].n[0]) > 0.0;
  };
  const Vec2 p1(spec.domain[0].width(), 0.0), p2(0.0, spec.domain[1].width());
  for (int i = 0; i < n1; ++i) {
    if (!closes(op.site(i, n2 - 1), op.site(i, 0), p2))
      throw GeometryError("normal frame does not close across the seam of the second parameter");
  }
  for (int j = 0; j < n2; ++j) {
    if (!closes(op.site(n1 - 1, j), op.site(0, j), p1))
      throw GeometryError("normal frame does not close across the seam of the first parameter");
  }

  op.sites.resize(n1 * n2);
  op.W.resize(n1 * n2);
  for (int k = 0; k < n1 * n2; ++k) {
    const int i = k / n2, j = k % n2;
    const PointGeometry pg = point_geometry(spec, op.point(i, j), h, &frames[k]);
    op.sites[k] = gauged ? gauged_dirac_symbol(pg) : dirac_symbol(pg);
    op.W[k] = std::sqrt(pg.frame.det_g);
  }

  op.M = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const int k = op.site(i, j);
      const OperatorSymbol& sym = op.sites[k];
      auto block = [&](int col) { return op.M.block<4, 4>(4 * k, 4 * col); };
      block(k) += sym.B;
      block(op.site(i + 1, j)) += sym.A[0] / (2.0 * op.h1);
      block(op.site(i - 1, j)) -= sym.A[0] / (2.0 * op.h1);
      block(op.site(i, j + 1)) += sym.A[1] / (2.0 * op.h2);
      block(op.site(i, j - 1)) -= sym.A[1] / (2.0 * op.h2);
    }
  }
  return op;
}

void sort_spectrum(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

std::vector<Complex> eigenvalues(const DiscreteOperator& op, Eigen::Index cap) {
  if (op.M.rows() > cap) {
    throw ResourceError("operator dimension " + std::to_string(op.M.rows()) + " exceeds cap " +
                        std::to_string(cap));
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.M, false);
  if (es.info() != Eigen::Success) throw Error("eigensolver did not converge");
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  sort_spectrum(out);
  return out;
}

std::vector<Complex> fourier_spectrum(const OperatorSymbol& symbol, int n1, int n2, double h1,
                                      double h2) {
  std::vector<Complex> out;
  out.reserve(4 * n1 * n2);
  for (int m = 0; m < n1; ++m) {
    for (int n = 0; n < n2; ++n) {
      const double k1 = std::sin(2.0 * M_PI * m / n1) / h1;
      const double k2 = std::sin(2.0 * M_PI * n / n2) / h2;
      const Mat4c S = I * k1 * symbol.A[0] + I * k2 * symbol.A[1] + symbol.B;
      Eigen::ComplexEigenSolver<Mat4c> es(S, false);
      for (int r = 0; r < 4; ++r) out.push_back(es.eigenvalues()[r]);
    }
  }
  sort_spectrum(out);
  return out;
}

double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& x : a) {
    size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < b.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(x - b[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

Eigen::VectorXcd sample_field(const DiscreteOperator& op, const SpinorField& psi) {
  Eigen::VectorXcd v(op.dim());
  for (int i = 0; i < op.n1; ++i)
    for (int j = 0; j < op.n2; ++j) v.segment<4>(4 * op.site(i, j)) = psi(op.point(i, j));
  return v;
}

Complex weighted_inner(const DiscreteOperator& op, const Eigen::VectorXcd& phi,
                       const Eigen::VectorXcd& psi) {
  Complex sum = 0.0;
  for (int k = 0; k < op.n1 * op.n2; ++k) {
    sum += op.W[k] * phi.segment<4>(4 * k).dot(psi.segment<4>(4 * k));
  }
  return sum * op.h1 * op.h2;
}

double ibp_defect(const DiscreteOperator& op, const Eigen::VectorXcd& phi, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd dpsi = op.M * psi;
  const Eigen::VectorXcd dphi = op.M * phi;
  Eigen::VectorXcd hpsi(op.dim());
  for (int k = 0; k < op.n1 * op.n2; ++k) {
    const Mat4c& H = op.sites[k].H;
    hpsi.segment<4>(4 * k) = (H + H.adjoint()) * psi.segment<4>(4 * k);
  }
  return std::abs(weighted_inner(op, phi, dpsi) + weighted_inner(op, dphi, psi) -
                  weighted_inner(op, phi, hpsi));
}

}  // namespace dsurf
