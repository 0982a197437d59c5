#include "dsurf/geometry.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

namespace dsurf {

namespace {

// A standard basis vector is skipped as a normal pivot when its residual
// against the span built so far is shorter than this.
constexpr double kPivotTolerance = 0.5;
constexpr double kGramTolerance = 1e-10;
constexpr double kBranchJump = 0.5;

std::string point_str(const Vec2& s) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << s[0] << ", " << s[1] << ")";
  return os.str();
}

Mat2 gram(const Vec4& a, const Vec4& b) {
  Mat2 g;
  g(0, 0) = a.dot(a);
  g(0, 1) = a.dot(b);
  g(1, 0) = g(0, 1);
  g(1, 1) = b.dot(b);
  return g;
}

Vec4 orthogonalize(Vec4 v, const std::array<Vec4, 4>& basis, int count) {
  // Two passes of classical Gram-Schmidt keep the result orthogonal to round-off.
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < count; ++k) v -= basis[k].dot(v) * basis[k];
  }
  return v;
}

// Frames at s +- t delta_alpha for t in {h, h/2}, normals aligned to the center.
struct Stencil {
  // frames[alpha][k] for offsets {+h, -h, +h/2, -h/2}
  std::array<std::array<FrameData, 4>, 2> frames;
  double h;

  Stencil(const ImmersionSpec& spec, const FrameData& center, double step) : h(step) {
    const double offsets[4] = {h, -h, 0.5 * h, -0.5 * h};
    for (int a = 0; a < 2; ++a) {
      for (int k = 0; k < 4; ++k) {
        Vec2 p = center.s;
        p[a] += offsets[k];
        frames[a][k] = frame_at(spec, p, &center);
      }
    }
  }

  const FrameData& at(int alpha, double t) const {
    if (t == h) return frames[alpha][0];
    if (t == -h) return frames[alpha][1];
    if (t == 0.5 * h) return frames[alpha][2];
    return frames[alpha][3];
  }

  template <class F>
  auto derivative(int alpha, F&& f) const {
    return richardson_derivative([&](double t) { return f(at(alpha, t)); }, h);
  }
};

}  // namespace

Mat4 FrameData::rotation() const {
  Mat4 r;
  r.col(0) = ehat[0];
  r.col(1) = ehat[1];
  r.col(2) = n[0];
  r.col(3) = n[1];
  return r;
}

Mat2 FrameData::zweibein() const {
  Mat2 f;
  for (int a = 0; a < 2; ++a)
    for (int al = 0; al < 2; ++al) f(a, al) = ehat[a].dot(e[al]);
  return f;
}

FrameData frame_at(const ImmersionSpec& spec, const Vec2& s, const FrameData* reference) {
  FrameData f;
  f.s = s;
  for (int i = 0; i < 4; ++i) {
    const Jet2 j = eval_jet2(spec.coords[i], s);
    f.x[i] = j.value;
    f.e[0][i] = j.grad[0];
    f.e[1][i] = j.grad[1];
    f.d2x[0][0][i] = j.hxx;
    f.d2x[0][1][i] = j.hxy;
    f.d2x[1][0][i] = j.hxy;
    f.d2x[1][1][i] = j.hyy;
  }

  f.g = gram(f.e[0], f.e[1]);
  f.det_g = f.g.determinant();

  const double len1 = f.e[0].norm();
  if (len1 < kGramTolerance) {
    throw GeometryError("degenerate immersion at " + point_str(s) + ": d_1 x vanishes");
  }
  f.ehat[0] = f.e[0] / len1;
  Vec4 r2 = f.e[1] - f.ehat[0].dot(f.e[1]) * f.ehat[0];
  r2 -= f.ehat[0].dot(r2) * f.ehat[0];
  if (r2.norm() < kGramTolerance * std::max(1.0, f.e[1].norm())) {
    throw GeometryError("degenerate immersion at " + point_str(s) + ": tangents are dependent");
  }
  f.ehat[1] = r2.normalized();
  f.g_inv = f.g.inverse();

  std::array<Vec4, 4> basis{f.ehat[0], f.ehat[1], Vec4::Zero(), Vec4::Zero()};
  int count = 2;
  std::array<bool, 4> used{false, false, false, false};
  for (int k = 0; k < 4 && count < 4; ++k) {
    const Vec4 r = orthogonalize(Vec4::Unit(k), basis, count);
    if (r.norm() >= kPivotTolerance) {
      basis[count++] = r.normalized();
      used[k] = true;
    }
  }
  while (count < 4) {
    // No pivot cleared the tolerance; take the longest remaining residual.
    int best = -1;
    double best_norm = 0.0;
    Vec4 best_r = Vec4::Zero();
    for (int k = 0; k < 4; ++k) {
      if (used[k]) continue;
      const Vec4 r = orthogonalize(Vec4::Unit(k), basis, count);
      if (r.norm() > best_norm) {
        best_norm = r.norm();
        best = k;
        best_r = r;
      }
    }
    used[best] = true;
    basis[count++] = best_r.normalized();
  }
  f.n[0] = basis[2];
  f.n[1] = basis[3];
  if (f.rotation().determinant() < 0.0) f.n[1] = -f.n[1];

  if (spec.has_frame_rotation) {
    const double th = eval(spec.frame_rotation, s);
    const double c = std::cos(th), sn = std::sin(th);
    const Vec4 n3 = c * f.n[0] - sn * f.n[1];
    const Vec4 n4 = sn * f.n[0] + c * f.n[1];
    f.n[0] = n3;
    f.n[1] = n4;
  }

  if (reference) {
    const double jump = align_normals(f, *reference);
    if (jump > kBranchJump) {
      throw GeometryError("frame-branch discontinuity near " + point_str(reference->s) +
                          ": normal frame at " + point_str(s) + " jumps by " +
                          std::to_string(jump));
    }
  }
  return f;
}

double align_normals(FrameData& frame, const FrameData& reference) {
  if (frame.n[0].dot(reference.n[0]) < 0.0) {
    frame.n[0] = -frame.n[0];
    frame.n[1] = -frame.n[1];
  }
  return std::max((frame.n[0] - reference.n[0]).cwiseAbs().maxCoeff(),
                  (frame.n[1] - reference.n[1]).cwiseAbs().maxCoeff());
}

std::array<Mat2, 2> shape_coefficients(const FrameData& f) {
  std::array<Mat2, 2> out;
  for (int nd = 0; nd < 2; ++nd) {
    Mat2 m;  // m(beta, alpha)
    for (int al = 0; al < 2; ++al) {
      Vec2 proj(f.n[nd].dot(f.d2x[al][0]), f.n[nd].dot(f.d2x[al][1]));
      m.col(al) = -f.g_inv * proj;
    }
    out[nd] = m;
  }
  return out;
}

Vec2 mean_curvature_traces(const FrameData& f) {
  const auto gt = shape_coefficients(f);
  return Vec2(gt[0].trace(), gt[1].trace());
}

std::array<Mat2, 2> shape_coefficients_fd(const ImmersionSpec& spec, const Vec2& s, double h) {
  const FrameData c = frame_at(spec, s);
  std::array<Mat2, 2> out;
  for (int al = 0; al < 2; ++al) {
    Vec2 sp = s, sm = s;
    sp[al] += h;
    sm[al] -= h;
    const FrameData fp = frame_at(spec, sp, &c);
    const FrameData fm = frame_at(spec, sm, &c);
    for (int nd = 0; nd < 2; ++nd) {
      const Vec4 dn = (fp.n[nd] - fm.n[nd]) / (2.0 * h);
      const Vec2 proj(dn.dot(c.e[0]), dn.dot(c.e[1]));
      out[nd].col(al) = c.g_inv * proj;
    }
  }
  return out;
}

ConnectionData connection_at(const ImmersionSpec& spec, const Vec2& s, double h,
                             const FrameData* reference) {
  const FrameData center = frame_at(spec, s, reference);
  ConnectionData c;
  c.gamma_tan = shape_coefficients(center);
  c.trace = Vec2(c.gamma_tan[0].trace(), c.gamma_tan[1].trace());

  const Stencil st(spec, center, h);
  for (int al = 0; al < 2; ++al) {
    Mat2 m;
    for (int bd = 0; bd < 2; ++bd) {
      const Vec4 dn = st.derivative(al, [bd](const FrameData& f) { return f.n[bd]; });
      for (int ad = 0; ad < 2; ++ad) m(ad, bd) = center.n[ad].dot(dn);
    }
    c.gamma_nor[al] = m;
    const Vec2 dt = st.derivative(al, [](const FrameData& f) { return mean_curvature_traces(f); });
    c.dtrace[0][al] = dt[0];
    c.dtrace[1][al] = dt[1];
  }
  return c;
}

GaugeData gauge_at(const ConnectionData& conn) {
  GaugeData g;
  const double t3 = conn.trace3(), t4 = conn.trace4();
  const double r2 = t3 * t3 + t4 * t4;
  g.hat_trace4 = 0.0;
  if (r2 == 0.0 || std::sqrt(r2) < 1e-12) {
    g.degenerate = true;
    g.theta = 0.0;
    g.hat_trace3 = std::sqrt(r2);
    g.hat_torsion = conn.torsion();
    return g;
  }
  g.theta = std::atan2(-t4, t3);
  g.hat_trace3 = std::sqrt(r2);
  // theta = atan2(-t4, t3)  =>  d theta = (t4 dt3 - t3 dt4) / |t|^2
  const Vec2 dtheta = (t4 * conn.dtrace[0] - t3 * conn.dtrace[1]) / r2;
  g.hat_torsion = conn.torsion() + dtheta;
  return g;
}

double gauge_angle(const FrameData& frame) {
  const Vec2 t = mean_curvature_traces(frame);
  if (t.norm() < 1e-12) return 0.0;
  return std::atan2(-t[1], t[0]);
}

TubeSample tube_metric_at(const ImmersionSpec& spec, const Vec2& s, const Vec2& q, double h) {
  const FrameData center = frame_at(spec, s);
  const auto gt = shape_coefficients(center);
  const Mat2& g = center.g;

  TubeSample t;
  t.q = q;
  Mat2 gq = g;
  for (int ad = 0; ad < 2; ++ad) {
    gq += q[ad] * (gt[ad].transpose() * g + g * gt[ad]);
    for (int bd = 0; bd < 2; ++bd) gq += q[ad] * q[bd] * (gt[ad].transpose() * g * gt[bd]);
  }
  t.g_tube = gq;

  const Vec2 trace(gt[0].trace(), gt[1].trace());
  const double lin = 1.0 + trace.dot(q);
  t.rho_leading = lin * lin;

  if (q.isZero(0.0)) {
    t.rho = 1.0;
    t.g_tube = g;
    return t;
  }

  // First fundamental form of (s, q) -> x(s) + q^3 n_3(s) + q^4 n_4(s) at fixed q.
  const Stencil st(spec, center, h);
  std::array<Vec4, 2> tangent;
  for (int al = 0; al < 2; ++al) {
    const Vec4 dn3 = st.derivative(al, [](const FrameData& f) { return f.n[0]; });
    const Vec4 dn4 = st.derivative(al, [](const FrameData& f) { return f.n[1]; });
    tangent[al] = center.e[al] + q[0] * dn3 + q[1] * dn4;
  }
  t.rho = gram(tangent[0], tangent[1]).determinant() / center.det_g;
  return t;
}

}  // namespace dsurf
