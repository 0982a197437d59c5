#pragma once

#include <array>
#include <type_traits>

#include "dsurf/immersion.hpp"

namespace dsurf {

inline constexpr double kDefaultStep = 1e-3;

// Pointwise moving frame of the immersion. Index conventions: tangent index
// alpha in {0, 1} stands for s^1, s^2; normal index in {0, 1} stands for the
// normals n_3, n_4.
struct FrameData {
  Vec2 s = Vec2::Zero();
  Vec4 x = Vec4::Zero();
  std::array<Vec4, 2> e;                   // e_alpha = d_alpha x
  std::array<std::array<Vec4, 2>, 2> d2x;  // d_alpha d_beta x, symmetric
  std::array<Vec4, 2> ehat;                // Gram-Schmidt of (e_1, e_2)
  std::array<Vec4, 2> n;                   // n_3, n_4
  Mat2 g = Mat2::Identity();
  Mat2 g_inv = Mat2::Identity();
  double det_g = 1.0;

  // Columns (ehat_1, ehat_2, n_3, n_4); a proper rotation.
  Mat4 rotation() const;
  // f^a_alpha = ehat_a . e_alpha (row a, column alpha).
  Mat2 zweibein() const;
};

struct ConnectionData {
  // gamma_tan[nd](beta, alpha) = Gamma^beta_{nd alpha}, from exact jets.
  std::array<Mat2, 2> gamma_tan{Mat2::Zero(), Mat2::Zero()};
  // gamma_nor[alpha](ad, bd) = Gamma^ad_{alpha bd} = n_ad . d_alpha n_bd.
  std::array<Mat2, 2> gamma_nor{Mat2::Zero(), Mat2::Zero()};
  // (Gamma^alpha_{3 alpha}, Gamma^alpha_{4 alpha}).
  Vec2 trace = Vec2::Zero();
  // d_alpha of the two traces: dtrace[nd][alpha].
  std::array<Vec2, 2> dtrace{Vec2::Zero(), Vec2::Zero()};

  double trace3() const { return trace[0]; }
  double trace4() const { return trace[1]; }
  // Gamma^3_{alpha 4} for alpha = 1, 2.
  Vec2 torsion() const { return Vec2(gamma_nor[0](0, 1), gamma_nor[1](0, 1)); }
};

struct GaugeData {
  double theta = 0.0;
  double hat_trace3 = 0.0;
  double hat_trace4 = 0.0;
  // Gamma-hat^3_{alpha 4}, the torsion seen in the frame where trace4 vanishes.
  Vec2 hat_torsion = Vec2::Zero();
  bool degenerate = false;
};

struct TubeSample {
  Vec2 q = Vec2::Zero();
  Mat2 g_tube = Mat2::Identity();
  double rho = 1.0;          // det(g_num) / det(g_S)
  double rho_leading = 1.0;  // (1 + Gamma^alpha_{nd alpha} q^nd)^2
};

// Frame at s. When `reference` is given, the normal pair is sign-aligned to it
// (n_3, n_4 flipped together so the orientation is kept) and a jump of the
// normal frame larger than 0.5 in any component raises GeometryError.
FrameData frame_at(const ImmersionSpec& spec, const Vec2& s, const FrameData* reference = nullptr);

// Flip (n_3, n_4) of `frame` together so n_3 points along the reference n_3.
// Returns the largest component difference of the normals afterwards.
double align_normals(FrameData& frame, const FrameData& reference);

// Traces Gamma^alpha_{nd alpha} from the jets of a single frame.
Vec2 mean_curvature_traces(const FrameData& frame);

// Tangential coefficients Gamma^beta_{nd alpha} from the jets of a single frame.
std::array<Mat2, 2> shape_coefficients(const FrameData& frame);

// Same coefficients from plain central differences of the normal field,
// g^{beta gamma} (d_alpha n_nd . e_gamma). Used as a consistency oracle.
std::array<Mat2, 2> shape_coefficients_fd(const ImmersionSpec& spec, const Vec2& s, double h);

ConnectionData connection_at(const ImmersionSpec& spec, const Vec2& s, double h = kDefaultStep,
                             const FrameData* reference = nullptr);

GaugeData gauge_at(const ConnectionData& conn);

// atan2(-trace4, trace3) from the jets of one frame; 0 at a minimal point.
double gauge_angle(const FrameData& frame);

TubeSample tube_metric_at(const ImmersionSpec& spec, const Vec2& s, const Vec2& q,
                          double h = kDefaultStep);

// Central difference with one Richardson step: (4 D(h/2) - D(h)) / 3.
template <class F>
auto richardson_derivative(F&& f, double h) {
  using R = std::decay_t<decltype(f(h))>;
  const R d1 = (f(h) - f(-h)) / (2.0 * h);
  const R d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
  return R((4.0 * d2 - d1) / 3.0);
}

}  // namespace dsurf
