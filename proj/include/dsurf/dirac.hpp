#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dsurf/geometry.hpp"

namespace dsurf {

struct SpinConnection2D {
  Mat2 zweibein = Mat2::Identity();      // f(a, alpha) = f^a_alpha
  Mat2 inv_zweibein = Mat2::Identity();  // finv(alpha, a) = (f^{-1})^alpha_a
  Vec2 omega = Vec2::Zero();             // omega_alpha^{12}
  // christoffel[beta](alpha, gamma) = Gamma^beta_{alpha gamma} of g.
  std::array<Mat2, 2> christoffel{Mat2::Zero(), Mat2::Zero()};
};

SpinConnection2D spin_connection_at(const ImmersionSpec& spec, const Vec2& s, double h = kDefaultStep);

// D = A^1 d_1 + A^2 d_2 + B.
struct OperatorSymbol {
  std::array<Mat4c, 2> A{Mat4c::Zero(), Mat4c::Zero()};
  Mat4c B = Mat4c::Zero();
  // The mean-curvature part of B, (1/2) gamma^nd trace_nd. It is Hermitian; the
  // rest of D is skew for the sqrt(det g)-weighted pairing.
  Mat4c H = Mat4c::Zero();
  // Gauged symbol only: the trace pair vanished and the gauge angle was set to 0.
  bool degenerate = false;
};

// Everything the two symbols need at one point.
struct PointGeometry {
  FrameData frame;
  ConnectionData conn;
  GaugeData gauge;
  SpinConnection2D spin;
};

PointGeometry point_geometry(const ImmersionSpec& spec, const Vec2& s, double h = kDefaultStep,
                             const FrameData* reference = nullptr);

// A^alpha (d_alpha + 1/2 omega_alpha gamma^1 gamma^2 + 1/2 T_alpha sigma34)
//   + 1/2 (gamma^3 trace3 + gamma^4 trace4),   T_alpha = Gamma^3_{alpha 4}.
OperatorSymbol dirac_symbol(const PointGeometry& pg);
// A^alpha (d_alpha + 1/2 omega_alpha gamma^1 gamma^2 + 1/2 hatT_alpha sigma34)
//   + 1/2 gamma^3 hat_trace3.
OperatorSymbol gauged_dirac_symbol(const PointGeometry& pg);

OperatorSymbol dirac_symbol(const ImmersionSpec& spec, const Vec2& s, double h = kDefaultStep);
OperatorSymbol gauged_dirac_symbol(const ImmersionSpec& spec, const Vec2& s, double h = kDefaultStep);

using SpinorField = std::function<Spinor(const Vec2&)>;

// A^alpha (psi(s + h delta_alpha) - psi(s - h delta_alpha)) / 2h + B psi(s).
Spinor apply_pointwise(const OperatorSymbol& symbol, const SpinorField& psi, const Vec2& s, double h);

// Spinor gauge factor exp(-sigma34 vartheta / 2); D^vartheta = V D V^{-1}.
Mat4c gauge_factor(double vartheta);

// | D^vartheta psi - V D (V^{-1} psi) | at s with FD step h, V = gauge_factor(vartheta(s')).
double gauge_covariance_defect(const ImmersionSpec& spec, const Vec2& s, const SpinorField& psi,
                               double h, double symbol_step = kDefaultStep);

inline constexpr Eigen::Index kDefaultDimensionCap = 4096;

struct DiscreteOperator {
  int n1 = 0;
  int n2 = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  Vec2 lo = Vec2::Zero();
  Eigen::MatrixXcd M;
  Eigen::VectorXd W;                  // sqrt(det g) per site
  std::vector<OperatorSymbol> sites;  // row-major: index i * n2 + j

  Eigen::Index dim() const { return 4 * Eigen::Index(n1) * n2; }
  int site(int i, int j) const { return ((i % n1 + n1) % n1) * n2 + ((j % n2 + n2) % n2); }
  Vec2 point(int i, int j) const { return lo + Vec2(i * h1, j * h2); }
};

// Periodic central differences, A^alpha and B at the site. Site frames are
// sign-aligned by a sweep starting at site (0, 0). Throws ParseError-free
// DomainError for non-periodic specs, ResourceError above `cap`, GeometryError
// when the aligned normal frame does not close up across the periodic seams.
DiscreteOperator assemble_grid_operator(const ImmersionSpec& spec, int n1, int n2, bool gauged,
                                        double h = kDefaultStep,
                                        Eigen::Index cap = kDefaultDimensionCap);

// Dense general eigensolver; sorted by real part, then imaginary part.
std::vector<Complex> eigenvalues(const DiscreteOperator& op, Eigen::Index cap = kDefaultDimensionCap);

void sort_spectrum(std::vector<Complex>& values);

// Spectrum of a constant symbol on an n1 x n2 periodic grid with central
// differences: eigenvalues of i sin(k1 h1)/h1 A^1 + i sin(k2 h2)/h2 A^2 + B.
std::vector<Complex> fourier_spectrum(const OperatorSymbol& symbol, int n1, int n2, double h1,
                                      double h2);

// Largest distance of a greedy nearest-neighbour matching; +inf if sizes differ.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b);

// Grid samples of a spinor field, stacked site-major.
Eigen::VectorXcd sample_field(const DiscreteOperator& op, const SpinorField& psi);

// sum_sites W phi^dagger psi h1 h2
Complex weighted_inner(const DiscreteOperator& op, const Eigen::VectorXcd& phi,
                       const Eigen::VectorXcd& psi);

// |<phi, D psi> + <D phi, psi> - <phi, (H + H^dagger) psi>|, weighted pairing.
double ibp_defect(const DiscreteOperator& op, const Eigen::VectorXcd& phi, const Eigen::VectorXcd& psi);

}  // namespace dsurf
