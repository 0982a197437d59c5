#include "dsurf/clifford.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace dsurf {

namespace {

constexpr Complex I(0.0, 1.0);

Mat4c kron(const Mat2c& a, const Mat2c& b) { return Eigen::kroneckerProduct(a, b).eval(); }

struct Tables {
  std::array<Mat2c, 3> tau;
  std::array<Mat4c, 4> gam;
  Mat4c s34;
  std::array<Spinor, 4> square;
  std::array<Spinor, 4> round;

  Tables() {
    tau[0] << 0, 1, 1, 0;
    tau[1] << 0, -I, I, 0;
    tau[2] << 1, 0, 0, -1;
    const Mat2c id = Mat2c::Identity();
    gam[0] = kron(tau[0], tau[0]);
    gam[1] = kron(tau[0], tau[1]);
    gam[2] = kron(tau[0], tau[2]);
    gam[3] = kron(tau[1], id);
    s34 = gam[2] * gam[3];

    for (int a = 0; a < 4; ++a) square[a] = Spinor::Unit(a);
    const double r = 1.0 / std::sqrt(2.0);
    round[0] << 0.5, 0.5, 0.5, 0.5;
    round[1] << 0.5, 0.5 * I, 0.5, 0.5 * I;
    round[2] << r, 0, r, 0;
    round[3] << 0.5, 0.5, 0.5 * I, 0.5 * I;
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

constexpr double kOrthoTol = 1e-10;

}  // namespace

const Mat4c& gamma(int i) {
  if (i < 1 || i > 4) throw std::out_of_range("gamma index must be 1..4, got " + std::to_string(i));
  return tables().gam[i - 1];
}

const Mat2c& pauli(int k) {
  if (k < 1 || k > 3) throw std::out_of_range("pauli index must be 1..3, got " + std::to_string(k));
  return tables().tau[k - 1];
}

const Mat4c& sigma34() { return tables().s34; }

const std::array<Spinor, 4>& basis_square() { return tables().square; }
const std::array<Spinor, 4>& basis_round() { return tables().round; }

Eigen::Vector4cd so4_pairing(const CoSpinor& psi_bar, const Spinor& psi) {
  Eigen::Vector4cd v;
  for (int j = 0; j < 4; ++j) v[j] = psi_bar * tables().gam[j] * psi;
  return v;
}

SpinLift spin_lift(const Mat4& R) {
  if ((R.transpose() * R - Mat4::Identity()).cwiseAbs().maxCoeff() > kOrthoTol) {
    throw GeometryError("spin_lift: matrix is not orthogonal");
  }
  if (std::abs(R.determinant() - 1.0) > kOrthoTol) {
    throw GeometryError("spin_lift: determinant is not +1");
  }

  // R = Q T Q^T with T block diagonal: 2x2 rotation blocks and +-1 entries.
  Eigen::RealSchur<Mat4> schur(R);
  const Mat4& T = schur.matrixT();
  const Mat4& Q = schur.matrixU();

  Mat4 blocks = Mat4::Zero();
  bool ambiguous = false;
  std::vector<int> negatives;
  int k = 0;
  while (k < 4) {
    if (k < 3 && T(k + 1, k) != 0.0) {
      const double c = 0.5 * (T(k, k) + T(k + 1, k + 1));
      const double s = 0.5 * (T(k + 1, k) - T(k, k + 1));
      double th = std::atan2(s, c);
      if (std::abs(std::abs(th) - M_PI) < 1e-9) {
        ambiguous = true;
        th = M_PI;
      }
      blocks(k + 1, k) = th;
      blocks(k, k + 1) = -th;
      k += 2;
    } else {
      if (T(k, k) < 0.0) negatives.push_back(k);
      k += 1;
    }
  }
  // Real eigenvalues -1 come in pairs (det R = +1); each pair spans a plane turned by pi.
  for (size_t p = 0; p + 1 < negatives.size(); p += 2) {
    const int a = negatives[p], b = negatives[p + 1];
    Mat4 plane = Mat4::Zero();
    plane(b, a) = M_PI;
    plane(a, b) = -M_PI;
    blocks += plane;
    ambiguous = true;
  }
  // The two -1 Schur vectors need not be adjacent, so the pi-block is built in
  // the permuted basis and rotated back with Q like every other block.
  Mat4 A = Q * blocks * Q.transpose();
  A = 0.5 * (A - A.transpose()).eval();

  SpinLift out;
  out.log = A;
  out.branch_ambiguous = ambiguous;
  Mat4c omega = Mat4c::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (A(i, j) != 0.0) omega += 0.25 * A(i, j) * (tables().gam[i] * tables().gam[j]);
    }
  out.generator = omega;
  out.U = (-omega).exp();
  return out;
}

Mat4c gauge_rotation(double theta) {
  return std::cos(theta) * Mat4c::Identity() + std::sin(theta) * tables().s34;
}

Mat4c iota_g(const Mat2c& a) { return kron(tables().tau[0], a); }

Mat4c iota_r(const Mat2c& a) { return kron(Mat2c::Identity(), a); }

}  // namespace dsurf
