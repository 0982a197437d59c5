#include <doctest.h>

#include <cmath>
#include <random>

#include "dsurf/clifford.hpp"
#include "support.hpp"

using namespace dsurf;

namespace {

constexpr Complex I(0.0, 1.0);

double conjugation_error(const Mat4c& U, const Mat4& R) {
  double worst = 0.0;
  const Mat4c Uinv = U.inverse();
  for (int i = 0; i < 4; ++i) {
    Mat4c rhs = Mat4c::Zero();
    for (int m = 0; m < 4; ++m) rhs += R(i, m) * gamma(m + 1);
    worst = std::max(worst, (U * gamma(i + 1) * Uinv - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("gamma matrices in the tensor-product convention") {
  Mat4c g1 = Mat4c::Zero();
  for (int k = 0; k < 4; ++k) g1(k, 3 - k) = 1.0;
  CHECK(gamma(1) == g1);

  Mat4c g4 = Mat4c::Zero();
  g4.block<2, 2>(0, 2) = -I * Mat2c::Identity();
  g4.block<2, 2>(2, 0) = I * Mat2c::Identity();
  CHECK(gamma(4) == g4);

  CHECK_THROWS_AS(gamma(0), std::out_of_range);
  CHECK_THROWS_AS(gamma(5), std::out_of_range);
}

TEST_CASE("Clifford relations hold exactly") {
  for (int i = 1; i <= 4; ++i) {
    CHECK(gamma(i) == gamma(i).adjoint());
    for (int j = 1; j <= 4; ++j) {
      const Mat4c ac = gamma(i) * gamma(j) + gamma(j) * gamma(i);
      CHECK(ac == (i == j ? 2.0 : 0.0) * Mat4c::Identity());
    }
  }
}

TEST_CASE("sigma34 and the gauge rotation") {
  Mat4c expected = Mat4c::Zero();
  expected.diagonal() << I, -I, -I, I;
  CHECK(sigma34() == expected);
  CHECK(sigma34() * sigma34() == -Mat4c::Identity());
  CHECK(gauge_rotation(0.0) == Mat4c::Identity());
  CHECK((gauge_rotation(M_PI / 2) - expected).cwiseAbs().maxCoeff() < 1e-15);
  for (double a : {0.3, -1.2, 2.9}) {
    for (double b : {0.7, 4.0}) {
      CHECK((gauge_rotation(a) * gauge_rotation(b) - gauge_rotation(a + b)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const Mat4c V = gauge_rotation(a);
    CHECK((V * V.adjoint() - Mat4c::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("orthonormal relation of the square basis") {
  const auto& basis = basis_square();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK((conj(basis[a]) * basis[b]).value() == Complex(a == b ? 1.0 : 0.0));
}

TEST_CASE("round basis reproduces the ambient unit vectors") {
  const auto& basis = basis_round();
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector4cd v = so4_pairing(conj(basis[k]), basis[k]);
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(v[j] - Complex(j == k ? 1.0 : 0.0)) <= 1e-15);
    }
  }
}

TEST_CASE("pairing properties") {
  const Spinor e1 = basis_square()[0];
  const Eigen::Vector4cd v = so4_pairing(conj(e1), e1);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(v[j]) <= 1.0);
  const Spinor psi = basis_round()[1];
  const Complex c(0.3, -2.0);
  CHECK((so4_pairing(conj(psi), c * psi) - c * so4_pairing(conj(psi), psi)).norm() <= 1e-15);
  CHECK(conj(conj(psi)) == psi);
}

TEST_CASE("embeddings of the 2D Clifford algebra") {
  CHECK(iota_g(pauli(1)) == gamma(1));
  CHECK(iota_g(pauli(2)) == gamma(2));
  CHECK(iota_g(pauli(3)) == gamma(3));
  CHECK(iota_g(pauli(1)) * iota_g(pauli(2)) == iota_r(pauli(1) * pauli(2)));
  CHECK(iota_r(Mat2c::Identity()) == Mat4c::Identity());
}

TEST_CASE("spin lift of the identity and of a quarter turn") {
  const SpinLift id = spin_lift(Mat4::Identity());
  CHECK((id.U - Mat4c::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_FALSE(id.branch_ambiguous);

  // quarter turn in the (3,4)-plane: R(3,4) = 1, R(4,3) = -1
  Mat4 R = Mat4::Identity();
  R(2, 2) = R(3, 3) = 0.0;
  R(2, 3) = 1.0;
  R(3, 2) = -1.0;
  const SpinLift q = spin_lift(R);
  const double r = 1.0 / std::sqrt(2.0);
  Mat4c expected = Mat4c::Zero();
  expected.diagonal() << Complex(r, -r), Complex(r, r), Complex(r, r), Complex(r, -r);
  CHECK((q.U - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((q.generator - M_PI / 4 * sigma34()).cwiseAbs().maxCoeff() <= 1e-12);
  // exponential series oracle
  Mat4c series = Mat4c::Identity(), term = Mat4c::Identity();
  for (int k = 1; k < 40; ++k) {
    term = term * (-q.generator) / double(k);
    series += term;
  }
  CHECK((series - q.U).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spin lift rejects non-rotations") {
  Mat4 reflection = Mat4::Identity();
  reflection(0, 0) = -1;
  CHECK_THROWS_AS(spin_lift(reflection), GeometryError);
  CHECK_THROWS_AS(spin_lift(2.0 * Mat4::Identity()), GeometryError);
}

TEST_CASE("half turns are flagged and still lift correctly") {
  Mat4 R = Mat4::Identity();
  R(0, 0) = R(1, 1) = -1;
  const SpinLift a = spin_lift(R);
  CHECK(a.branch_ambiguous);
  CHECK(conjugation_error(a.U, R) <= 1e-10);

  const SpinLift b = spin_lift(-Mat4::Identity());
  CHECK(b.branch_ambiguous);
  CHECK(conjugation_error(b.U, -Mat4::Identity()) <= 1e-10);

  // half turn in a plane that is not a coordinate plane
  std::mt19937_64 rng(testing::seed());
  const Mat4 Q = testing::random_rotation(rng);
  const SpinLift c = spin_lift(Q * R * Q.transpose());
  CHECK(c.branch_ambiguous);
  CHECK(conjugation_error(c.U, Q * R * Q.transpose()) <= 1e-10);
}

TEST_CASE("spin lift of random rotations") {
  std::mt19937_64 rng(testing::seed());
  for (int k = 0; k < 100; ++k) {
    const Mat4 R = testing::random_rotation(rng);
    const SpinLift L = spin_lift(R);
    CHECK(conjugation_error(L.U, R) <= 1e-10);
    CHECK((L.U * L.U.adjoint() - Mat4c::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(L.U.determinant() - 1.0) <= 1e-12);
    CHECK((L.log.exp() - R).cwiseAbs().maxCoeff() <= 1e-10);

    // bilinears of the rotated round basis are the columns of R^{-1}
    for (int kk = 0; kk < 4; ++kk) {
      const Spinor psi = L.U * basis_round()[kk];
      const Eigen::Vector4cd v = so4_pairing(conj(psi), psi);
      CHECK((v.real() - R.transpose().col(kk)).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(v.imag().cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("spin lift respects composition up to sign") {
  std::mt19937_64 rng(testing::seed() + 7);
  for (int k = 0; k < 50; ++k) {
    const Mat4 R1 = testing::random_rotation(rng), R2 = testing::random_rotation(rng);
    const Mat4c U12 = spin_lift(R2 * R1).U;
    const Mat4c prod = spin_lift(R1).U * spin_lift(R2).U;
    // U g^i U^-1 = R^i_m g^m composes in reverse order; the lifts agree up to a sign
    const double err = std::min((U12 - prod).cwiseAbs().maxCoeff(), (U12 + prod).cwiseAbs().maxCoeff());
    CHECK(err <= 1e-10);
  }
}
