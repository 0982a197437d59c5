// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>

#include "dsurf/cli.hpp"
#include "dsurf/clifford.hpp"
#include "dsurf/weierstrass.hpp"
#include "support.hpp"

using namespace dsurf;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<Vec2> lattice(const ImmersionSpec& spec, int n = 9) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pts.emplace_back(spec.domain[0].lo + spec.domain[0].width() * (i + 1) / (n + 1),
                       spec.domain[1].lo + spec.domain[1].width() * (j + 1) / (n + 1));
  return pts;
}

json run_cli(std::vector<std::string> args, int& code, std::string* raw = nullptr) {
  std::ostringstream out, err;
  code = cli::run(args, out, err);
  if (raw) *raw = out.str();
  return json::parse(out.str());
}

double check_worst(const json& doc, const std::string& name) {
  for (const auto& c : doc["checks"]) {
    if (c["name"] == name) return c["worst"].is_number() ? c["worst"].get<double>() : NAN;
  }
  return NAN;
}

bool check_pass(const json& doc, const std::string& name) {
  for (const auto& c : doc["checks"]) {
    if (c["name"] == name) return c["pass"].get<bool>();
  }
  return false;
}

Outcome clifford_axioms() {
  double worst = 0.0;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) {
      const Mat4c ac = gamma(i) * gamma(j) + gamma(j) * gamma(i);
      worst = std::max(worst, (ac - (i == j ? 2.0 : 0.0) * Mat4c::Identity()).cwiseAbs().maxCoeff());
    }
  double ortho = 0.0, rep = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b)
      ortho = std::max(ortho, std::abs((conj(basis_square()[a]) * basis_square()[b]).value() - Complex(a == b)));
    const Eigen::Vector4cd v = so4_pairing(conj(basis_round()[a]), basis_round()[a]);
    for (int j = 0; j < 4; ++j) rep = std::max(rep, std::abs(v[j] - Complex(j == a)));
  }
  // 1/sqrt(2)^2 rounds to 0.5000000000000001; anything beyond one ulp would be a real error
  return {worst == 0.0 && ortho <= 1e-15 && rep <= 1e-15,
          "anticommutator " + fmt("%.1e", worst) + ", orthonormal " + fmt("%.1e", ortho) + ", vectors " +
              fmt("%.1e", rep)};
}

Outcome spin_lift_check() {
  std::mt19937_64 rng(testing::seed());
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Mat4 R = testing::random_rotation(rng);
    const SpinLift L = spin_lift(R);
    const Mat4c Uinv = L.U.inverse();
    for (int i = 0; i < 4; ++i) {
      Mat4c rhs = Mat4c::Zero();
      for (int m = 0; m < 4; ++m) rhs += R(i, m) * gamma(m + 1);
      worst = std::max(worst, (L.U * gamma(i + 1) * Uinv - rhs).norm());
    }
  }
  Mat4 R = Mat4::Identity();
  R(2, 2) = R(3, 3) = 0.0;
  R(2, 3) = 1.0;
  R(3, 2) = -1.0;
  const double r = 1.0 / std::sqrt(2.0);
  Mat4c expected = Mat4c::Zero();
  expected.diagonal() << Complex(r, -r), Complex(r, r), Complex(r, r), Complex(r, -r);
  const double quarter = (spin_lift(R).U - expected).cwiseAbs().maxCoeff();
  return {worst <= 1e-10 && quarter <= 1e-12,
          "conjugation " + fmt("%.1e", worst) + ", quarter turn " + fmt("%.1e", quarter)};
}

Outcome geometry_check() {
  double norm_err = 0.0, antisym = 0.0, shift = 0.0;
  struct Case {
    const char* name;
    const char* theta;
    std::function<Vec2(const Vec2&)> grad;
  };
  const Case cases[] = {{"clifford", "u", [](const Vec2&) { return Vec2(1, 0); }},
                        {"sphere", "v^2/4", [](const Vec2& s) { return Vec2(0, s[1] / 2); }}};
  for (const Case& c : cases) {
    const ImmersionSpec base = testing::load(c.name);
    ImmersionSpec rotated = base;
    rotated.frame_rotation = parse_expression(c.theta, base.params);
    rotated.has_frame_rotation = true;
    for (const Vec2& s : lattice(base)) {
      const ConnectionData c0 = connection_at(base, s);
      const ConnectionData c1 = connection_at(rotated, s);
      norm_err = std::max(norm_err, std::abs(c0.trace.norm() - 2.0));
      for (int a = 0; a < 2; ++a)
        antisym = std::max(antisym, std::abs(c0.gamma_nor[a](0, 1) + c0.gamma_nor[a](1, 0)));
      shift = std::max(shift, (c1.torsion() - c0.torsion() - c.grad(s)).cwiseAbs().maxCoeff());
    }
  }
  return {norm_err <= 1e-8 && antisym <= 1e-8 && shift <= 1e-6,
          "|trace| - 2 " + fmt("%.1e", norm_err) + ", antisymmetry " + fmt("%.1e", antisym) +
              ", rotation shift " + fmt("%.1e", shift)};
}

Outcome tube_check() {
  double min_slope = 1e9;
  for (const char* name : {"clifford", "graph"}) {
    const ImmersionSpec spec = testing::load(name);
    const Vec2 s(0.3, 0.2);
    const Vec2 t = mean_curvature_traces(frame_at(spec, s));
    std::vector<double> diff;
    for (double e : {0.04, 0.02, 0.01}) {
      const TubeSample ts = tube_metric_at(spec, s, e * t / t.norm());
      diff.push_back(std::abs(ts.rho - ts.rho_leading));
    }
    min_slope = std::min(min_slope, std::log(diff[0] / diff[2]) / std::log(4.0));
  }
  const ImmersionSpec plane = testing::load("plane");
  double plane_err = 0.0;
  for (const Vec2& s : lattice(plane, 5))
    for (double e : {0.04, 0.02, 0.01})
      plane_err = std::max(plane_err, std::abs(tube_metric_at(plane, s, Vec2(e, -e)).rho - 1.0));
  return {min_slope >= 1.9 && plane_err <= 1e-12,
          "slope " + fmt("%.3f", min_slope) + ", plane rho - 1 " + fmt("%.1e", plane_err)};
}

const char* kCorpus[] = {"plane", "plane-torus", "graph", "sphere", "clifford", "clifford-rotated",
                         "torus-revolution"};

Outcome weierstrass_check() {
  double w = 0.0, im = 0.0, ortho = 0.0;
  bool orders = true;
  for (const char* name : kCorpus) {
    int code = 0;
    const json doc = run_cli({"verify", testing::corpus(name), "--grid", "9x9"}, code);
    w = std::max(w, check_worst(doc, "weierstrass_residual"));
    im = std::max(im, check_worst(doc, "bilinear_imaginary"));
    ortho = std::max(ortho, check_worst(doc, "spinor_orthonormality"));
    orders = orders && check_pass(doc, "dirac_residual_order");
  }
  return {w <= 1e-8 && im <= 1e-10 && ortho <= 1e-12 && orders,
          "|W - T| " + fmt("%.1e", w) + ", imaginary " + fmt("%.1e", im) + ", orthonormality " +
              fmt("%.1e", ortho) + ", residual order " + (orders ? "ok" : "too slow")};
}

Outcome gauged_check() {
  int code = 0;
  const json doc = run_cli({"verify", testing::corpus("clifford-rotated"), "--grid", "9x9", "--gauged"}, code);
  const double w = check_worst(doc, "weierstrass_residual");
  const double im = check_worst(doc, "bilinear_imaginary");
  const double ortho = check_worst(doc, "spinor_orthonormality");
  const bool orders = check_pass(doc, "dirac_residual_order");
  const bool covariance = check_pass(doc, "gauge_covariance_order");

  const ImmersionSpec spec = testing::load("clifford-rotated");
  double agree = 0.0;
  for (const Vec2& s : lattice(spec))
    agree = std::max(agree, (reconstruct(spec, s, true).W - reconstruct(spec, s, false).W).cwiseAbs().maxCoeff());
  return {code == 0 && w <= 1e-8 && im <= 1e-10 && ortho <= 1e-12 && orders && covariance && agree <= 1e-10,
          "|W - T| " + fmt("%.1e", w) + ", gauged vs plain " + fmt("%.1e", agree) + ", residual order " +
              (orders ? "ok" : "too slow") + ", covariance order " + (covariance ? "ok" : "too slow")};
}

Outcome spectral_check() {
  // clifford torus against the closed form, twice per sign
  const int n = 8;
  const double h = 2 * M_PI / n;
  std::vector<Complex> closed;
  for (int m = -n / 2; m < n / 2; ++m)
    for (int k = -n / 2; k < n / 2; ++k) {
      const double a = std::sin(m * h) / h, b = std::sin(k * h) / h;
      const Complex lam = std::sqrt(Complex(1.0 - 2.0 * (a * a + b * b), 0.0));
      for (int r = 0; r < 2; ++r) {
        closed.push_back(lam);
        closed.push_back(-lam);
      }
    }
  const DiscreteOperator cl = assemble_grid_operator(testing::load("clifford"), n, n, false);
  const double dist = multiset_distance(eigenvalues(cl), closed);

  // plane torus: purely imaginary; zero modes counted against the plane-wave count
  const DiscreteOperator pt = assemble_grid_operator(testing::load("plane-torus"), n, n, false);
  double max_re = 0.0;
  int zeros = 0;
  for (const Complex& z : eigenvalues(pt)) {
    max_re = std::max(max_re, std::abs(z.real()));
    zeros += std::abs(z) <= 1e-10;
  }
  int expected_zeros = 0;
  for (int m = -n / 2; m < n / 2; ++m)
    for (int k = -n / 2; k < n / 2; ++k)
      expected_zeros += 4 * (std::abs(std::sin(m * h)) < 1e-12 && std::abs(std::sin(k * h)) < 1e-12);

  // integration by parts on a torus of revolution (curved metric)
  const SpinorField phi = [](const Vec2& p) {
    Spinor v;
    v << std::exp(std::sin(p[0])), Complex(std::cos(p[1]), std::sin(2 * p[0])),
        Complex(0.3, 1.0) * std::cos(p[0] - p[1]), std::exp(std::cos(p[0] + p[1]));
    return v;
  };
  const SpinorField psi = [](const Vec2& p) {
    Spinor v;
    v << Complex(std::sin(p[0] + 2 * p[1]), std::cos(p[0])), std::exp(std::sin(p[1])),
        Complex(std::cos(p[1]), std::sin(p[0])), Complex(0.5, std::cos(2 * p[0]));
    return v;
  };
  const ImmersionSpec torus = testing::load("torus-revolution");
  double ibp[2];
  for (int k = 0; k < 2; ++k) {
    const DiscreteOperator op = assemble_grid_operator(torus, 8 << k, 8 << k, false);
    ibp[k] = ibp_defect(op, sample_field(op, phi), sample_field(op, psi));
  }
  const double ratio = ibp[0] / ibp[1];
  return {dist <= 1e-10 && max_re <= 1e-10 && zeros == expected_zeros && ratio >= 3.5,
          "closed form " + fmt("%.1e", dist) + ", plane-torus max |Re| " + fmt("%.1e", max_re) + ", zeros " +
              std::to_string(zeros) + "/" + std::to_string(expected_zeros) + ", IBP ratio " + fmt("%.2f", ratio)};
}

Outcome determinism_check() {
  int c1 = 0, c2 = 0;
  std::string a, b;
  run_cli({"verify", testing::corpus("clifford")}, c1, &a);
  run_cli({"verify", testing::corpus("clifford")}, c2, &b);
  return {c1 == 0 && c2 == 0 && a == b && !a.empty(), std::to_string(a.size()) + " bytes, identical: " +
                                                         (a == b ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"Clifford axioms and spinor bases", 1, clifford_axioms},
      {"spin lift", 1, spin_lift_check},
      {"frame geometry", 5, geometry_check},
      {"tube density", 5, tube_check},
      {"Weierstrass relation", 30, weierstrass_check},
      {"gauged Weierstrass relation", 30, gauged_check},
      {"discrete spectrum", 60, spectral_check},
      {"determinism", 1e9, determinism_check},
  };
  int failed = 0, k = 0;
  for (const Criterion& c : criteria) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    std::printf("%s %d %s: %s (%.2f s)\n", pass ? "PASS" : "FAIL", k, c.name, o.detail.c_str(), secs);
  }
  return failed == 0 ? 0 : 1;
}
