#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "dsurf/cli.hpp"
#include "dsurf/weierstrass.hpp"
#include "report.hpp"

namespace dsurf::cli {

namespace {

struct Config {
  std::string command;
  std::string file;
  std::optional<Vec2> at;
  std::optional<std::pair<int, int>> grid;
  bool gauged = false;
  double step = kDefaultStep;
  bool csv = false;
  std::string out_path;
  int threads = 0;
};

// One measurement feeding a named check. `value` is absent when the point
// passes for a reason the value cannot express (e.g. residual at round-off).
struct Observation {
  std::string check;
  std::optional<double> value;
  bool pass = true;
};

struct Record {
  Json data;
  std::vector<Observation> obs;
};

enum class Bound { AtMost, AtLeast };

struct CheckSpec {
  const char* name;
  Bound bound;
  double tolerance;
};

// Tolerances of the reported invariants.
constexpr CheckSpec kChecks[] = {
    {"frame_orthonormality", Bound::AtMost, 1e-10},
    {"frame_orientation", Bound::AtMost, 1e-10},
    {"torsion_antisymmetry", Bound::AtMost, 1e-8},
    {"gauge_constraint", Bound::AtMost, 1e-10},
    {"weierstrass_residual", Bound::AtMost, 1e-8},
    {"bilinear_imaginary", Bound::AtMost, 1e-10},
    {"spinor_orthonormality", Bound::AtMost, 1e-12},
    {"dirac_residual_order", Bound::AtLeast, 3.5},
    {"gauge_invariance", Bound::AtMost, 1e-10},
    {"gauge_covariance_order", Bound::AtLeast, 3.5},
    {"closed_form_spectrum", Bound::AtMost, 1e-10},
    {"tube_origin_exact", Bound::AtMost, 0.0},
    {"tube_density_order", Bound::AtLeast, 1.9},
    {"expression_round_trip", Bound::AtMost, 0.0},
};

const CheckSpec& check_spec(const std::string& name) {
  for (const auto& c : kChecks) {
    if (name == c.name) return c;
  }
  throw std::logic_error("unknown check " + name);
}

Observation at_most(const std::string& name, double v) {
  return {name, v, v <= check_spec(name).tolerance};
}
Observation at_least(const std::string& name, double v) {
  return {name, v, v >= check_spec(name).tolerance};
}

Json vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

Json mat(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec(m.row(r).transpose()));
  return a;
}

// Interior lattice: lo + (hi - lo)(i + 1)/(n + 1).
std::vector<Vec2> sample_points(const ImmersionSpec& spec, const Config& cfg) {
  if (cfg.at) {
    if (!spec.in_domain(*cfg.at)) throw ParseError("--at point lies outside the domain", 0, 0);
    return {*cfg.at};
  }
  const auto [n1, n2] = cfg.grid.value_or(std::make_pair(9, 9));
  std::vector<Vec2> pts;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      pts.emplace_back(spec.domain[0].lo + spec.domain[0].width() * (i + 1) / (n1 + 1),
                       spec.domain[1].lo + spec.domain[1].width() * (j + 1) / (n2 + 1));
    }
  return pts;
}

// Runs f(k) for k in [0, n) on a small pool; results land in index order so
// the report does not depend on scheduling. The lowest-index exception wins.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Spinor probe_field(const Vec2& p) {
  Spinor v;
  v << std::cos(p[0]), Complex(0.0, std::sin(p[1])), 1.0, std::cos(p[0] + p[1]);
  return v;
}

Record frame_record(const ImmersionSpec& spec, const Vec2& s, double h) {
  const PointGeometry pg = point_geometry(spec, s, h);
  const FrameData& f = pg.frame;
  const ConnectionData& c = pg.conn;
  const GaugeData& gd = pg.gauge;
  const Mat4 R = f.rotation();

  Record r;
  Json& d = r.data;
  d["s"] = vec(s);
  d["x"] = vec(f.x);
  Eigen::Matrix<double, 2, 4> e, ehat, n;
  for (int a = 0; a < 2; ++a) {
    e.row(a) = f.e[a].transpose();
    ehat.row(a) = f.ehat[a].transpose();
    n.row(a) = f.n[a].transpose();
  }
  d["e"] = mat(e);
  d["ehat"] = mat(ehat);
  d["n"] = mat(n);
  d["g"] = mat(f.g);
  d["det_g"] = f.det_g;
  d["gamma_tan3"] = mat(c.gamma_tan[0]);
  d["gamma_tan4"] = mat(c.gamma_tan[1]);
  d["trace3"] = c.trace3();
  d["trace4"] = c.trace4();
  d["torsion"] = vec(c.torsion());
  d["theta"] = gd.theta;
  d["hat_trace3"] = gd.hat_trace3;
  d["hat_trace4"] = gd.hat_trace4;
  d["hat_torsion"] = vec(gd.hat_torsion);
  d["gauge_degenerate"] = gd.degenerate;
  d["omega"] = vec(pg.spin.omega);

  const double ortho = (R.transpose() * R - Mat4::Identity()).cwiseAbs().maxCoeff();
  double antisym = 0.0;
  for (int al = 0; al < 2; ++al) {
    antisym = std::max(antisym, std::abs(c.gamma_nor[al](0, 1) + c.gamma_nor[al](1, 0)));
  }
  const double constraint = std::max(std::abs(c.trace3() - gd.hat_trace3 * std::cos(gd.theta)),
                                     std::abs(c.trace4() + gd.hat_trace3 * std::sin(gd.theta)));
  r.obs = {at_most("frame_orthonormality", ortho),
           at_most("frame_orientation", std::abs(R.determinant() - 1.0)),
           at_most("torsion_antisymmetry", antisym), at_most("gauge_constraint", constraint)};
  return r;
}

Observation order_check(const std::string& name, const std::vector<double>& values,
                        double floor) {
  if (values.back() <= floor) return {name, std::nullopt, true};
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < values.size(); ++k) worst = std::min(worst, values[k - 1] / values[k]);
  return at_least(name, worst);
}

constexpr double kMinimalPoint = 1e-8;

Record verify_record(const ImmersionSpec& spec, const Vec2& s, double h, bool gauged) {
  const ReconstructionReport rec = reconstruct(spec, s, gauged);
  const DiracResidual res = dirac_residual(spec, s, kResidualSteps, gauged, h);
  const ConnectionData conn = connection_at(spec, s, h);
  const GaugeData gd = gauge_at(conn);

  Record r;
  Json& d = r.data;
  d["s"] = vec(s);
  d["residual_bilinear"] = rec.residual_bilinear;
  d["bilinear_imaginary"] = rec.max_imag;
  d["spinor_orthonormality"] = rec.orthonormality;
  d["W"] = mat(rec.W);
  d["dirac_steps"] = res.steps;
  d["dirac_residuals"] = res.residuals;
  Json ratios = Json::array();
  for (double q : res.ratios) {
    if (std::isfinite(q)) ratios.push_back(q);
  }
  d["dirac_ratios"] = ratios;
  d["torsion"] = vec(conn.torsion());
  d["hat_torsion"] = vec(gd.hat_torsion);
  d["hat_trace3"] = gd.hat_trace3;
  d["theta"] = gd.theta;

  // At a minimal point the gauge angle is undefined and the gauged spinor
  // field is discontinuous; the order checks are not applicable there.
  const bool singular = gauged && gd.hat_trace3 < kMinimalPoint;
  if (gauged) d["gauge_degenerate"] = singular;

  r.obs = {at_most("weierstrass_residual", rec.residual_bilinear),
           at_most("bilinear_imaginary", rec.max_imag),
           at_most("spinor_orthonormality", rec.orthonormality),
           singular ? Observation{"dirac_residual_order", std::nullopt, true}
                    : order_check("dirac_residual_order", res.residuals, 1e-12)};

  if (gauged) {
    const ReconstructionReport plain = reconstruct(spec, s, false);
    const double diff = (rec.W - plain.W).cwiseAbs().maxCoeff();
    d["gauge_invariance"] = diff;
    r.obs.push_back(at_most("gauge_invariance", diff));
    const std::vector<double> cov{gauge_covariance_defect(spec, s, probe_field, 1e-2, h),
                                  gauge_covariance_defect(spec, s, probe_field, 5e-3, h)};
    d["gauge_covariance"] = cov;
    r.obs.push_back(singular ? Observation{"gauge_covariance_order", std::nullopt, true}
                             : order_check("gauge_covariance_order", cov, 1e-11));
  }
  return r;
}

Record tube_record(const ImmersionSpec& spec, const Vec2& s, double h) {
  const FrameData f = frame_at(spec, s);
  const TubeSample origin = tube_metric_at(spec, s, Vec2::Zero(), h);
  const Vec2 t = mean_curvature_traces(f);
  const Vec2 dir = t.norm() > 1e-12 ? Vec2(t / t.norm()) : Vec2(1.0, 0.0);

  Record r;
  Json& d = r.data;
  d["s"] = vec(s);
  d["direction"] = vec(dir);
  const double origin_err =
      std::max((origin.g_tube - f.g).cwiseAbs().maxCoeff(), std::abs(origin.rho - 1.0));
  d["origin_error"] = origin_err;

  Json samples = Json::array();
  std::vector<double> eps{0.04, 0.02, 0.01}, diff;
  for (double e : eps) {
    const TubeSample ts = tube_metric_at(spec, s, e * dir, h);
    diff.push_back(std::abs(ts.rho - ts.rho_leading));
    Json js;
    js["epsilon"] = e;
    js["rho"] = ts.rho;
    js["rho_leading"] = ts.rho_leading;
    js["difference"] = diff.back();
    js["g_tube"] = mat(ts.g_tube);
    samples.push_back(js);
  }
  d["samples"] = samples;

  r.obs.push_back(at_most("tube_origin_exact", origin_err));
  if (*std::max_element(diff.begin(), diff.end()) <= 1e-12) {
    r.obs.push_back({"tube_density_order", std::nullopt, true});
  } else {
    // Least-squares slope of log|diff| against log(eps).
    double mx = 0, my = 0;
    for (size_t k = 0; k < eps.size(); ++k) {
      mx += std::log(eps[k]) / eps.size();
      my += std::log(std::max(diff[k], 1e-300)) / eps.size();
    }
    double sxy = 0, sxx = 0;
    for (size_t k = 0; k < eps.size(); ++k) {
      sxy += (std::log(eps[k]) - mx) * (std::log(std::max(diff[k], 1e-300)) - my);
      sxx += (std::log(eps[k]) - mx) * (std::log(eps[k]) - mx);
    }
    d["slope"] = sxy / sxx;
    r.obs.push_back(at_least("tube_density_order", sxy / sxx));
  }
  return r;
}

Json run_checks(const std::vector<Record>& records, bool& pass) {
  Json out = Json::array();
  pass = true;
  for (const auto& c : kChecks) {
    bool seen = false, ok = true;
    std::optional<double> worst;
    for (const auto& r : records)
      for (const auto& o : r.obs) {
        if (o.check != c.name) continue;
        seen = true;
        ok = ok && o.pass;
        if (o.value) {
          if (!worst) worst = *o.value;
          worst = c.bound == Bound::AtMost ? std::max(*worst, *o.value) : std::min(*worst, *o.value);
        }
      }
    if (!seen) continue;
    Json j;
    j["name"] = c.name;
    j["bound"] = c.bound == Bound::AtMost ? "at_most" : "at_least";
    j["tolerance"] = c.tolerance;
    j["worst"] = worst ? Json(*worst) : Json(nullptr);
    j["pass"] = ok;
    out.push_back(j);
    pass = pass && ok;
  }
  return out;
}

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

Json spectrum_document(const ImmersionSpec& spec, const Config& cfg, std::vector<Record>& records) {
  const auto [n1, n2] = cfg.grid.value_or(std::make_pair(8, 8));
  const DiscreteOperator op = assemble_grid_operator(spec, n1, n2, cfg.gauged, cfg.step);
  const std::vector<Complex> ev = eigenvalues(op);

  bool constant = true;
  const OperatorSymbol& s0 = op.sites[0];
  for (const auto& s : op.sites) {
    constant = constant && (s.A[0] - s0.A[0]).cwiseAbs().maxCoeff() <= 1e-10 &&
               (s.A[1] - s0.A[1]).cwiseAbs().maxCoeff() <= 1e-10 &&
               (s.B - s0.B).cwiseAbs().maxCoeff() <= 1e-10;
  }

  Json d;
  d["grid"] = {n1, n2};
  d["dimension"] = static_cast<long long>(op.dim());
  d["spacing"] = {op.h1, op.h2};
  int zeros = 0;
  double max_re = 0, max_im = 0;
  std::vector<Complex> mirrored;
  for (const Complex& z : ev) {
    if (std::abs(z) < 1e-10) ++zeros;
    max_re = std::max(max_re, std::abs(z.real()));
    max_im = std::max(max_im, std::abs(z.imag()));
    mirrored.push_back(-std::conj(z));
  }
  d["zero_eigenvalues"] = zeros;
  d["max_abs_real"] = max_re;
  d["max_abs_imag"] = max_im;
  d["mirror_symmetry_distance"] = multiset_distance(ev, mirrored);
  d["constant_coefficient"] = constant;

  Record summary;
  if (constant) {
    const double dist = multiset_distance(ev, fourier_spectrum(s0, n1, n2, op.h1, op.h2));
    d["closed_form_distance"] = dist;
    summary.obs.push_back(at_most("closed_form_spectrum", dist));
  }
  Json values = Json::array();
  for (size_t k = 0; k < ev.size(); ++k) {
    values.push_back({ev[k].real(), ev[k].imag()});
    Record row;
    row.data["index"] = static_cast<long long>(k);
    row.data["re"] = ev[k].real();
    row.data["im"] = ev[k].imag();
    records.push_back(row);
  }
  d["eigenvalues"] = values;
  records.push_back(summary);
  return d;
}

Json parse_check_document(const ImmersionSpec& spec, std::vector<Record>& records) {
  Json d;
  d["params"] = spec.params;
  Json coords = Json::array();
  Record rt;
  double mismatches = 0;
  auto canonical = [&](const Expr& e) {
    const std::string text = to_string(e, spec.params);
    if (!structurally_equal(parse_expression(text, spec.params), e)) mismatches += 1;
    return text;
  };
  for (const auto& c : spec.coords) coords.push_back(canonical(c));
  d["coords"] = coords;
  d["domain"] = {{spec.domain[0].lo, spec.domain[0].hi}, {spec.domain[1].lo, spec.domain[1].hi}};
  d["periodic"] = {spec.periodic[0], spec.periodic[1]};
  d["frame_rotation"] = spec.has_frame_rotation ? Json(canonical(spec.frame_rotation)) : Json(nullptr);
  rt.data = d;
  rt.obs.push_back(at_most("expression_round_trip", mismatches));
  records.push_back(rt);
  return d;
}

int execute(const Config& cfg, std::ostream& out, std::ostream& err) {
  const ImmersionSpec spec = load_immersion(cfg.file);
  const int threads = cfg.threads > 0 ? cfg.threads : hardware_threads();

  Json doc;
  doc["command"] = cfg.command;
  doc["spec"] = spec.name;
  doc["gauged"] = cfg.gauged;
  doc["step"] = cfg.step;

  std::vector<Record> records;
  Json csv_rows = Json::array();
  if (cfg.command == "spectrum") {
    doc["spectrum"] = spectrum_document(spec, cfg, records);
    for (const auto& r : records) {
      if (!r.data.is_null()) csv_rows.push_back(r.data);
    }
  } else if (cfg.command == "parse-check") {
    doc["parsed"] = parse_check_document(spec, records);
    csv_rows.push_back(records.front().data);
  } else {
    const std::vector<Vec2> pts = sample_points(spec, cfg);
    records.resize(pts.size());
    parallel_for(static_cast<int>(pts.size()), threads, [&](int k) {
      if (cfg.command == "frame") {
        records[k] = frame_record(spec, pts[k], cfg.step);
      } else if (cfg.command == "verify") {
        records[k] = verify_record(spec, pts[k], cfg.step, cfg.gauged);
      } else {
        records[k] = tube_record(spec, pts[k], cfg.step);
      }
    });
    Json recs = Json::array();
    for (const auto& r : records) recs.push_back(r.data);
    doc["records"] = recs;
    csv_rows = recs;
  }

  bool pass = true;
  doc["checks"] = run_checks(records, pass);
  const bool finite = all_finite(doc);
  if (!finite) err << "error: report contains a non-finite value\n";
  pass = pass && finite;
  doc["pass"] = pass;

  const std::string text = cfg.csv ? to_csv(csv_rows) : to_json_text(doc);
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << cfg.out_path << "\n";
      return kInputError;
    }
    f << text;
  }
  if (!pass) {
    for (const auto& c : doc["checks"]) {
      if (!c["pass"].get<bool>()) err << "check failed: " << c["name"].get<std::string>() << "\n";
    }
  }
  return pass ? kPass : kInvariantFailure;
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    size_t used1 = 0, used2 = 0;
    const int n1 = std::stoi(text.substr(0, x), &used1);
    const int n2 = std::stoi(text.substr(x + 1), &used2);
    if (used1 != x || used2 != text.size() - x - 1 || n1 < 1 || n2 < 1) throw std::invalid_argument(text);
    return {n1, n2};
  } catch (const std::logic_error&) {
    throw ParseError("--grid expects NxM with positive integers, got '" + text + "'", 0, 0);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moving frames, Dirac operators and Weierstrass checks for surfaces in E^4",
               "dirac-surface"};
  Config cfg;
  std::vector<double> at;
  std::string grid;
  app.add_option("command", cfg.command, "frame | verify | spectrum | tube | parse-check")
      ->required()
      ->check(CLI::IsMember({"frame", "verify", "spectrum", "tube", "parse-check"}));
  app.add_option("file", cfg.file, "immersion file")->required();
  auto* at_opt = app.add_option("--at", at, "single sample point u v")->expected(2)->allow_extra_args(false);
  auto* grid_opt = app.add_option("--grid", grid, "sample lattice or periodic grid NxM");
  at_opt->excludes(grid_opt);
  app.add_flag("--gauged", cfg.gauged, "use the torsion-gauged operator");
  app.add_option("--step", cfg.step, "finite-difference step")->check(CLI::PositiveNumber);
  bool json = false;
  auto* json_opt = app.add_flag("--json", json, "JSON report (default)");
  auto* csv_opt = app.add_flag("--csv", cfg.csv, "CSV export of the records");
  json_opt->excludes(csv_opt);
  app.add_option("--out", cfg.out_path, "write the report here instead of stdout");
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (!at.empty()) cfg.at = Vec2(at[0], at[1]);
    if (!grid.empty()) cfg.grid = parse_grid(grid);
    return execute(cfg, out, err);
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ResourceError& e) {
    err << "resource cap: " << e.what() << "\n";
    return kResourceCap;
  } catch (const GeometryError& e) {
    err << "geometry error: " << e.what() << "\n";
    return kInvariantFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvariantFailure;
  }
}

}  // namespace dsurf::cli
