#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hardy_rellich/hardy_rellich.hpp"

namespace hrtool {

namespace hr = hardy_rellich;
using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "1.0";
inline constexpr const char* format_env = "HARDY_RELLICH_FORMAT";

struct Check {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  double tolerance = 0.0;
};

struct Report {
  std::string command;
  json inputs = json::object();
  json results = json::object();
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  // pass ⇔ margin ≥ -tolerance
  void check(std::string name, double margin, double tolerance) {
    checks.push_back({std::move(name), margin >= -tolerance, margin, tolerance});
  }
};

// Raised for malformed command lines that CLI11 cannot see (bad grammar in values).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string format = "json";
  int dim = 0;
  std::string alpha = "0";
  std::string domain = "sphere";
  std::string lambda = "all";
  std::string arithmetic = "auto";
  std::uint64_t seed = 42;
  std::optional<double> tol_abs, tol_rel;
  std::vector<std::string> expect;
  int count = 10;
  std::optional<double> theta0;
  std::string dims = "2..10";
  double eigenvalue = 0.0;
  std::string profile;
  double dilate = 1.0;
  std::string line = "full";
  std::string side = "interior";
  std::string id;
  int trials = 100;
  unsigned threads = 0;
  std::string eps;
  int ell_max = 4;
  std::optional<int> grid;
  std::optional<double> mu0;
};

// ---------------------------------------------------------------------------
// Value helpers

template <class T>
json num(const T& v) {
  json j;
  j["value"] = hr::to_double(v);
  if constexpr (hr::is_exact_v<T>) j["exact"] = hr::format_exact(v);
  else j["exact"] = nullptr;
  return j;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("empty entry in list '" + s + "'");
    out.push_back(hr::parse_scalar<double>(item));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// bump:<c>,<r> | powexp:<eps>[,<base>] | spline:<knots>/<values>[/<slope0>]
inline hr::Profile1D parse_profile(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("profile needs a family prefix: " + s);
  const std::string fam = s.substr(0, colon), rest = s.substr(colon + 1);
  if (fam == "bump") {
    auto v = parse_list(rest);
    if (v.size() != 2) throw UsageError("bump:<center>,<radius>");
    return hr::Profile1D::bump(v[0], v[1]);
  }
  if (fam == "powexp") {
    auto v = parse_list(rest);
    if (v.size() == 1) return hr::Profile1D::powexp(v[0]);
    if (v.size() == 2) return hr::Profile1D::powexp(v[0], v[1]);
    throw UsageError("powexp:<eps>[,<base>]");
  }
  if (fam == "spline") {
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, '/')) parts.push_back(item);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("spline:<knots>/<values>[/<slope0>]");
    const double slope = parts.size() == 3 ? hr::parse_scalar<double>(parts[2]) : 0.0;
    return hr::Profile1D::spline(parse_list(parts[0]), parse_list(parts[1]), slope);
  }
  throw UsageError("unknown profile family '" + fam + "' (expected bump | powexp | spline)");
}

inline std::pair<int, int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("bad range '" + s + "' (expected <lo>..<hi>)");
  }
}

inline hr::SphericalDomain domain_of(const Options& o) { return hr::parse_domain(o.domain); }

// Exact arithmetic when α parses as a rational and the spectrum has closed form.
inline bool use_exact(const Options& o, const hr::SphericalDomain& d) {
  if (o.arithmetic == "double") return false;
  bool parses = true;
  try {
    hr::parse_rational(o.alpha);
  } catch (const hr::Error&) {
    parses = false;
  }
  if (o.arithmetic == "exact") {
    if (!parses) throw hr::InvalidArgument("alpha '" + o.alpha + "' is not an exact rational");
    if (d.kind == hr::DomainKind::Cap) throw hr::InvalidArgument("cap spectra need double arithmetic");
    return true;
  }
  return parses && d.kind != hr::DomainKind::Cap;
}

template <class T>
hr::ConeParams<T> params_of(const Options& o) {
  if (o.dim == 0) throw UsageError("--dim is required");
  hr::ConeParams<T> p{o.dim, hr::parse_scalar<T>(o.alpha)};
  p.validate();
  return p;
}

inline void echo_cone(Report& r, const Options& o, bool with_domain = true, bool with_lambda = true) {
  r.inputs["dim"] = o.dim;
  r.inputs["alpha"] = o.alpha;
  if (with_domain) r.inputs["domain"] = o.domain;
  if (with_lambda) r.inputs["lambda"] = o.lambda;
}

template <class T>
json lambda_list(const std::vector<T>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(num(x));
  return a;
}

// --expect key=value compares results[key].value (exactly when both sides are rational).
inline void apply_expectations(Report& r, const Options& o) {
  for (const auto& e : o.expect) {
    auto eq = e.find('=');
    if (eq == std::string::npos) throw UsageError("--expect needs key=value, got " + e);
    const std::string key = e.substr(0, eq), val = e.substr(eq + 1);
    if (!r.results.contains(key) || !r.results[key].is_object() || !r.results[key].contains("value"))
      throw UsageError("--expect: no numeric result named '" + key + "'");
    const auto& got = r.results[key];
    if (got["exact"].is_string()) {
      const hr::Rational want = hr::parse_rational(val);
      const hr::Rational have = hr::parse_rational(got["exact"].get<std::string>());
      const double diff = std::abs(hr::to_double(hr::Rational(have - want)));
      r.check("expect " + key, have == want ? 0.0 : -diff, 0.0);
    } else {
      const double want = hr::parse_scalar<double>(val), have = got["value"].get<double>();
      const double tol = o.tol_rel.value_or(1e-9) * std::max(1.0, std::abs(want));
      r.check("expect " + key, -std::abs(have - want), tol);
    }
  }
}

// ---------------------------------------------------------------------------
// Commands

template <class T>
void cmd_gamma(Report& r, const Options& o) {
  const auto p = params_of<T>(o);
  echo_cone(r, o, false, false);
  const auto g = hr::gamma_triple(p);
  r.results["gamma"] = num(g.gamma);
  r.results["gamma_bar"] = num(g.gamma_bar);
  r.results["gamma_hat"] = num(g.gamma_hat);
  r.results["hr_term_at_zero"] = num(hr::hr_term(p, T(0)));
  r.results["kelvin_alpha"] = num(p.reflected().alpha);
}

template <class T>
void put_constant(Report& r, const hr::ConstantResult<T>& c) {
  r.results["value"] = num(c.value);
  r.results["argmin_lambda"] = num(c.argmin_lambda);
  r.results["resonant"] = c.resonant;
}

template <class T>
void cmd_constants(Report& r, const Options& o, const std::string& which) {
  const auto p = params_of<T>(o);
  const auto dom = domain_of(o);
  const auto sel = hr::parse_selection<T>(o.lambda);
  echo_cone(r, o);
  if (which == "hardy-rellich") {
    const auto L = hr::resolved_lambdas<T>(p.dim, dom, sel, {p}, {}, false);
    put_constant(r, hr::hardy_rellich_constant(p, std::span<const T>(L)));
    r.results["lambdas_scanned"] = L.size();
  } else if (which == "rellich") {
    const auto L = hr::resolved_lambdas<T>(p.dim, dom, sel, {p});
    put_constant(r, hr::rellich_constant(p, std::span<const T>(L)));
    r.results["lambdas_scanned"] = L.size();
  } else {
    const auto L = hr::resolved_lambdas<T>(p.dim, dom, sel, {p.reflected()}, {}, false);
    const auto c = hr::schmincke_coefficients(p, std::span<const T>(L));
    r.results["grad_coeff"] = num(c.grad_coeff);
    r.results["zero_order_coeff"] = num(c.zero_order_coeff);
    r.results["reflected_alpha"] = num(p.reflected().alpha);
    r.results["argmin_lambda"] = num(c.reflected.argmin_lambda);
    r.results["resonant"] = c.reflected.resonant;
    r.results["lambdas_scanned"] = L.size();
  }
}

template <class T>
void cmd_coeffs(Report& r, const Options& o, const std::string& which) {
  const auto p = params_of<T>(o);
  const auto dom = domain_of(o);
  const auto sel = hr::parse_selection<T>(o.lambda);
  echo_cone(r, o);
  const auto L = hr::resolved_lambdas<T>(p.dim, dom, sel, {p}, {}, false);
  const std::span<const T> S(L);
  if (which == "nd") {
    const auto c = hr::nd_coefficients(p, S);
    r.results["A0"] = num(c.A0);
    r.results["A1"] = num(c.A1);
    r.results["A2"] = num(c.A2);
    r.results["lambda_min"] = num(c.lambda_min);
    r.results["argmin_lambda"] = num(c.mu.argmin_lambda);
  } else if (which == "nd-log") {
    const auto c = hr::nd_log_coefficients(p, S);
    r.results["A0"] = num(c.A0);
    r.results["kappa"] = num(c.kappa);
    r.results["A2"] = num(c.A2);
    r.results["lambda_min"] = num(c.lambda_min);
    r.results["argmin_lambda"] = num(c.mu.argmin_lambda);
  } else if (which == "punctured-ball") {
    const auto c = hr::punctured_ball_coefficients(p, dom, S);
    r.results["A0"] = num(c.A0);
    r.results["A1_grad_log"] = num(c.A1_grad_log);
    r.results["A1_sph_grad"] = num(c.A1_sph_grad);
    r.results["K"] = num(c.K);
    r.results["argmin_lambda"] = num(c.mu.argmin_lambda);
  } else if (which == "navier") {
    const auto c = hr::navier_coefficients(p, S);
    r.results["A0"] = num(c.A0);
    r.results["A1"] = num(c.A1);
    r.results["lambda_min"] = num(c.lambda_min);
    r.results["argmin_lambda"] = num(c.mu.argmin_lambda);
  } else {
    if constexpr (hr::is_exact_v<T>) {
      throw hr::InvalidArgument("the Dirichlet-class coefficients need double arithmetic");
    } else {
      double mu0 = 0.0;
      if (o.mu0) {
        mu0 = *o.mu0;
        r.inputs["mu0"] = mu0;
      } else {
        const auto est = hr::dirichlet_estimate(p, hr::cap_angle(dom), o.ell_max, o.grid.value_or(1000));
        mu0 = est.mu0;
        r.inputs["ell_max"] = o.ell_max;
        r.inputs["grid"] = est.grid_size;
      }
      const auto c = hr::dirichlet_conelike_coefficients(p, S, mu0);
      r.results["A0"] = num(c.A0);
      r.results["kappa0"] = num(c.kappa0);
      r.results["A1"] = num(c.A1);
      r.results["lambda_min"] = num(c.lambda_min);
    }
  }
}

inline void cmd_table(Report& r, const Options& o) {
  const auto [lo, hi] = parse_range(o.dims);
  if (lo < 2 || hi < lo) throw hr::DimensionTooSmall("table dimensions must satisfy 2 <= lo <= hi");
  r.inputs["dims"] = o.dims;
  json rows = json::array();
  for (int n = lo; n <= hi; ++n) {
    // Derived from the general machinery at α = 0 on the full sphere.
    const hr::ConeParams<hr::Rational> p{n, hr::Rational(0)};
    const auto sel = hr::LambdaSelection<hr::Rational>::all();
    const auto L = hr::resolved_lambdas<hr::Rational>(n, hr::SphericalDomain::sphere(), sel, {p}, {}, false);
    const auto c = hr::nd_log_coefficients(p, std::span<const hr::Rational>(L));
    const auto ref = hr::weight_free_table(n);
    json row;
    row["dim"] = n;
    row["mu0"] = num(c.A0);
    row["kappa0"] = num(c.kappa);
    rows.push_back(row);
    auto cmp = [&](const std::string& name, const hr::Rational& got, const hr::Rational& want) {
      const double d = std::abs(hr::to_double(hr::Rational(got - want)));
      r.check(name + " N=" + std::to_string(n), got == want ? 0.0 : -d, 0.0);
    };
    cmp("mu0", c.A0, ref.mu0);
    cmp("kappa0", c.kappa, ref.kappa0);
  }
  r.results["rows"] = rows;
}

inline void cmd_spectrum(Report& r, const Options& o, const std::string& kind) {
  if (o.dim == 0) throw UsageError("--dim is required");
  if (o.count < 1) throw hr::InvalidArgument("--count must be positive");
  r.inputs["dim"] = o.dim;
  r.inputs["count"] = o.count;
  json rows = json::array();
  auto emit = [&](const auto& spec) {
    for (const auto& e : spec.entries) {
      json row;
      row["lambda"] = num(e.lambda);
      row["ell"] = e.ell;
      row["k"] = e.k;
      row["multiplicity"] = e.multiplicity.str();
      row["degree"] = e.degree;
      rows.push_back(row);
    }
  };
  if (kind == "sphere") {
    emit(hr::sphere_eigenvalues<hr::Rational>(o.dim, o.count - 1));
  } else if (kind == "hemisphere") {
    emit(hr::hemisphere_eigenvalues<hr::Rational>(o.dim, o.count));
  } else {
    const double th = hr::cap_angle(domain_of(o));
    r.inputs["theta0"] = th;
    emit(hr::cap_eigenvalues(o.dim, th, o.count));
  }
  r.results["rows"] = rows;
}

inline hr::LineKind line_of(const Options& o) {
  if (o.line == "full") return hr::LineKind::FullLine;
  if (o.line == "half") return hr::LineKind::HalfLine;
  throw UsageError("--line must be full or half");
}

inline hr::Side side_of(const Options& o) {
  if (o.side == "interior") return hr::Side::Interior;
  if (o.side == "exterior") return hr::Side::Exterior;
  throw UsageError("--side must be interior or exterior");
}

inline void put_identities(Report& r, const std::vector<hr::IdentityReport>& ids) {
  json a = json::array();
  for (const auto& i : ids) {
    a.push_back({{"name", i.name},
                 {"x_space", i.x_space},
                 {"cylinder", i.cylinder},
                 {"relative_discrepancy", i.relative_discrepancy}});
    r.checks.push_back({i.name, i.pass, i.tolerance - i.relative_discrepancy, i.tolerance});
  }
  r.results["identities"] = a;
}

inline void cmd_verify_identity(Report& r, const Options& o, bool kelvin) {
  const auto p = params_of<double>(o);
  r.inputs["dim"] = o.dim;
  r.inputs["alpha"] = o.alpha;
  r.inputs["eigenvalue"] = o.eigenvalue;
  const auto line = kelvin ? hr::LineKind::FullLine : line_of(o);
  const std::string prof_s =
      !o.profile.empty() ? o.profile : (line == hr::LineKind::FullLine ? "bump:0,1" : "bump:1.5,0.5");
  const auto prof = parse_profile(prof_s).dilated(o.dilate);
  r.inputs["profile"] = prof_s;
  r.inputs["dilate"] = o.dilate;
  hr::EmdenFowlerConfig cfg;
  if (o.tol_rel) cfg.tolerance = *o.tol_rel;
  if (kelvin) {
    put_identities(r, hr::kelvin_check(p, prof, o.eigenvalue, cfg));
  } else {
    r.inputs["line"] = o.line;
    r.inputs["side"] = o.side;
    put_identities(r, hr::emden_fowler_check(p, prof, o.eigenvalue, line, side_of(o), cfg));
  }
}

inline void cmd_verify_inequality(Report& r, const Options& o) {
  if (o.id.empty()) throw UsageError("--id is required");
  const auto id = hr::parse_inequality_id(o.id);
  const auto p = params_of<double>(o);
  const auto dom = domain_of(o);
  const auto sel = hr::parse_selection<double>(o.lambda);
  r.inputs["id"] = o.id;
  echo_cone(r, o);
  r.inputs["trials"] = o.trials;
  r.inputs["seed"] = o.seed;
  hr::SuiteConfig cfg;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.tolerance = o.tol_abs.value_or(1e-9);
  cfg.threads = o.threads;
  cfg.dirichlet.ell_max = o.ell_max;
  cfg.dirichlet.grid_size = o.grid.value_or(400);
  if (id == hr::InequalityId::DIR) {
    r.inputs["ell_max"] = o.ell_max;
    r.inputs["grid"] = cfg.dirichlet.grid_size;
  }
  const auto setup = hr::make_setup(id, p, dom, sel, cfg.dirichlet);
  json coeffs;
  coeffs["A0"] = setup.A0;
  coeffs["log_gradient"] = setup.coeff_ln;
  coeffs["log_sph_gradient"] = setup.coeff_lns;
  coeffs["log2_L2"] = setup.coeff_lu2;
  coeffs["log4_L2"] = setup.coeff_lu4;
  coeffs["radial_derivative"] = setup.coeff_dt;
  coeffs["zero_order"] = setup.coeff_l2;
  r.results["coefficients"] = coeffs;
  const auto suite = hr::random_test_suite(setup, cfg);
  int passes = 0;
  json margins = json::array();
  for (const auto& m : suite.reports) {
    passes += m.pass;
    margins.push_back({{"trial", *m.trial}, {"modes", m.modes}, {"lhs", m.lhs}, {"rhs", m.rhs}, {"margin", m.margin}});
    r.checks.push_back({"trial " + std::to_string(*m.trial), m.pass, m.margin, m.tolerance});
  }
  r.results["passes"] = passes;
  r.results["min_margin"] = suite.min_margin;
  r.results["margins"] = margins;
  const auto w = hr::sharpness_witness(setup, 1e-3);
  r.results["sharpness"] = {{"eps", w.eps}, {"lambda", w.lambda}, {"quotient", w.quotient},
                            {"relative_excess", w.relative_excess}};
  const double tol = o.tol_rel.value_or(1e-2);
  r.check("sharpness", tol - w.relative_excess, 0.0);
}

inline std::vector<double> eps_grid(const Options& o, const std::string& def) {
  return parse_list(o.eps.empty() ? def : o.eps);
}

inline void cmd_sweep(Report& r, const Options& o, const std::string& kind) {
  const double tol_rel = o.tol_rel.value_or(1e-2);
  if (kind == "sharpness") {
    const auto p = params_of<double>(o);
    const auto dom = domain_of(o);
    const auto sel = hr::parse_selection<double>(o.lambda);
    echo_cone(r, o);
    const std::string prof_s = o.profile.empty() ? "bump:0,1" : o.profile;
    r.inputs["profile"] = prof_s;
    const auto eps = eps_grid(o, "1e-1,3e-2,1e-2,3e-3,1e-3");
    r.inputs["eps"] = eps;
    const auto L = hr::resolved_lambdas<double>(p.dim, dom, sel, {p}, {}, false);
    const auto mu = hr::hardy_rellich_constant(p, std::span<const double>(L));
    const auto s = hr::sharpness_sweep(p, mu.argmin_lambda, parse_profile(prof_s), eps);
    json pts = json::array();
    for (const auto& q : s.points) pts.push_back({{"eps", q.eps}, {"quotient", q.quotient}});
    r.results["argmin_lambda"] = mu.argmin_lambda;
    r.results["limit"] = s.limit;
    r.results["relative_gap"] = s.relative_gap;
    r.results["monotone"] = s.monotone;
    r.results["points"] = pts;
    r.check("monotone", s.monotone ? 0.0 : -1.0, 0.0);
    r.check("gap at smallest eps", tol_rel - s.relative_gap, 0.0);
    return;
  }
  const auto eps = eps_grid(o, "1e-1,1e-2,1e-3");
  r.inputs["eps"] = eps;
  json pts = json::array();
  if (kind == "r-functional") {
    const double agree = o.tol_abs.value_or(1e-9);
    double last = 0.0;
    for (double e : eps) {
      const auto prof = hr::Profile1D::powexp(e, 1.5);
      hr::MomentRequest req;
      req.w2_0 = req.w2_1 = true;
      const double rq = hr::r_functional(hr::moments(prof, req));
      const double rc = hr::r_functional(hr::powexp_closed_moments(e + 1.5));
      pts.push_back({{"eps", e}, {"quadrature", rq}, {"closed_form", rc}, {"difference", rq - rc}});
      r.check("paths agree eps=" + json(e).dump(), agree - std::abs(rq - rc), 0.0);
      last = rq;
    }
    r.results["limit"] = hr::r_functional_limit();
    r.results["points"] = pts;
    r.check("limit at smallest eps", tol_rel - std::abs(last - hr::r_functional_limit()), 0.0);
    return;
  }
  const auto k = kind == "hardy1d" ? hr::OneDKind::Hardy : hr::OneDKind::Rellich;
  const auto res = hr::oned_sharpness(k, eps);
  bool mono = true;
  for (std::size_t i = 0; i < res.size(); ++i) {
    pts.push_back({{"eps", res[i].eps}, {"quotient", res[i].quotient}});
    if (i > 0 && (eps[i] < eps[i - 1]) != (res[i].quotient < res[i - 1].quotient)) mono = false;
  }
  const double c = hr::oned_constant(k);
  r.results["limit"] = c;
  r.results["points"] = pts;
  r.check("monotone", mono ? 0.0 : -1.0, 0.0);
  const auto best = std::min_element(res.begin(), res.end(), [](auto& a, auto& b) { return a.eps < b.eps; });
  r.check("limit at smallest eps", tol_rel - std::abs(best->quotient - c) / c, 0.0);
}

inline void cmd_estimate(Report& r, const Options& o) {
  const auto p = params_of<double>(o);
  const auto dom = domain_of(o);
  echo_cone(r, o, true, false);
  const int grid = o.grid.value_or(1000);
  r.inputs["ell_max"] = o.ell_max;
  r.inputs["grid"] = grid;
  const auto est = hr::dirichlet_estimate(p, hr::cap_angle(dom), o.ell_max, grid);
  const auto L = hr::resolved_lambdas<double>(p.dim, dom, hr::LambdaSelection<double>::all(), {p}, {}, false);
  const auto nav = hr::hardy_rellich_constant(p, std::span<const double>(L));
  json modes = json::array();
  for (const auto& m : est.per_mode) modes.push_back({{"ell", m.ell}, {"mu", m.mu}, {"iterations", m.iterations}});
  r.results["mu0"] = est.mu0;
  r.results["argmin_ell"] = est.argmin_ell;
  r.results["coarse_mu0"] = est.coarse_mu0;
  r.results["refinement_delta"] = est.refinement_delta;
  r.results["navier_constant"] = nav.value;
  r.results["navier_resonant"] = nav.resonant;
  r.results["gap"] = est.mu0 - nav.value;
  r.results["per_mode"] = modes;
  // Only one direction of the comparison with the constant on the cone is known.
  r.results["cone_relation"] = "paper-open";
  r.check("refinement", o.tol_rel.value_or(1e-3) - std::abs(est.refinement_delta), 0.0);
  r.check("monotone refinement", est.refinement_delta, o.tol_abs.value_or(1e-9));
  // Strictly positive gap: a zero margin does not pass.
  r.checks.push_back({"above navier constant", est.mu0 - nav.value > 0.0, est.mu0 - nav.value, 0.0});
}

// ---------------------------------------------------------------------------
// Output

inline json to_json(const Report& r, long long timing_ms) {
  json j;
  j["schema_version"] = schema_version;
  j["command"] = r.command;
  j["inputs"] = r.inputs;
  j["results"] = r.results;
  json cs = json::array();
  for (const auto& c : r.checks)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}, {"tolerance", c.tolerance}});
  j["checks"] = cs;
  j["timing_ms"] = timing_ms;
  return j;
}

namespace detail {

inline std::string cell(const json& v) {
  if (v.is_object() && v.contains("value")) {
    if (v["exact"].is_string()) return v["exact"].get<std::string>();
    return v["value"].dump();
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

using Table = std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>;

inline std::vector<std::pair<std::string, Table>> tables_of(const Report& r) {
  std::vector<std::pair<std::string, Table>> out;
  Table kv{{"key", "value"}, {}};
  for (const auto& [k, v] : r.results.items()) {
    if (v.is_array() && !v.empty() && v.front().is_object()) {
      Table t;
      for (const auto& [ck, cv] : v.front().items()) t.first.push_back(ck);
      for (const auto& row : v) {
        std::vector<std::string> cells;
        for (const auto& c : t.first) cells.push_back(cell(row[c]));
        t.second.push_back(cells);
      }
      out.emplace_back(k, t);
    } else if (v.is_object() && !v.contains("value")) {
      for (const auto& [sk, sv] : v.items()) kv.second.push_back({k + "." + sk, cell(sv)});
    } else {
      kv.second.push_back({k, cell(v)});
    }
  }
  if (!kv.second.empty()) out.insert(out.begin(), {"results", kv});
  if (!r.checks.empty()) {
    Table t{{"name", "pass", "margin", "tolerance"}, {}};
    for (const auto& c : r.checks)
      t.second.push_back({c.name, c.pass ? "true" : "false", json(c.margin).dump(), json(c.tolerance).dump()});
    out.emplace_back("checks", t);
  }
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

}  // namespace detail

// csv and md omit timing so that their output is byte-stable.
inline void emit(std::ostream& out, const Report& r, const std::string& format, long long timing_ms) {
  if (format == "json") {
    out << to_json(r, timing_ms).dump(2) << "\n";
    return;
  }
  const auto tables = detail::tables_of(r);
  bool first = true;
  for (const auto& [name, t] : tables) {
    if (!first) out << "\n";
    first = false;
    if (format == "csv") {
      out << "# " << name << "\n";
      for (std::size_t i = 0; i < t.first.size(); ++i) out << (i ? "," : "") << detail::csv_escape(t.first[i]);
      out << "\n";
      for (const auto& row : t.second) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_escape(row[i]);
        out << "\n";
      }
    } else {
      out << "### " << r.command << ": " << name << "\n\n|";
      for (const auto& h : t.first) out << " " << h << " |";
      out << "\n|";
      for (std::size_t i = 0; i < t.first.size(); ++i) out << "---|";
      out << "\n";
      for (const auto& row : t.second) {
        out << "|";
        for (const auto& c : row) out << " " << c << " |";
        out << "\n";
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Entry point

inline bool is_input_error(hr::ErrorCode c) {
  switch (c) {
    case hr::ErrorCode::ConvergenceFailure:
    case hr::ErrorCode::QuadratureFailure:
    case hr::ErrorCode::EigensolveFailure: return false;
    default: return true;
  }
}

// Exit codes: 0 all checks pass, 1 a check failed or a numerical method gave up,
// 2 input error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Sharp Hardy-Rellich constants on cones: tables, spectra and numerical certificates", "hrtool"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file presetting any option; the command line wins");
  Options o;
  if (const char* env = std::getenv(format_env)) o.format = env;
  app.add_option("--format", o.format, std::string("json | csv | md (default from ") + format_env + ")")
      ->check(CLI::IsMember({"json", "csv", "md"}));
  app.add_option("--dim", o.dim, "ambient dimension N");
  app.add_option("--alpha", o.alpha, "weight exponent, decimal or p/q");
  app.add_option("--domain", o.domain, "sphere | hemisphere | cap:<theta0>");
  app.add_option("--lambda", o.lambda, "all | tail:<k> | set:<v1,v2,...> | exclude-principal | only:<v>");
  app.add_option("--arithmetic", o.arithmetic, "auto | exact | double")
      ->check(CLI::IsMember({"auto", "exact", "double"}));
  app.add_option("--seed", o.seed, "master seed of the random suites");
  app.add_option("--tol-abs", o.tol_abs, "absolute tolerance override");
  app.add_option("--tol-rel", o.tol_rel, "relative tolerance override");
  app.add_option("--expect", o.expect, "key=value check against a numeric result");
  app.add_option("--count", o.count, "sphere, hemisphere: distinct eigenvalues; cap: eigenvalues with multiplicity");
  app.add_option("--theta0", o.theta0, "cap angle in radians");
  app.add_option("--dims", o.dims, "dimension range <lo>..<hi>");
  app.add_option("--eigenvalue", o.eigenvalue, "angular eigenvalue of the separable test function");
  app.add_option("--profile", o.profile, "bump:<c>,<r> | powexp:<eps>[,<base>] | spline:<knots>/<values>[/<slope0>]");
  app.add_option("--dilate", o.dilate, "dilation factor s, profile y(s t)");
  app.add_option("--line", o.line, "full | half");
  app.add_option("--side", o.side, "interior | exterior");
  app.add_option("--id", o.id, "HR | ND | ND2 | PB | NAV | DIR | SCH");
  app.add_option("--trials", o.trials, "random tests per suite");
  app.add_option("--threads", o.threads, "worker threads (0: hardware concurrency)");
  app.add_option("--eps", o.eps, "comma-separated epsilon values");
  app.add_option("--ell-max", o.ell_max, "largest harmonic order in the Dirichlet estimator");
  app.add_option("--grid", o.grid, "finite element count of the Dirichlet estimator");
  app.add_option("--mu0", o.mu0, "supplied Dirichlet-class constant");

  auto* gamma = app.add_subcommand("gamma", "gamma, gamma-bar and gamma-hat of (N, alpha)");
  auto* constants = app.add_subcommand("constants", "sharp constants");
  constants->require_subcommand(1);
  auto* coeffs = app.add_subcommand("coeffs", "coefficients of the improved inequalities");
  coeffs->require_subcommand(1);
  auto* table = app.add_subcommand("table", "tables");
  table->require_subcommand(1);
  auto* spectrum = app.add_subcommand("spectrum", "Dirichlet spectra of the Laplace-Beltrami operator");
  spectrum->require_subcommand(1);
  auto* verify = app.add_subcommand("verify", "numerical certificates");
  verify->require_subcommand(1);
  auto* sweep = app.add_subcommand("sweep", "sharpness sweeps");
  sweep->require_subcommand(1);
  auto* estimate = app.add_subcommand("estimate", "estimators");
  estimate->require_subcommand(1);

  std::string command;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
    parent->add_subcommand(name, desc)->callback([&command, parent, name] { command = parent->get_name() + " " + name; });
  };
  gamma->callback([&] { command = "gamma"; });
  for (auto n : {"hardy-rellich", "rellich", "schmincke"}) leaf(constants, n, "");
  for (auto n : {"nd", "nd-log", "punctured-ball", "navier", "dirichlet"}) leaf(coeffs, n, "");
  leaf(table, "weight-free", "weight-free constants for a range of dimensions");
  for (auto n : {"sphere", "hemisphere", "cap"}) leaf(spectrum, n, "");
  for (auto n : {"emden-fowler", "kelvin", "inequality"}) leaf(verify, n, "");
  for (auto n : {"sharpness", "r-functional", "hardy1d", "rellich1d"}) leaf(sweep, n, "");
  leaf(estimate, "dirichlet", "Dirichlet-class constant on a cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  // --theta0 is shorthand for --domain cap:<theta0>.
  if (o.theta0) {
    if (app.get_option("--domain")->count() > 0) {
      err << "error: --theta0 and --domain are mutually exclusive\n";
      return 2;
    }
    std::ostringstream th;
    th.precision(17);
    th << *o.theta0;
    o.domain = "cap:" + th.str();
  }

  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  r.command = command;
  try {
    const auto sub = [&](const std::string& s) { return command.substr(command.find(' ') + 1) == s; };
    const std::string head = command.substr(0, command.find(' '));
    const std::string tail = command.find(' ') == std::string::npos ? "" : command.substr(command.find(' ') + 1);
    auto exact = [&] { return use_exact(o, domain_of(o)); };
    if (head == "gamma") {
      if (use_exact(o, hr::SphericalDomain::sphere())) cmd_gamma<hr::Rational>(r, o);
      else cmd_gamma<double>(r, o);
    } else if (head == "constants") {
      if (exact()) cmd_constants<hr::Rational>(r, o, tail);
      else cmd_constants<double>(r, o, tail);
    } else if (head == "coeffs") {
      if (exact() && !sub("dirichlet")) cmd_coeffs<hr::Rational>(r, o, tail);
      else cmd_coeffs<double>(r, o, tail);
    } else if (head == "table") {
      cmd_table(r, o);
    } else if (head == "spectrum") {
      cmd_spectrum(r, o, tail);
    } else if (head == "verify") {
      if (tail == "inequality") cmd_verify_inequality(r, o);
      else cmd_verify_identity(r, o, tail == "kelvin");
    } else if (head == "sweep") {
      cmd_sweep(r, o, tail);
    } else {
      cmd_estimate(r, o);
    }
    apply_expectations(r, o);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const hr::Error& e) {
    err << "error: " << e.what() << "\n";
    if (!is_input_error(e.code())) return 1;
    err << "\n" << app.help();
    return 2;
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  emit(out, r, o.format, ms);
  return r.pass() ? 0 : 1;
}

}  // namespace hrtool
