#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hardy_rellich/error.hpp"
#include "hardy_rellich/quadrature.hpp"

namespace hardy_rellich {

// exp(-1/(1-s²)) bump on (center - radius, center + radius).
struct Bump {
  double center = 0.0;
  double radius = 1.0;
};

// t^{base+ε} e^{-t} on (0, ∞); base 3/2 is the Rellich family, 1/2 the Hardy one.
struct PowExp {
  double epsilon = 1e-3;
  double base = 1.5;
  double exponent() const { return base + epsilon; }
};

// Cubic spline through (t_i, v_i) with prescribed end slopes and zero end values,
// extended by zero outside [t_0, t_n].  A nonzero left slope with t_0 = 0 gives
// the free-slope profiles of the Navier class.
class Spline {
 public:
  Spline() = default;
  Spline(std::vector<double> t, std::vector<double> v, double slope_left = 0.0, double slope_right = 0.0)
      : t_(std::move(t)), v_(std::move(v)), sl_(slope_left), sr_(slope_right) {
    if (t_.size() < 3 || t_.size() != v_.size()) throw InvalidProfile("spline needs at least three knots");
    for (std::size_t i = 0; i + 1 < t_.size(); ++i)
      if (!(t_[i + 1] > t_[i])) throw InvalidProfile("spline knots must be strictly increasing");
    if (v_.front() != 0.0 || v_.back() != 0.0) throw InvalidProfile("spline end values must be zero");
    if (sr_ != 0.0) throw InvalidProfile("spline right end must be clamped");
    bool nonzero = sl_ != 0.0;
    for (double x : v_) nonzero = nonzero || x != 0.0;
    if (!nonzero) throw InvalidProfile("spline is identically zero");
    solve();
  }

  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  double slope_left() const { return sl_; }

  // Returns (y, y', y'').
  std::array<double, 3> eval(double x) const {
    if (x <= t_.front() || x >= t_.back()) return {0.0, 0.0, 0.0};
    std::size_t i = std::upper_bound(t_.begin(), t_.end(), x) - t_.begin() - 1;
    const double h = t_[i + 1] - t_[i];
    const double A = t_[i + 1] - x, B = x - t_[i];
    const double y = m_[i] * A * A * A / (6 * h) + m_[i + 1] * B * B * B / (6 * h) +
                     (v_[i] - m_[i] * h * h / 6) * A / h + (v_[i + 1] - m_[i + 1] * h * h / 6) * B / h;
    const double d1 = -m_[i] * A * A / (2 * h) + m_[i + 1] * B * B / (2 * h) - (v_[i] - m_[i] * h * h / 6) / h +
                      (v_[i + 1] - m_[i + 1] * h * h / 6) / h;
    const double d2 = (m_[i] * A + m_[i + 1] * B) / h;
    return {y, d1, d2};
  }

 private:
  // Clamped spline second derivatives via the tridiagonal (Thomas) sweep.
  void solve() {
    const std::size_t n = t_.size();
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    const double h0 = t_[1] - t_[0], hn = t_[n - 1] - t_[n - 2];
    b[0] = 2 * h0;
    c[0] = h0;
    d[0] = 6 * ((v_[1] - v_[0]) / h0 - sl_);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = t_[i] - t_[i - 1], hr = t_[i + 1] - t_[i];
      a[i] = hl;
      b[i] = 2 * (hl + hr);
      c[i] = hr;
      d[i] = 6 * ((v_[i + 1] - v_[i]) / hr - (v_[i] - v_[i - 1]) / hl);
    }
    a[n - 1] = hn;
    b[n - 1] = 2 * hn;
    d[n - 1] = 6 * (sr_ - (v_[n - 1] - v_[n - 2]) / hn);
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_.assign(n, 0.0);
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  std::vector<double> t_, v_, m_;
  double sl_ = 0.0, sr_ = 0.0;
};

// A one-dimensional test profile, optionally dilated: y(t) = base(scale·t).
class Profile1D {
 public:
  using Family = std::variant<Bump, PowExp, Spline>;

  Profile1D(Family f, double scale = 1.0) : fam_(std::move(f)), scale_(scale) {
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InvalidProfile("scale must be positive");
    if (auto* b = std::get_if<Bump>(&fam_)) {
      if (!(b->radius > 0.0)) throw InvalidProfile("bump radius must be positive");
    }
    if (auto* p = std::get_if<PowExp>(&fam_)) {
      if (!(p->epsilon > 0.0)) throw InvalidProfile("power-exponential epsilon must be positive");
      if (!(p->base >= 0.5)) throw InvalidProfile("power-exponential base must be at least 1/2");
    }
  }

  static Profile1D bump(double c, double r) { return Profile1D(Bump{c, r}); }
  static Profile1D powexp(double eps, double base = 1.5) { return Profile1D(PowExp{eps, base}); }
  static Profile1D spline(std::vector<double> t, std::vector<double> v, double slope_left = 0.0) {
    return Profile1D(Spline(std::move(t), std::move(v), slope_left));
  }

  Profile1D dilated(double s) const { return Profile1D(fam_, scale_ * s); }
  const Family& family() const { return fam_; }
  double scale() const { return scale_; }

  // Returns (y, y', y'') at t.
  std::array<double, 3> eval(double t) const {
    const double u = scale_ * t;
    std::array<double, 3> r = std::visit([&](const auto& f) { return eval_base(f, u); }, fam_);
    r[1] *= scale_;
    r[2] *= scale_ * scale_;
    return r;
  }

  std::pair<double, double> support() const {
    auto s = std::visit([](const auto& f) { return support_base(f); }, fam_);
    return {s.first / scale_, s.second / scale_};
  }

  std::vector<double> breakpoints() const {
    std::vector<double> out;
    if (auto* s = std::get_if<Spline>(&fam_))
      for (double k : s->knots()) out.push_back(k / scale_);
    return out;
  }

  // Order of vanishing at t = 0 for profiles whose support starts there;
  // nullopt when the support stays away from 0.  Throws for supports crossing 0.
  std::optional<double> order_at_zero() const {
    const auto [lo, hi] = support();
    (void)hi;
    if (lo > 0.0) return std::nullopt;
    if (std::holds_alternative<PowExp>(fam_)) return std::get<PowExp>(fam_).exponent();
    if (auto* s = std::get_if<Spline>(&fam_)) {
      if (lo == 0.0) return s->slope_left() != 0.0 ? 1.0 : 2.0;
    }
    throw UnsupportedWeight("profile support touches or crosses t = 0");
  }

  // y'(0+) for half-line profiles; zero for profiles supported away from 0.
  double slope_at_zero() const {
    if (auto* s = std::get_if<Spline>(&fam_))
      if (s->knots().front() == 0.0) return scale_ * s->slope_left();
    return 0.0;
  }

  std::string describe() const {
    char buf[160];
    if (auto* b = std::get_if<Bump>(&fam_)) {
      std::snprintf(buf, sizeof buf, "bump(center=%.17g, radius=%.17g)", b->center, b->radius);
    } else if (auto* p = std::get_if<PowExp>(&fam_)) {
      std::snprintf(buf, sizeof buf, "powexp(epsilon=%.17g, base=%.17g)", p->epsilon, p->base);
    } else {
      const auto& s = std::get<Spline>(fam_);
      std::snprintf(buf, sizeof buf, "spline(knots=%zu, t0=%.17g, t1=%.17g, slope0=%.17g)", s.knots().size(),
                    s.knots().front(), s.knots().back(), s.slope_left());
    }
    std::string out(buf);
    if (scale_ != 1.0) {
      std::snprintf(buf, sizeof buf, " dilated by %.17g", scale_);
      out += buf;
    }
    return out;
  }

 private:
  static std::array<double, 3> eval_base(const Bump& b, double t) {
    const double s = (t - b.center) / b.radius;
    if (!(std::abs(s) < 1.0)) return {0.0, 0.0, 0.0};
    const double w = 1.0 - s * s;
    const double phi = std::exp(-1.0 / w);
    const double g1 = -2.0 * s / (w * w);
    const double g2 = -2.0 / (w * w) - 8.0 * s * s / (w * w * w);
    return {phi, phi * g1 / b.radius, phi * (g1 * g1 + g2) / (b.radius * b.radius)};
  }
  static std::array<double, 3> eval_base(const PowExp& p, double t) {
    if (!(t > 0.0)) return {0.0, 0.0, 0.0};
    const double a = p.exponent();
    const double e = std::exp(a * std::log(t) - t);
    return {e, e * (a / t - 1.0), e * (a * (a - 1.0) / (t * t) - 2.0 * a / t + 1.0)};
  }
  static std::array<double, 3> eval_base(const Spline& s, double t) { return s.eval(t); }

  static std::pair<double, double> support_base(const Bump& b) { return {b.center - b.radius, b.center + b.radius}; }
  static std::pair<double, double> support_base(const PowExp&) { return {0.0, std::numeric_limits<double>::infinity()}; }
  static std::pair<double, double> support_base(const Spline& s) { return {s.knots().front(), s.knots().back()}; }

  Family fam_;
  double scale_ = 1.0;
};

struct MomentRequest {
  bool w2_0 = false;
  bool w2_1 = false;
  bool w4_0 = false;
  bool cross = false;

  static MomentRequest none() { return {}; }
  static MomentRequest all() { return {true, true, true, true}; }
};

// ∫y², ∫y'², ∫y''² and the t^{-2}, t^{-4} weighted moments over the support.
struct Moments {
  double m0 = 0, m1 = 0, m2 = 0;
  std::optional<double> w2_0, w2_1, w4_0, cross;

  Moments scaled(double c2) const {
    Moments r = *this;
    r.m0 *= c2;
    r.m1 *= c2;
    r.m2 *= c2;
    for (auto* o : {&r.w2_0, &r.w2_1, &r.w4_0, &r.cross})
      if (*o) **o *= c2;
    return r;
  }
};

namespace detail {

// ∫_0^∞ t^{-p} y^{(j)} y^{(k)} dt for y = t^a e^{-t}.  On (0, 1] the substitution
// t = e^{-s} is evaluated in log form so that very slow decay (ε → 0) neither
// underflows nor loses the tail.
inline double powexp_moment(double a, int j, int k, int p, const QuadConfig& cfg) {
  auto c = [a](int order, double t) {
    switch (order) {
      case 0: return 1.0;
      case 1: return a - t;
      default: return a * (a - 1.0) - 2.0 * a * t + t * t;
    }
  };
  const double e = 2.0 * a - j - k - p;
  auto near = [&](double s) {
    const double t = std::exp(-s);
    return std::exp(-(e + 1.0) * s - 2.0 * t) * c(j, t) * c(k, t);
  };
  auto far = [&](double t) { return std::exp(e * std::log(t) - 2.0 * t) * c(j, t) * c(k, t); };
  QuadConfig half = cfg;
  half.abs_tol = 0.5 * cfg.abs_tol;
  return integrate(near, 0.0, std::numeric_limits<double>::infinity(), half).value +
         integrate(far, 1.0, std::numeric_limits<double>::infinity(), half).value;
}

inline bool weight_integrable(double order, int deriv, int p) { return 2.0 * (order - deriv) - p > -1.0; }

}  // namespace detail

inline Moments moments(const Profile1D& prof, const MomentRequest& req = {}, const QuadConfig& cfg = {}) {
  const bool any_weighted = req.w2_0 || req.w2_1 || req.w4_0 || req.cross;
  const auto [lo, hi] = prof.support();
  if (any_weighted) {
    if (lo < 0.0) throw UnsupportedWeight("weighted moments need a profile supported in (0, inf)");
    if (auto ord = prof.order_at_zero()) {
      const double k = *ord;
      if ((req.w2_0 && !detail::weight_integrable(k, 0, 2)) || (req.w2_1 && !detail::weight_integrable(k, 1, 2)) ||
          (req.w4_0 && !detail::weight_integrable(k, 0, 4)) || (req.cross && !(2.0 * k - 3.0 > -1.0)))
        throw UnsupportedWeight("requested weighted moment diverges at t = 0 for this profile");
    }
  }

  Moments m;
  if (auto* pe = std::get_if<PowExp>(&prof.family())) {
    // Closed-form dilation law: ∫t^{-p} y^(j) y^(k) scales by σ^{j+k+p-1}.
    const double a = pe->exponent(), s = prof.scale();
    // Unweighted moments that diverge at 0 (m2 of the Hardy family) are reported as +inf.
    auto mom = [&](int j, int k, int p) {
      if (!(2.0 * a - j - k - p > -1.0)) return std::numeric_limits<double>::infinity();
      return std::pow(s, j + k + p - 1) * detail::powexp_moment(a, j, k, p, cfg);
    };
    m.m0 = mom(0, 0, 0);
    m.m1 = mom(1, 1, 0);
    m.m2 = mom(2, 2, 0);
    if (req.w2_0) m.w2_0 = mom(0, 0, 2);
    if (req.w2_1) m.w2_1 = mom(1, 1, 2);
    if (req.w4_0) m.w4_0 = mom(0, 0, 4);
    if (req.cross) m.cross = mom(0, 1, 2);
    return m;
  }

  const auto br = prof.breakpoints();
  auto quad = [&](auto&& g) { return integrate(g, lo, hi, cfg, br).value; };
  m.m0 = quad([&](double t) { auto y = prof.eval(t); return y[0] * y[0]; });
  m.m1 = quad([&](double t) { auto y = prof.eval(t); return y[1] * y[1]; });
  m.m2 = quad([&](double t) { auto y = prof.eval(t); return y[2] * y[2]; });
  if (req.w2_0) m.w2_0 = quad([&](double t) { auto y = prof.eval(t); return y[0] * y[0] / (t * t); });
  if (req.w2_1) m.w2_1 = quad([&](double t) { auto y = prof.eval(t); return y[1] * y[1] / (t * t); });
  if (req.w4_0) m.w4_0 = quad([&](double t) { auto y = prof.eval(t); return y[0] * y[0] / (t * t * t * t); });
  if (req.cross) m.cross = quad([&](double t) { auto y = prof.eval(t); return y[0] * y[1] / (t * t); });
  if (!(m.m0 > 0.0)) throw InvalidProfile("profile has zero L2 norm");
  return m;
}

// Closed-form moments of t^a e^{-t} through I(q) = ∫ t^q e^{-2t} dt = Γ(q+1)/2^{q+1};
// divergent ones come back as +inf.
inline Moments powexp_closed_moments(double a) {
  auto I = [](double q) {
    if (!(q > -1.0)) return std::numeric_limits<double>::infinity();
    return boost::math::tgamma(q + 1.0) / std::pow(2.0, q + 1.0);
  };
  if (!(2 * a - 4 > -1.0)) {
    Moments m;
    m.m0 = I(2 * a);
    m.m1 = 2 * a - 2 > -1.0 ? a * a * I(2 * a - 2) - 2 * a * I(2 * a - 1) + I(2 * a) : I(-1);
    m.m2 = I(-1);
    if (2 * a - 2 > -1.0) m.w2_0 = I(2 * a - 2);
    return m;
  }
  Moments m;
  m.m0 = I(2 * a);
  m.m1 = a * a * I(2 * a - 2) - 2 * a * I(2 * a - 1) + I(2 * a);
  m.m2 = a * a * (a - 1) * (a - 1) * I(2 * a - 4) + 4 * a * a * I(2 * a - 2) + I(2 * a) -
         4 * a * a * (a - 1) * I(2 * a - 3) + 2 * a * (a - 1) * I(2 * a - 2) - 4 * a * I(2 * a - 1);
  m.w2_0 = I(2 * a - 2);
  m.w2_1 = a * a * I(2 * a - 4) - 2 * a * I(2 * a - 3) + I(2 * a - 2);
  m.w4_0 = I(2 * a - 4);
  m.cross = a * I(2 * a - 3) - I(2 * a - 2);
  return m;
}

}  // namespace hardy_rellich
