#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "l1rates/error.hpp"
#include "l1rates/spectral.hpp"

namespace l1rates {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-decreasing λ: [0,∞) → ℝ ∪ {∞}, finite exactly on [0, B) or [0, B].
class WeightFunction {
 public:
  using Fn = std::function<double(double)>;

  WeightFunction() = default;
  WeightFunction(std::string name, Fn eval, double bound, Fn conjugate = {}, Fn argmax = {})
      : name_(std::move(name)), eval_(std::move(eval)), bound_(bound), conj_(std::move(conjugate)),
        argmax_(std::move(argmax)) {
    if (!(bound_ > 0.0)) throw InputError("WeightFunction: B must be positive");
  }

  double operator()(double r) const {
    if (r < 0.0) return kInf;
    if (r > bound_) return kInf;
    return eval_(r);
  }

  const std::string& name() const { return name_; }
  double bound() const { return bound_; }
  bool finite_domain() const { return std::isfinite(bound_); }
  bool has_closed_form() const { return static_cast<bool>(conj_); }
  double closed_form_conjugate(double s) const { return conj_(s); }
  bool has_closed_argmax() const { return static_cast<bool>(argmax_); }
  double closed_argmax(double s) const { return argmax_(s); }

 private:
  std::string name_;
  Fn eval_;
  double bound_ = kInf;
  Fn conj_;
  Fn argmax_;
};

// λ(r) = r²/(4t̄), λ*(s) = s²t̄.
inline WeightFunction heat_weight(double t_bar) {
  if (!(t_bar > 0.0)) throw InputError("heat_weight: t_bar must be positive");
  return WeightFunction(
      "heat", [t_bar](double r) { return r * r / (4.0 * t_bar); }, kInf,
      [t_bar](double s) { return s * s * t_bar; }, [t_bar](double s) { return 2.0 * t_bar * s; });
}

// λ(r) = -4 ln(R - e^r) on [0, ln R).
inline WeightFunction gradiometry_weight(double R) {
  if (!(R > 1.0)) throw InputError("gradiometry_weight: R must exceed 1");
  const double B = std::log(R);
  auto eval = [R](double r) {
    const double d = R - std::exp(r);
    return d > 0.0 ? -4.0 * std::log(d) : kInf;
  };
  // The stationary point e^r = sR/(4+s) is admissible only for s >= 4/(R-1); below that r = 0.
  auto argmax = [R](double s) {
    if (s * (R - 1.0) <= 4.0) return 0.0;
    return std::log(s * R / (4.0 + s));
  };
  auto conj = [R](double s) {
    if (s * (R - 1.0) <= 4.0) return 4.0 * std::log(R - 1.0);
    return s * std::log(s * R / (4.0 + s)) + 4.0 * std::log(4.0 * R / (4.0 + s));
  };
  return WeightFunction("gradiometry", eval, B, conj, argmax);
}

// λ = 0 on [0, B], ∞ beyond; λ*(s) = Bs.
inline WeightFunction indicator_weight(double B) {
  return WeightFunction(
      "indicator", [](double) { return 0.0; }, B, [B](double s) { return B * s; }, [B](double) { return B; });
}

// sup over r of s r - λ(r): log grid, then golden section around the best node.
inline double numeric_fenchel_conjugate(const WeightFunction& w, double s, double* argmax = nullptr) {
  if (!(s >= 0.0)) throw InputError("fenchel_conjugate: s must be non-negative");
  auto obj = [&](double r) {
    const double l = w(r);
    return std::isfinite(l) ? s * r - l : -kInf;
  };
  double hi;
  if (w.finite_domain()) {
    hi = w.bound() * (1.0 - 1e-9);
  } else {
    hi = 1.0;
    while (hi < 1e300 && obj(2.0 * hi) > obj(hi)) hi *= 2.0;
    hi *= 2.0;
  }
  constexpr int kGrid = 512;
  const double lo = std::min(1e-6, hi * 1e-3);
  std::vector<double> rs;
  rs.reserve(kGrid + 2);
  rs.push_back(0.0);
  const double ratio = std::log(hi / lo) / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i) rs.push_back(lo * std::exp(ratio * i));
  if (w.finite_domain() && std::isfinite(w(w.bound()))) rs.push_back(w.bound());
  std::size_t best = 0;
  double best_val = obj(rs[0]);
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const double v = obj(rs[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = rs[best > 0 ? best - 1 : 0];
  double b = rs[std::min(best + 1, rs.size() - 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = obj(c), fd = obj(d);
  while (b - a > 1e-10 * std::max(1.0, std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = obj(d);
    }
  }
  double r_best = rs[best];
  for (double r : {c, d}) {
    const double v = obj(r);
    if (v > best_val) {
      best_val = v;
      r_best = r;
    }
  }
  if (argmax) *argmax = r_best;
  return best_val;
}

inline double fenchel_conjugate(const WeightFunction& w, double s) {
  if (!(s >= 0.0)) throw InputError("fenchel_conjugate: s must be non-negative");
  return w.has_closed_form() ? w.closed_form_conjugate(s) : numeric_fenchel_conjugate(w, s);
}

inline double conjugate_argmax(const WeightFunction& w, double s) {
  if (w.has_closed_argmax()) return w.closed_argmax(s);
  double r = 0.0;
  numeric_fenchel_conjugate(w, s, &r);
  return r;
}

// (-ln t)^{-p} on (0, 1/e], linear extension with matching slope p·e beyond.
inline double phi_p(double t, double p) {
  if (!(t >= 0.0)) throw InputError("phi_p: t must be non-negative");
  if (!(p > 0.0)) throw InputError("phi_p: p must be positive");
  if (t == 0.0) return 0.0;
  const double e_inv = std::exp(-1.0);
  if (t <= e_inv) return std::pow(-std::log(t), -p);
  return 1.0 + p * std::numbers::e * (t - e_inv);
}

struct IndexFunction {
  enum class Kind { Log, Linear };
  Kind kind = Kind::Log;
  double p = 1.0;
  double scale = 1.0;

  static IndexFunction log(double p, double scale = 1.0) { return {Kind::Log, p, scale}; }
  static IndexFunction linear(double slope) { return {Kind::Linear, 1.0, slope}; }

  double operator()(double t) const { return kind == Kind::Log ? scale * phi_p(t, p) : scale * t; }
};

// ψ(α) = sup_{τ≥0} φ(τ) - τ/α.
inline double psi(double alpha, const IndexFunction& phi) {
  if (!(alpha > 0.0)) throw InputError("psi: alpha must be positive");
  if (phi.kind == IndexFunction::Kind::Linear) return alpha <= 1.0 / phi.scale ? 0.0 : kInf;
  const double c = phi.scale, p = phi.p;
  if (c * p * std::numbers::e > 1.0 / alpha) return kInf;
  // τ = e^{-u}, u ≥ 1 covers (0, 1/e]; the linear branch peaks at u = 1 here.
  const double la = std::log(alpha);
  auto h = [&](double u) { return c * std::pow(u, -p) - std::exp(-u - la); };
  const double L = std::max(0.0, -la);
  const double U = std::max(4.0, L + 20.0 + (p + 1.0) * std::log(L + 2.0));
  constexpr int kGrid = 4000;
  double best_u = 1.0, best = h(1.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double u = 1.0 + (U - 1.0) * i / kGrid;
    const double v = h(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  const double step = (U - 1.0) / kGrid;
  double a = std::max(1.0, best_u - step), b = best_u + step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
    const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    if (h(x1) > h(x2))
      b = x2;
    else
      a = x1;
  }
  best = std::max(best, h(0.5 * (a + b)));
  return std::max(best, 0.0);
}

// Leading-order behaviour (ln(1/(αp)))^{-p} of ψ for φ_p.
inline double psi_asymptotic(double alpha, double p) { return std::pow(std::log(1.0 / (alpha * p)), -p); }

struct AnormOptions {
  int lines = 64;      // horizontal lines / ellipses sampled besides the per-mode maximisers
  int oversample = 4;  // points per mode along each line
};

namespace detail {

// Sample points for sup_r e^{-λ(r)} sup|g̃|: 0, a uniform grid and every per-mode maximiser.
inline std::vector<double> radial_samples(const WeightFunction& w, int n_max, int lines) {
  double top = 0.0;
  std::vector<double> rs{0.0};
  for (int n = 1; n <= n_max; ++n) {
    double r = conjugate_argmax(w, n);
    if (w.finite_domain()) r = std::min(r, w.bound() * (1.0 - 1e-9));
    rs.push_back(r);
    top = std::max(top, r);
  }
  double hi = w.finite_domain() ? w.bound() * (1.0 - 1e-9) : std::max(2.0 * top, 1.0);
  if (!w.finite_domain()) hi = std::max(hi, conjugate_argmax(w, 1.0));
  for (int i = 1; i <= lines; ++i) rs.push_back(hi * i / lines);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  return rs;
}

inline int effective_degree(const Eigen::VectorXd& magnitudes) {
  for (Eigen::Index n = magnitudes.size() - 1; n >= 0; --n)
    if (magnitudes[n] != 0.0) return static_cast<int>(n);
  return 0;
}

}  // namespace detail

// Grid sup of e^{-λ(|Im z|)}|g̃(z)| over the strip; a lower bound for the true norm.
inline double anorm_circle(const SpectralFunction& g, const WeightFunction& w, const AnormOptions& opt = {}) {
  if (g.space()->kind() != ManifoldKind::Circle) throw InputError("anorm_circle: circle function required");
  const int N = g.space()->bandwidth();
  std::vector<std::complex<double>> hat(N + 1);
  Eigen::VectorXd mag(N + 1);
  for (int n = 0; n <= N; ++n) {
    hat[n] = fourier_coeff(g, n);
    mag[n] = std::abs(hat[n]);
  }
  const int ne = detail::effective_degree(mag);
  const int nx = std::max(8, opt.oversample * 2 * (ne + 1));
  // Real g has |g̃(x - iy)| = |g̃(x + iy)|, so y >= 0 suffices.
  const auto ys = detail::radial_samples(w, ne, opt.lines);
  Eigen::MatrixXcd E(nx, ne + 1);
  for (int i = 0; i < nx; ++i)
    for (int n = 0; n <= ne; ++n) E(i, n) = std::polar(1.0, 2.0 * kPi * i * n / nx);
  double best = 0.0;
  Eigen::VectorXcd up(ne + 1), down(ne + 1);
  for (double y : ys) {
    const double lam = w(y);
    if (!std::isfinite(lam)) continue;
    for (int n = 0; n <= ne; ++n) {
      if (mag[n] == 0.0) {
        up[n] = down[n] = 0.0;
        continue;
      }
      const double lm = std::log(mag[n]);
      const std::complex<double> ph = hat[n] / mag[n];
      // ĝ(n)e^{in(x+iy)} decays with y; ĝ(-n)e^{-in(x+iy)} grows.
      up[n] = ph * std::exp(lm - n * y - lam);
      down[n] = n == 0 ? 0.0 : std::conj(ph) * std::exp(lm + n * y - lam);
    }
    const Eigen::VectorXcd v = E * up + E.conjugate() * down;
    if (!v.allFinite()) throw DiagnosticError("anorm_circle: extension sum does not converge on the strip");
    best = std::max(best, v.cwiseAbs().maxCoeff());
  }
  return best;
}

// Same estimator on Bernstein ellipses for g = a_0/2 + sum a_n T_n.
inline double anorm_chebyshev(const Eigen::VectorXd& a, const WeightFunction& w, const AnormOptions& opt = {}) {
  const int ne = detail::effective_degree(a.cwiseAbs());
  const int nth = std::max(8, opt.oversample * (ne + 1)) + 1;
  const auto ts = detail::radial_samples(w, ne, opt.lines);
  // z = (ω + 1/ω)/2 with ω = e^{t + iθ}; T_n(z) = (ω^n + ω^{-n})/2. θ ∈ [0, π] by conjugate symmetry.
  Eigen::MatrixXcd E(nth, ne + 1);
  for (int i = 0; i < nth; ++i)
    for (int n = 0; n <= ne; ++n) E(i, n) = std::polar(1.0, kPi * i * n / (nth - 1));
  double best = 0.0;
  Eigen::VectorXcd up(ne + 1), down(ne + 1);
  for (double t : ts) {
    const double lam = w(t);
    if (!std::isfinite(lam)) continue;
    for (int n = 0; n <= ne; ++n) {
      const double an = n == 0 ? 0.5 * a[0] : a[n];
      if (an == 0.0) {
        up[n] = down[n] = 0.0;
        continue;
      }
      const double s = an > 0 ? 1.0 : -1.0;
      const double lm = std::log(std::abs(an));
      if (n == 0) {
        up[n] = s * std::exp(lm - lam);
        down[n] = 0.0;
      } else {
        up[n] = 0.5 * s * std::exp(lm + n * t - lam);
        down[n] = 0.5 * s * std::exp(lm - n * t - lam);
      }
    }
    const Eigen::VectorXcd v = E * up + E.conjugate() * down;
    if (!v.allFinite()) throw DiagnosticError("anorm_interval: extension sum does not converge on the ellipse");
    best = std::max(best, v.cwiseAbs().maxCoeff());
  }
  return best;
}

inline double anorm_interval(const SpectralFunction& g, const WeightFunction& w, const AnormOptions& opt = {}) {
  if (g.space()->kind() != ManifoldKind::Interval) throw InputError("anorm_interval: interval function required");
  return anorm_chebyshev(chebyshev_coeffs(g), w, opt);
}

// sup over grid nodes x of the interval norm of t ↦ (Mg)(x,t) = sum_l P_l(t) (Q_l g)(x).
inline double anorm_sphere(const SpectralFunction& g, const WeightFunction& w, const AnormOptions& opt = {}) {
  if (g.space()->kind() != ManifoldKind::Sphere) throw InputError("anorm_sphere: sphere function required");
  const int L = g.space()->bandwidth();
  const Eigen::MatrixXd G = degree_components(g);
  const Eigen::MatrixXd C = legendre_series_to_chebyshev(L);
  double best = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    const Eigen::VectorXd a = C * G.row(i).transpose();
    best = std::max(best, anorm_chebyshev(a, w, opt));
  }
  return best;
}

inline double anorm(const SpectralFunction& g, const WeightFunction& w, const AnormOptions& opt = {}) {
  switch (g.space()->kind()) {
    case ManifoldKind::Circle: return anorm_circle(g, w, opt);
    case ManifoldKind::Interval: return anorm_interval(g, w, opt);
    case ManifoldKind::Sphere: return anorm_sphere(g, w, opt);
  }
  return 0.0;
}

inline int floor_tol(double x) { return static_cast<int>(std::floor(x + 1e-9 * std::max(1.0, std::abs(x)))); }

class InterpProfile {
 public:
  static constexpr int kHorizon = 10000;

  InterpProfile(ManifoldKind kind, WeightFunction weight, int memo = 512) : kind_(kind), weight_(std::move(weight)) {
    memo_.reserve(memo + 1);
    for (int m = 0; m <= memo; ++m) memo_.push_back(fenchel_conjugate(weight_, m));
    m0_ = -1;
    for (int m = 0; m < kHorizon; ++m) {
      const double l0 = conj(m), l1 = conj(m + 1);
      if (l0 > 0.0 && l1 - l0 > 1e-12 * std::max(1.0, std::abs(l0))) {
        m0_ = m;
        a_ = l1 - l0;
        break;
      }
    }
    if (m0_ < 0) throw InputError("interp_profile: weight too flat, no m0 within horizon");
    const double q = 1.0 - std::exp(-a_);
    if (kind_ == ManifoldKind::Sphere) {
      c_ = 1.0 / (2.0 * q * q) + 1.0 / (4.0 * q);
      d_ = 1.0 / (2.0 * q);
    } else {
      c_ = 2.0 / std::expm1(a_);
      d_ = 0.0;
    }
    const double m1 = m0_ + 1.0;
    switch (kind_) {
      case ManifoldKind::Circle: delta0_ = kPi / (m0_ + 0.5); break;
      case ManifoldKind::Interval: delta0_ = 2.0 / (m1 * m1); break;
      case ManifoldKind::Sphere: delta0_ = 4.0 * kPi / (m1 * m1); break;
    }
  }

  ManifoldKind kind() const { return kind_; }
  const WeightFunction& weight() const { return weight_; }
  int m0() const { return m0_; }
  double a() const { return a_; }
  double c_lambda() const { return c_; }
  double d_lambda() const { return d_; }
  double delta0() const { return delta0_; }

  double conj(int m) const {
    if (m >= 0 && m < static_cast<int>(memo_.size())) return memo_[m];
    return fenchel_conjugate(weight_, m);
  }

  int m_of_delta(double delta) const {
    if (!(delta > 0.0)) throw InputError("m_of_delta: delta must be positive");
    switch (kind_) {
      case ManifoldKind::Circle: return floor_tol(kPi / delta - 0.5);
      case ManifoldKind::Interval: return floor_tol(std::sqrt(2.0 / delta)) - 1;
      case ManifoldKind::Sphere: return floor_tol(std::sqrt(4.0 * kPi / delta)) - 1;
    }
    return 0;
  }

  // Bound on ||g - P_m g||_∞ / ||g||, m ≥ m0, with the constants as stated for each manifold.
  double projection_bound(int m) const {
    const double e = std::exp(-conj(m));
    switch (kind_) {
      case ManifoldKind::Circle: return 2.0 * c_ * e;
      case ManifoldKind::Interval: return c_ * e;
      case ManifoldKind::Sphere: return (c_ + m * d_) * e;
    }
    return 0.0;
  }

  double gamma(double delta) const {
    const int m = m_of_delta(delta);
    const double e = std::exp(-conj(m));
    return kind_ == ManifoldKind::Sphere ? (c_ + m * d_) * e : c_ * e;
  }

 private:
  ManifoldKind kind_;
  WeightFunction weight_;
  std::vector<double> memo_;
  int m0_ = 0;
  double a_ = 0.0, c_ = 0.0, d_ = 0.0, delta0_ = 0.0;
};

inline InterpProfile interp_profile(ManifoldKind kind, const WeightFunction& w) { return InterpProfile(kind, w); }

struct InterpCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

inline InterpCheck interp_check(const SpectralFunction& g, const InterpProfile& profile, double delta,
                                const AnormOptions& opt = {}) {
  if (g.space()->kind() != profile.kind()) throw InputError("interp_check: manifold mismatch");
  if (!(delta > 0.0) || delta > profile.delta0() * (1.0 + 1e-12))
    throw InputError("interp_check: delta outside (0, delta0]");
  const Eigen::VectorXd v = g.values();
  InterpCheck out;
  out.lhs = sup_norm(v);
  const double z = out.lhs == 0.0 ? 0.0 : anorm(g, profile.weight(), opt);
  out.rhs = profile.gamma(delta) * z + l1_norm(v, g.grid()) / delta;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

}  // namespace l1rates
