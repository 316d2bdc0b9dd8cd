#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "l1rates/analytic.hpp"
#include "l1rates/error.hpp"
#include "l1rates/operators.hpp"
#include "l1rates/random.hpp"
#include "l1rates/spectral.hpp"

namespace l1rates {

// (1/(α r)) ||T f - g_obs||^r_{L^r} + ||f||²
struct TikhonovProblem {
  DiagonalOperator op;
  Eigen::VectorXd gobs;  // nodal values on op.space's grid
  double alpha = 1.0;
  int r = 1;
};

enum class L1Method { Auto, PrimalDual, InteriorPoint };

inline std::string to_string(L1Method m) {
  switch (m) {
    case L1Method::Auto: return "auto";
    case L1Method::PrimalDual: return "primal-dual";
    case L1Method::InteriorPoint: return "interior-point";
  }
  return "unknown";
}

struct L1Options {
  double tol = 1e-8;
  int max_iter = 50000;
  L1Method method = L1Method::Auto;
  int auto_pd_budget = 2000;  // primal-dual iterations tried before Auto switches to interior point
  double drop_tol = 1e-14;    // columns whose optimal coefficient is provably below this are fixed at 0
  bool record_trace = false;
  int trace_every = 10;
};

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double gap = 0.0;
};

struct SolveResult {
  SpectralFunction f_hat;
  double objective = 0.0;
  double residual_l1 = 0.0;
  int iterations = 0;
  double pd_gap = 0.0;
  bool converged = false;
  std::string method;
  // Scaled dual y with |y_i| <= w_i; the box [-w/α, w/α] dual is -y/α.
  Eigen::VectorXd dual;
  std::vector<TraceRow> trace;
};

inline void validate_problem(const TikhonovProblem& prob) {
  if (!(prob.alpha > 0.0)) throw InputError("solve: alpha must be positive");
  if (prob.r != 1 && prob.r != 2) throw InputError("solve: r must be 1 or 2");
  if (prob.gobs.size() != static_cast<Eigen::Index>(prob.op.space->grid().size()))
    throw InputError("solve: g_obs length does not match the grid");
  if (!prob.gobs.allFinite()) throw InputError("solve: g_obs not finite");
}

inline double tikhonov_objective(const TikhonovProblem& prob, const Eigen::VectorXd& coeffs) {
  const auto& sp = *prob.op.space;
  const Eigen::VectorXd res = sp.synthesis() * prob.op.sigma.cwiseProduct(coeffs) - prob.gobs;
  const auto& w = sp.grid().weights;
  if (prob.r == 1) return w.dot(res.cwiseAbs()) / prob.alpha + coeffs.squaredNorm();
  return w.dot(res.cwiseAbs2()) / (2.0 * prob.alpha) + coeffs.squaredNorm();
}

// Closed form of the r = 2 functional: the quadrature is exact on the band, so the
// normal equations are diagonal and f_k = σ_k ĝ_k / (σ_k² + 2α).
inline SolveResult solve_l2(const TikhonovProblem& prob) {
  validate_problem(prob);
  if (prob.r != 2) throw InputError("solve_l2: r must be 2");
  const auto& sp = *prob.op.space;
  const Eigen::VectorXd ghat = sp.analysis() * prob.gobs;
  const Eigen::VectorXd& s = prob.op.sigma;
  Eigen::VectorXd f = s.cwiseProduct(ghat).cwiseQuotient((s.cwiseAbs2().array() + 2.0 * prob.alpha).matrix());
  SolveResult out;
  out.f_hat = SpectralFunction(prob.op.space, f);
  out.objective = tikhonov_objective(prob, f);
  out.residual_l1 = l1_norm(sp.synthesis() * s.cwiseProduct(f) - prob.gobs, sp.grid());
  out.converged = true;
  out.method = "closed-form";
  return out;
}

namespace detail {

struct DenseL1 {
  Eigen::MatrixXd A;  // nodes x active columns
  Eigen::VectorXd w, g;
  double alpha = 1.0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gram;  // optional fast Aᵀ diag(d) A

  double primal(const Eigen::VectorXd& f) const { return w.dot((A * f - g).cwiseAbs()) / alpha + f.squaredNorm(); }
  // Dual value at y (|y| <= w), in the unscaled convention p = -y/α.
  double dual(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd aty = A.transpose() * y;
    return g.dot(y) / alpha - aty.squaredNorm() / (4.0 * alpha * alpha);
  }
  Eigen::VectorXd primal_from_dual(const Eigen::VectorXd& y) const { return A.transpose() * y / (2.0 * alpha); }
  // P(Aᵀy/2α) - D(y) written as a sum of non-negative terms.
  double gap_at_dual(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd r = A * primal_from_dual(y) - g;
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += w[i] * std::abs(r[i]) + r[i] * y[i];
    return std::max(0.0, s) / alpha;
  }
};

struct CoreResult {
  Eigen::VectorXd f, y;
  double objective = 0.0, gap = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace;
};

inline void pick_best(const DenseL1& P, const Eigen::VectorXd& f, const Eigen::VectorXd& y, CoreResult& out) {
  const double pf = P.primal(f), dy = P.dual(y);
  const Eigen::VectorXd fy = P.primal_from_dual(y);
  const double gy = P.gap_at_dual(y);
  const double gf = pf - dy;
  if (gy <= gf) {
    out.f = fy;
    out.gap = gy;
    out.objective = P.primal(fy);
  } else {
    out.f = f;
    out.gap = std::max(0.0, gf);
    out.objective = pf;
  }
  out.y = y;
}

inline double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.cols() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd u = A.transpose() * (A * v);
    const double nu = u.norm();
    if (nu == 0.0) return 0.0;
    const double prev = lam;
    lam = nu;
    v = u / nu;
    if (it > 5 && std::abs(lam - prev) < 1e-12 * lam) break;
  }
  return std::sqrt(lam);
}

// Chambolle–Pock with acceleration for the 2-strongly convex ||f||².
inline CoreResult primal_dual(const DenseL1& P, double tol, int max_iter, bool trace, int trace_every) {
  const Eigen::Index n = P.A.rows(), K = P.A.cols();
  CoreResult out;
  const double L = spectral_norm(P.A) * 1.01;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(K), fbar = f, fprev(K);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd box = P.w / P.alpha;
  double tau = 1.0 / L, sig = 1.0 / L;
  const double mu = 2.0;
  for (int it = 1; it <= max_iter; ++it) {
    p = (p + sig * (P.A * fbar - P.g)).cwiseMax(-box).cwiseMin(box);
    fprev = f;
    f = (f - tau * (P.A.transpose() * p)) / (1.0 + 2.0 * tau);
    const double theta = 1.0 / std::sqrt(1.0 + 2.0 * mu * tau);
    tau *= theta;
    sig /= theta;
    fbar = f + theta * (f - fprev);
    out.iterations = it;
    if (it % 10 == 0 || it == max_iter) {
      const Eigen::VectorXd y = -P.alpha * p;
      pick_best(P, f, y, out);
      if (trace && it % trace_every == 0) out.trace.push_back({it, out.objective, out.gap});
      if (out.gap <= tol * (1.0 + std::abs(out.objective))) {
        out.converged = true;
        return out;
      }
    }
  }
  return out;
}

// Mehrotra predictor–corrector on  min wᵀ(u+v) + α||f||²  s.t.  A f - u + v = g,  u, v >= 0.
inline CoreResult interior_point(const DenseL1& P, double tol, int max_iter, bool trace) {
  const Eigen::Index n = P.A.rows(), K = P.A.cols();
  CoreResult out;
  const double a = P.alpha;
  const double kappa = 0.1 * (1.0 + P.g.cwiseAbs().maxCoeff());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd u = (-P.g).cwiseMax(0.0).array() + kappa;
  Eigen::VectorXd v = P.g.cwiseMax(0.0).array() + kappa;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd zu = P.w, zv = P.w;
  const Eigen::MatrixXd At = P.A.transpose();

  auto max_step = [](const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
    double s = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (dx[i] < 0.0) s = std::min(s, -x[i] / dx[i]);
    return s;
  };

  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd rd = 2.0 * a * f - At * y;
    const Eigen::VectorXd ru = P.w + y - zu;
    const Eigen::VectorXd rv = P.w - y - zv;
    const Eigen::VectorXd rp = P.A * f - u + v - P.g;
    const double mu = (u.dot(zu) + v.dot(zv)) / (2.0 * n);

    const Eigen::VectorXd D = u.cwiseQuotient(zu) + v.cwiseQuotient(zv);
    const Eigen::VectorXd Dinv = D.cwiseInverse();
    // Lower triangle of Aᵀ D⁻¹ A + 2αI; the factorisations read only that half.
    Eigen::MatrixXd M;
    if (P.gram) {
      M = P.gram(Dinv);
    } else {
      const Eigen::MatrixXd B = Dinv.cwiseSqrt().asDiagonal() * P.A;
      M = Eigen::MatrixXd::Zero(K, K);
      M.selfadjointView<Eigen::Lower>().rankUpdate(B.transpose());
    }
    M.diagonal().array() += 2.0 * a;
    // Symmetric diagonal scaling keeps the factorisation accurate when α ≪ σ².
    const Eigen::VectorXd s = M.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd Ms = s.asDiagonal() * M * s.asDiagonal();
    const Eigen::LLT<Eigen::MatrixXd> llt(Ms);
    const bool use_llt = llt.info() == Eigen::Success;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    if (!use_llt) ldlt.compute(Ms);

    auto direction = [&](const Eigen::VectorXd& rcu, const Eigen::VectorXd& rcv, Eigen::VectorXd& df,
                         Eigen::VectorXd& dy, Eigen::VectorXd& dzu, Eigen::VectorXd& dzv, Eigen::VectorXd& du,
                         Eigen::VectorXd& dv) {
      const Eigen::VectorXd h =
          -rp - (rcu + u.cwiseProduct(ru)).cwiseQuotient(zu) + (rcv + v.cwiseProduct(rv)).cwiseQuotient(zv);
      const Eigen::VectorXd rhs = -rd + At * Dinv.cwiseProduct(h);
      df = s.cwiseProduct(use_llt ? Eigen::VectorXd(llt.solve(s.cwiseProduct(rhs)))
                                  : Eigen::VectorXd(ldlt.solve(s.cwiseProduct(rhs))));
      dy = Dinv.cwiseProduct(h - P.A * df);
      dzu = dy + ru;
      dzv = -dy + rv;
      du = -(rcu + u.cwiseProduct(dzu)).cwiseQuotient(zu);
      dv = -(rcv + v.cwiseProduct(dzv)).cwiseQuotient(zv);
    };

    Eigen::VectorXd df, dy, dzu, dzv, du, dv;
    direction(u.cwiseProduct(zu), v.cwiseProduct(zv), df, dy, dzu, dzv, du, dv);
    double step = std::min({max_step(u, du), max_step(v, dv), max_step(zu, dzu), max_step(zv, dzv)});
    const double mu_aff =
        ((u + step * du).dot(zu + step * dzu) + (v + step * dv).dot(zv + step * dzv)) / (2.0 * n);
    const double centering = std::pow(mu_aff / mu, 3.0);
    const Eigen::VectorXd rcu = (u.cwiseProduct(zu) + du.cwiseProduct(dzu)).array() - centering * mu;
    const Eigen::VectorXd rcv = (v.cwiseProduct(zv) + dv.cwiseProduct(dzv)).array() - centering * mu;
    direction(rcu, rcv, df, dy, dzu, dzv, du, dv);
    step = std::min({max_step(u, du), max_step(v, dv), max_step(zu, dzu), max_step(zv, dzv)});
    step = std::min(1.0, 0.995 * step);
    f += step * df;
    u += step * du;
    v += step * dv;
    y += step * dy;
    zu += step * dzu;
    zv += step * dzv;

    out.iterations = it;
    // Standard interior-point stopping: relative residuals and complementarity. The exact certificate
    // P(f) - D(y) contains ||2αf - Aᵀy||²/(4α²) and is unusable once α is far below rounding level.
    const double obj_s = P.w.dot(u + v) + a * f.squaredNorm();
    const double comp = u.dot(zu) + v.dot(zv);
    const double rp_n = (P.A * f - u + v - P.g).lpNorm<Eigen::Infinity>() / (1.0 + P.g.lpNorm<Eigen::Infinity>());
    const Eigen::VectorXd aty = At * y;
    const double rd_n = (2.0 * a * f - aty).lpNorm<Eigen::Infinity>() /
                        (1.0 + aty.lpNorm<Eigen::Infinity>() + 2.0 * a * f.lpNorm<Eigen::Infinity>());
    const double rz_n = std::max((P.w + y - zu).lpNorm<Eigen::Infinity>(), (P.w - y - zv).lpNorm<Eigen::Infinity>()) /
                        (1.0 + P.w.lpNorm<Eigen::Infinity>());
    out.f = f;
    out.y = y;
    out.objective = P.primal(f);
    out.gap = comp / a;
    if (trace) out.trace.push_back({it, out.objective, out.gap});
    if (rp_n <= tol && rd_n <= tol && rz_n <= tol && comp <= tol * (a + obj_s)) {
      out.converged = true;
      return out;
    }
    if (step < 1e-12) break;
  }
  return out;
}

}  // namespace detail

struct L1MatrixResult {
  Eigen::VectorXd f, dual;
  double objective = 0.0, pd_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string method;
  std::vector<TraceRow> trace;
};

// min (1/α) Σ_i w_i |(A f)_i - g_i| + ||f||² for a dense A.
inline L1MatrixResult solve_l1_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, const Eigen::VectorXd& g,
                                      double alpha, const L1Options& opt = {},
                                      std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gram = {}) {
  if (!(alpha > 0.0)) throw InputError("solve_l1: alpha must be positive");
  if (!(opt.tol > 0.0) || opt.max_iter < 1) throw InputError("solve_l1: tol and max_iter must be positive");
  if (A.rows() != g.size() || w.size() != g.size()) throw InputError("solve_l1: dimension mismatch");
  if ((w.array() < 0.0).any() || !A.allFinite() || !g.allFinite()) throw InputError("solve_l1: invalid data");
  detail::DenseL1 P{A, w, g, alpha, std::move(gram)};
  detail::CoreResult core;
  std::string method;
  if (A.cols() == 0) {
    core.f = Eigen::VectorXd::Zero(0);
    core.y = Eigen::VectorXd::Zero(g.size());
    core.objective = P.primal(core.f);
    core.gap = 0.0;
    core.converged = true;
    method = "trivial";
  } else if (opt.method == L1Method::InteriorPoint) {
    core = detail::interior_point(P, opt.tol, std::min(opt.max_iter, 500), opt.record_trace);
    method = "interior-point";
  } else {
    const int budget = opt.method == L1Method::Auto ? std::min(opt.max_iter, opt.auto_pd_budget) : opt.max_iter;
    core = detail::primal_dual(P, opt.tol, budget, opt.record_trace, opt.trace_every);
    method = "primal-dual";
    if (!core.converged && opt.method == L1Method::Auto) {
      auto ip = detail::interior_point(P, opt.tol, 500, opt.record_trace);
      ip.iterations += core.iterations;
      if (ip.converged || ip.gap < core.gap) {
        if (opt.record_trace) ip.trace.insert(ip.trace.begin(), core.trace.begin(), core.trace.end());
        core = std::move(ip);
        method = "interior-point";
      }
    }
  }
  L1MatrixResult out;
  out.f = std::move(core.f);
  out.dual = std::move(core.y);
  out.objective = core.objective;
  out.pd_gap = core.gap;
  out.iterations = core.iterations;
  out.converged = core.converged;
  out.method = method;
  out.trace = std::move(core.trace);
  return out;
}

inline SolveResult solve_l1(const TikhonovProblem& prob, const L1Options& opt = {}) {
  validate_problem(prob);
  if (prob.r != 1) throw InputError("solve_l1: r must be 1");
  const auto& sp = *prob.op.space;
  const auto& w = sp.grid().weights;
  const Eigen::MatrixXd& Phi = sp.synthesis();
  // |f_k| <= σ_k Σ_i w_i |Φ_ik| / (2α) at the optimum.
  std::vector<int> active;
  for (int k = 0; k < sp.size(); ++k) {
    const double bound = prob.op.sigma[k] * w.dot(Phi.col(k).cwiseAbs()) / (2.0 * prob.alpha);
    if (bound > opt.drop_tol) active.push_back(k);
  }
  Eigen::MatrixXd A(Phi.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) A.col(j) = Phi.col(active[j]) * prob.op.sigma[active[j]];
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gram;
  if (sp.kind() == ManifoldKind::Sphere) {
    Eigen::VectorXd sa(static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) sa[j] = prob.op.sigma[active[j]];
    gram = [&sp, &active, sa](const Eigen::VectorXd& d) -> Eigen::MatrixXd {
      return sa.asDiagonal() * sp.weighted_gram(d, active) * sa.asDiagonal();
    };
  }
  auto core = solve_l1_matrix(A, w, prob.gobs, prob.alpha, opt, std::move(gram));

  Eigen::VectorXd f = Eigen::VectorXd::Zero(sp.size());
  for (std::size_t j = 0; j < active.size(); ++j) f[active[j]] = core.f[j];
  SolveResult out;
  out.f_hat = SpectralFunction(prob.op.space, f);
  out.objective = tikhonov_objective(prob, f);
  out.residual_l1 = l1_norm(Phi * prob.op.sigma.cwiseProduct(f) - prob.gobs, sp.grid());
  out.iterations = core.iterations;
  out.pd_gap = core.pd_gap;
  out.converged = core.converged;
  out.method = core.method;
  out.dual = std::move(core.dual);
  out.trace = std::move(core.trace);
  return out;
}

inline SolveResult solve(const TikhonovProblem& prob, const L1Options& opt = {}) {
  return prob.r == 1 ? solve_l1(prob, opt) : solve_l2(prob);
}

inline double bregman(const SpectralFunction& f, const SpectralFunction& udag) {
  require_same_space(f, udag, "bregman");
  return (f.coeffs() - udag.coeffs()).squaredNorm();
}

// γ of the smoothing assumption: ||T||_{L2→A^λ} times the interpolation profile.
inline std::function<double(double)> assumption_gamma(const DiagonalOperator& op, const InterpProfile& profile,
                                                      double scale = 1.0) {
  const double c = op.norm_bound * scale;
  return [c, &profile](double delta) { return c * profile.gamma(delta); };
}

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

// ||f̂|| <= ||u†|| + sqrt(2ε/α) + 2ηγ(2η)/α.
inline BoundCheck energy_bound_check(const SolveResult& result, const SpectralFunction& udag, double alpha, double eps,
                                     double eta, const std::function<double(double)>& gamma, double delta0) {
  if (eta > 0.5 * delta0 * (1.0 + 1e-12)) throw InputError("energy_bound_check: eta exceeds delta0/2");
  BoundCheck out;
  out.lhs = l2_norm(result.f_hat);
  out.rhs = l2_norm(udag) + std::sqrt(2.0 * eps / alpha) + (eta > 0.0 ? 2.0 * eta * gamma(2.0 * eta) / alpha : 0.0);
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

struct RateBoundCheck {
  BoundCheck error;     // β D(f̂) <= 4ε/α + (1/β)(2ηγ(4η)/α)² + 2ψ(2α)
  BoundCheck residual;  // ||T f̂ - g†||_1 / 2 <= 8ε + 2(2ηγ(4η))²/(βα) + 4αψ(4α)
};

// The two rate inequalities with q' = 2, b = 2.
inline RateBoundCheck rate_bound_check(double bregman_error, double residual_exact, double alpha, double eps,
                                       double eta, double beta, const IndexFunction& phi,
                                       const std::function<double(double)>& gamma) {
  const double q = 2.0, b = 2.0;
  const double gterm = eta > 0.0 ? 2.0 * eta * gamma(2.0 * b / (b - 1.0) * eta) : 0.0;
  RateBoundCheck out;
  out.error.lhs = beta * bregman_error;
  out.error.rhs = 2.0 * q / alpha * eps + std::pow(beta, 1.0 - q) * std::pow(gterm / alpha, q) + q * psi(b * alpha, phi);
  out.error.holds = out.error.lhs <= out.error.rhs * (1.0 + 1e-9) + 1e-15;
  out.residual.lhs = residual_exact / b;
  out.residual.rhs =
      4.0 * q * eps + 2.0 * std::pow(gterm, q) / std::pow(beta * alpha, q - 1.0) + 2.0 * alpha * q * psi(2.0 * b * alpha, phi);
  out.residual.holds = out.residual.lhs <= out.residual.rhs * (1.0 + 1e-9) + 1e-15;
  return out;
}

inline double choose_alpha_heat(double eps, double eta, double p, double t_bar) {
  if (!(eps >= 0.0) || !(eta >= 0.0)) throw InputError("choose_alpha_heat: eps and eta must be non-negative");
  if (eps == 0.0 && eta == 0.0) throw InputError("choose_alpha_heat: eps and eta both zero");
  if (!(p > 0.0) || !(t_bar > 0.0)) throw InputError("choose_alpha_heat: p and t_bar must be positive");
  if (eps >= 1.0) throw InputError("choose_alpha_heat: eps must be below 1");
  const double a1 = eps > 0.0 ? eps * std::pow(-std::log(eps), p) : 0.0;
  const double a2 = eta > 0.0 ? std::exp(-kPi * kPi * t_bar / (16.0 * eta * eta)) : 0.0;
  const double a = std::max(a1, a2);
  if (!(a > 0.0)) throw InputError("choose_alpha_heat: alpha underflows for this (eps, eta)");
  return a;
}

// α₂ balances (1/α²) R^{-6} η^{-3} R^{-2√(π/η)} against (-ln α)^{-2p}: with L = -ln α,
// 2L + 2p ln L = 6 ln R + 3 ln η + 2√(π/η) ln R.
inline double gradiometry_alpha_eta(double eta, double p, double R) {
  const double K = 6.0 * std::log(R) + 3.0 * std::log(eta) + 2.0 * std::sqrt(kPi / eta) * std::log(R);
  auto h = [&](double L) { return 2.0 * L + 2.0 * p * std::log(L) - K; };
  double lo = 1.0, hi = std::max(2.0, K);
  if (h(lo) >= 0.0) return std::exp(-1.0);
  while (h(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(-0.5 * (lo + hi));
}

inline double choose_alpha_gradiometry(double eps, double eta, double p, double R) {
  if (!(eps >= 0.0) || !(eta >= 0.0)) throw InputError("choose_alpha_gradiometry: eps and eta must be non-negative");
  if (eps == 0.0 && eta == 0.0) throw InputError("choose_alpha_gradiometry: eps and eta both zero");
  if (!(p > 0.0) || !(R > 1.0)) throw InputError("choose_alpha_gradiometry: need p > 0 and R > 1");
  if (eps >= 1.0) throw InputError("choose_alpha_gradiometry: eps must be below 1");
  const double a1 = eps > 0.0 ? eps * std::pow(-std::log(eps), 2.0 * p) : 0.0;
  const double a2 = eta > 0.0 ? gradiometry_alpha_eta(eta, p, R) : 0.0;
  const double a = std::max(a1, a2);
  if (!(a > 0.0)) throw InputError("choose_alpha_gradiometry: alpha underflows for this (eps, eta)");
  return a;
}

struct VscReport {
  int samples = 0;
  int violations = 0;
  double margin = kInf;        // min over samples of rhs - lhs
  double required_scale = 0.0;  // smallest β' with no violation among these samples
};

// Random f = u† + d around u†: half isotropic directions, half shrinkage towards 0 plus noise.
inline std::vector<SpectralFunction> vsc_samples(const SpectralFunction& udag, int samples, std::uint64_t seed,
                                                 double radius) {
  Rng rng(seed);
  const Eigen::Index K = udag.coeffs().size();
  std::vector<SpectralFunction> out;
  out.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd d(K);
    for (Eigen::Index k = 0; k < K; ++k) d[k] = rng.uniform(-1.0, 1.0);
    d.normalize();
    Eigen::VectorXd f;
    if (s % 2 == 0) {
      f = udag.coeffs() + radius * rng.uniform() * d;
    } else {
      const double t = rng.uniform(-1.0, 1.0);
      f = t * udag.coeffs() + 0.1 * radius * rng.uniform() * d;
    }
    out.emplace_back(udag.space(), f);
  }
  return out;
}

// β D(f) <= ||f||² - ||u†||² + φ(||T f - T u†||_{L1}) on the given samples.
inline VscReport vsc_evaluate(const DiagonalOperator& op, const SpectralFunction& udag, const IndexFunction& phi,
                              double beta, const std::vector<SpectralFunction>& fs) {
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("vsc_check: beta must lie in (0, 1)");
  VscReport rep;
  const IndexFunction unit{phi.kind, phi.p, 1.0};
  const double un2 = udag.coeffs().squaredNorm();
  for (const auto& f : fs) {
    const double lhs = beta * bregman(f, udag);
    const Eigen::VectorXd diff = synthesize(apply(op, SpectralFunction(op.space, f.coeffs() - udag.coeffs())));
    const double res = l1_norm(diff, op.space->grid());
    const double base = f.coeffs().squaredNorm() - un2;
    const double rhs = base + phi(res);
    ++rep.samples;
    if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) ++rep.violations;
    rep.margin = std::min(rep.margin, rhs - lhs);
    const double need = lhs - base;
    if (need > 0.0) {
      const double ph = unit(res);
      rep.required_scale = std::max(rep.required_scale, ph > 0.0 ? need / ph : kInf);
    }
  }
  return rep;
}

inline VscReport vsc_check(const DiagonalOperator& op, const SpectralFunction& udag, const IndexFunction& phi,
                           double beta, int samples, std::uint64_t seed) {
  const double radius = std::max(1.0, 2.0 * l2_norm(udag));
  return vsc_evaluate(op, udag, phi, beta, vsc_samples(udag, samples, seed, radius));
}

}  // namespace l1rates
