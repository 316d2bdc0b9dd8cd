#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>

#include "l1rates/analytic.hpp"
#include "l1rates/error.hpp"
#include "l1rates/random.hpp"
#include "l1rates/spectral.hpp"

namespace l1rates {

enum class OperatorKind { Heat, Gradiometry };

inline std::string to_string(OperatorKind k) { return k == OperatorKind::Heat ? "heat" : "gradiometry"; }

// Forward operator acting by multipliers on the orthonormal basis of its space.
struct DiagonalOperator {
  OperatorKind kind = OperatorKind::Heat;
  SpacePtr space;
  Eigen::VectorXd sigma;      // per coefficient index
  Eigen::VectorXd log_sigma;  // exact, unaffected by the underflow floor
  double t_bar = 0.0;
  double R = 0.0;
  WeightFunction weight;
  double norm_bound = 0.0;  // bound for ||T f||_{A^λ} / ||f||_{L2}

  const Manifold& manifold() const { return space->manifold(); }
};

inline DiagonalOperator heat_operator(double t_bar, int bandwidth, int num_nodes = 0) {
  if (!(t_bar > 0.0)) throw InputError("heat_operator: t_bar must be positive");
  DiagonalOperator op;
  op.kind = OperatorKind::Heat;
  op.space = SpectralSpace::circle(bandwidth, num_nodes);
  op.t_bar = t_bar;
  const int K = op.space->size();
  op.sigma.resize(K);
  op.log_sigma.resize(K);
  for (int k = 0; k < K; ++k) {
    const double n = op.space->degree(k);
    op.log_sigma[k] = -n * n * t_bar;
    op.sigma[k] = std::exp(op.log_sigma[k]);
  }
  op.weight = heat_weight(t_bar);
  op.norm_bound = 2.0 * std::max(1.0, 1.0 / std::sqrt(t_bar));
  return op;
}

// sup_{0<=r<ln R} (R - e^r)^4 sum_l σ_l e^{rl} sqrt((2l+1)/(4π)), using |P_l| <= e^{lr} on ∂E_r
// and ||Q_l f||_∞ <= sqrt((2l+1)/(4π)) ||f||_{L2}.
inline double gradiometry_norm_bound(double R) {
  const double B = std::log(R);
  auto value = [&](double r) {
    const double q = std::exp(r) / R;
    double sum = 0.0;
    double term_scale = 1.0 / (R * R * R);  // q^l / R^3
    for (int l = 0; l < 10000000; ++l) {
      const double t = (l + 1.0) * (l + 2.0) * term_scale * std::sqrt((2.0 * l + 1.0) / (4.0 * kPi));
      sum += t;
      if (l > 10 && t < 1e-17 * sum) break;
      term_scale *= q;
    }
    const double d = R - std::exp(r);
    return d * d * d * d * sum;
  };
  constexpr int kGrid = 200;
  double best = value(0.0), best_r = 0.0;
  for (int i = 1; i < kGrid; ++i) {
    const double r = B * i / kGrid;
    const double v = value(r);
    if (v > best) {
      best = v;
      best_r = r;
    }
  }
  double a = std::max(0.0, best_r - B / kGrid), b = std::min(B * (1.0 - 1e-6), best_r + B / kGrid);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    if (value(x1) > value(x2))
      b = x2;
    else
      a = x1;
  }
  return std::max(best, value(0.5 * (a + b)));
}

inline DiagonalOperator gradiometry_operator(double R, int max_degree, int quad_degree = 0) {
  if (!(R > 1.0)) throw InputError("gradiometry_operator: R must exceed 1");
  DiagonalOperator op;
  op.kind = OperatorKind::Gradiometry;
  op.space = SpectralSpace::sphere(max_degree, quad_degree);
  op.R = R;
  const int K = op.space->size();
  op.sigma.resize(K);
  op.log_sigma.resize(K);
  for (int k = 0; k < K; ++k) {
    const double l = op.space->degree(k);
    op.log_sigma[k] = std::log((l + 1.0) * (l + 2.0)) - (l + 3.0) * std::log(R);
    op.sigma[k] = std::max(std::exp(op.log_sigma[k]), 1e-300);
  }
  op.weight = gradiometry_weight(R);
  op.norm_bound = gradiometry_norm_bound(R);
  return op;
}

inline void require_operator_space(const DiagonalOperator& op, const SpectralFunction& f, const char* who) {
  if (!f.space() || !op.space->compatible(*f.space()))
    throw InputError(std::string(who) + ": function does not live on the operator's space");
}

inline SpectralFunction apply(const DiagonalOperator& op, const SpectralFunction& f) {
  require_operator_space(op, f, "apply");
  return SpectralFunction(op.space, op.sigma.cwiseProduct(f.coeffs()));
}

inline SpectralFunction adjoint_apply(const DiagonalOperator& op, const SpectralFunction& g) {
  require_operator_space(op, g, "adjoint_apply");
  return SpectralFunction(op.space, op.sigma.cwiseProduct(g.coeffs()));
}

inline SpectralFunction normal_apply(const DiagonalOperator& op, const SpectralFunction& f) {
  require_operator_space(op, f, "normal_apply");
  return SpectralFunction(op.space, op.sigma.cwiseAbs2().cwiseProduct(f.coeffs()));
}

struct SourceOptions {
  int max_degree = -1;          // band-limit of the representer; -1 keeps all degrees
  double degree_decay = 0.0;    // per-degree energy of w scaled by (1+deg)^{-decay}
  bool balance_orders = false;  // spread each degree's energy evenly over its orders
};

struct SourceElement {
  SpectralFunction udag;
  SpectralFunction w;
  double p = 0.0;
  double norm_w = 0.0;
};

// Index of the source condition: φ_{p/2}(T*T) for heat, φ_p(T*T) for gradiometry.
inline double source_index(const DiagonalOperator& op, double p) { return op.kind == OperatorKind::Heat ? 0.5 * p : p; }

inline SourceElement make_source(const DiagonalOperator& op, double p, std::uint64_t seed, const SourceOptions& opt = {}) {
  if (!(p > 0.0)) throw InputError("make_source: p must be positive");
  Rng rng(seed);
  const auto& sp = *op.space;
  const int K = sp.size();
  Eigen::VectorXd w(K);
  for (int k = 0; k < K; ++k) w[k] = rng.uniform(-1.0, 1.0);
  for (int k = 0; k < K; ++k) {
    const int d = sp.degree(k);
    if (opt.max_degree >= 0 && d > opt.max_degree) {
      w[k] = 0.0;
      continue;
    }
    double scale = std::pow(1.0 + d, -0.5 * opt.degree_decay);
    if (opt.balance_orders) {
      const int mult = sp.kind() == ManifoldKind::Sphere ? 2 * d + 1 : (sp.kind() == ManifoldKind::Circle && d > 0 ? 2 : 1);
      scale /= std::sqrt(static_cast<double>(mult));
    }
    w[k] *= scale;
  }
  const double nw = w.norm();
  if (nw == 0.0) throw InputError("make_source: representer vanished");
  w /= nw;
  const double q = source_index(op, p);
  Eigen::VectorXd u(K);
  for (int k = 0; k < K; ++k) {
    // φ_q(σ²) with -ln σ² taken from the exact log multiplier.
    const double neg_log = -2.0 * op.log_sigma[k];
    const double f = neg_log >= 1.0 ? std::pow(neg_log, -q) : phi_p(std::exp(-neg_log), q);
    u[k] = f * w[k];
  }
  SourceElement s;
  s.udag = SpectralFunction(op.space, u);
  s.w = SpectralFunction(op.space, w);
  s.p = p;
  s.norm_w = 1.0;
  return s;
}

// Sobolev-type norm sqrt(sum (1 + deg²)^{s} c_k²) from coefficients.
inline double sobolev_norm(const SpectralFunction& f, double s) {
  double acc = 0.0;
  const auto& sp = *f.space();
  for (int k = 0; k < sp.size(); ++k) {
    const double d = sp.degree(k);
    acc += std::pow(1.0 + d * d, s) * f.coeffs()[k] * f.coeffs()[k];
  }
  return std::sqrt(acc);
}

}  // namespace l1rates
