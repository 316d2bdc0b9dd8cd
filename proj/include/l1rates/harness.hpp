#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "l1rates/analytic.hpp"
#include "l1rates/error.hpp"
#include "l1rates/noise.hpp"
#include "l1rates/operators.hpp"
#include "l1rates/random.hpp"
#include "l1rates/solver.hpp"
#include "l1rates/spectral.hpp"

namespace l1rates {

enum class AlphaRule { Paper, FixedGrid };

struct ExperimentConfig {
  OperatorKind problem = OperatorKind::Heat;
  double t_bar = 1.0;
  double R = 2.0;
  double p = 1.0;
  int bandwidth = 128;
  int max_degree = 32;
  int quad_degree = 0;

  std::vector<double> eps_grid{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> eta_grid{0.025, 0.05, 0.1, 0.2, 0.4};
  AlphaRule alpha_rule = AlphaRule::Paper;
  std::vector<double> alpha_grid;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  double tol = 1e-8;
  int max_iter = 50000;
  L1Method method = L1Method::Auto;

  double amplitude_factor = 10.0;  // impulse height in units of ||g†||_∞
  MaskShape mask = MaskShape::Contiguous;
  int source_max_degree = -1;
  double source_decay = 0.0;
  bool source_balance = false;

  double beta = 0.5;
  int vsc_samples = 200;
  bool compare_l2 = true;
  double gamma_scale = 1.0;

  // single-cell commands
  double eps = 0.0;
  double eta = 0.1;
  double alpha = 0.0;  // 0: use the rule

  // interpolation study
  ManifoldKind interp_manifold = ManifoldKind::Circle;
  std::string interp_weight = "heat";
  double interp_weight_param = 1.0;
  int interp_bandwidth = 16;
  int interp_samples = 100;
  int interp_deltas = 20;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  // strtod rather than stod: subnormals written by %.17g must read back.
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = v.empty() || std::isspace(static_cast<unsigned char>(v[0])) ? 0.0 : std::strtod(begin, &end);
  if (end != begin + v.size() || v.empty() || !std::isfinite(x))
    throw InputError("config: " + key + " expects a number, got '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw InputError("config: " + key + " expects an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw InputError("config: " + key + " expects an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  if (v.empty() || v[0] == '-') throw InputError("config: " + key + " expects an unsigned integer");
  try {
    x = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw InputError("config: " + key + " expects an unsigned integer, got '" + v + "'");
  }
  if (pos != v.size()) throw InputError("config: " + key + " expects an unsigned integer, got '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("config: " + key + " expects true or false");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_grid(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  if (out.empty()) throw InputError("config: " + key + " is empty");
  for (double x : out)
    if (!(x > 0.0)) throw InputError("config: " + key + " must be positive");
  if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end())
    throw InputError("config: " + key + " must be strictly increasing");
  return out;
}

}  // namespace detail

inline OperatorKind parse_problem(const std::string& v) {
  if (v == "heat") return OperatorKind::Heat;
  if (v == "gradiometry") return OperatorKind::Gradiometry;
  throw InputError("unknown problem '" + v + "' (heat|gradiometry)");
}

inline ManifoldKind parse_manifold(const std::string& v) {
  if (v == "circle") return ManifoldKind::Circle;
  if (v == "interval") return ManifoldKind::Interval;
  if (v == "sphere") return ManifoldKind::Sphere;
  throw InputError("unknown manifold '" + v + "' (circle|interval|sphere)");
}

inline void validate(const ExperimentConfig& c) {
  if (!(c.t_bar > 0.0)) throw InputError("config: t_bar must be positive");
  if (!(c.R > 1.0)) throw InputError("config: R must exceed 1");
  if (!(c.p > 0.0)) throw InputError("config: p must be positive");
  if (c.bandwidth < 1 || c.max_degree < 1) throw InputError("config: bandwidth and max_degree must be positive");
  if (c.quad_degree != 0 && c.quad_degree < c.max_degree) throw InputError("config: quad_degree below max_degree");
  if (c.seeds.empty()) throw InputError("config: seeds is empty");
  if (!(c.tol > 0.0) || c.max_iter < 1) throw InputError("config: tol and max_iter must be positive");
  if (c.alpha_rule == AlphaRule::FixedGrid && c.alpha_grid.empty())
    throw InputError("config: alpha_rule = fixed needs alpha_grid");
  if (!(c.amplitude_factor >= 0.0)) throw InputError("config: amplitude must be non-negative");
  if (!(c.beta > 0.0 && c.beta < 1.0)) throw InputError("config: beta must lie in (0, 1)");
  if (c.vsc_samples < 0) throw InputError("config: vsc_samples must be non-negative");
  if (!(c.gamma_scale > 0.0)) throw InputError("config: gamma_scale must be positive");
  if (!(c.eps >= 0.0 && c.eps < 1.0) || !(c.eta >= 0.0) || !(c.alpha >= 0.0))
    throw InputError("config: eps in [0,1), eta and alpha non-negative");
  if (c.interp_bandwidth < 1 || c.interp_samples < 1 || c.interp_deltas < 1)
    throw InputError("config: interp sizes must be positive");
  if (c.interp_weight != "heat" && c.interp_weight != "gradiometry" && c.interp_weight != "indicator")
    throw InputError("config: interp_weight must be heat, gradiometry or indicator");
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, bool> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string v = detail::trim(line.substr(eq + 1));
    if (seen[key]) throw InputError("config: duplicate key '" + key + "'");
    seen[key] = true;
    using namespace detail;
    if (key == "problem") c.problem = parse_problem(v);
    else if (key == "t_bar") c.t_bar = parse_double(key, v);
    else if (key == "R") c.R = parse_double(key, v);
    else if (key == "p") c.p = parse_double(key, v);
    else if (key == "bandwidth") c.bandwidth = static_cast<int>(parse_int(key, v));
    else if (key == "max_degree") c.max_degree = static_cast<int>(parse_int(key, v));
    else if (key == "quad_degree") c.quad_degree = static_cast<int>(parse_int(key, v));
    else if (key == "eps_grid") c.eps_grid = parse_grid(key, v);
    else if (key == "eta_grid") c.eta_grid = parse_grid(key, v);
    else if (key == "alpha_grid") c.alpha_grid = parse_grid(key, v);
    else if (key == "alpha_rule") {
      if (v == "paper") c.alpha_rule = AlphaRule::Paper;
      else if (v == "fixed") c.alpha_rule = AlphaRule::FixedGrid;
      else throw InputError("config: alpha_rule must be paper or fixed");
    } else if (key == "seeds") {
      c.seeds.clear();
      for (const auto& s : split_list(v)) c.seeds.push_back(parse_u64(key, s));
      if (c.seeds.empty()) throw InputError("config: seeds is empty");
    } else if (key == "tol") c.tol = parse_double(key, v);
    else if (key == "max_iter") c.max_iter = static_cast<int>(parse_int(key, v));
    else if (key == "method") {
      if (v == "auto") c.method = L1Method::Auto;
      else if (v == "primal-dual") c.method = L1Method::PrimalDual;
      else if (v == "interior-point") c.method = L1Method::InteriorPoint;
      else throw InputError("config: method must be auto, primal-dual or interior-point");
    } else if (key == "amplitude") c.amplitude_factor = parse_double(key, v);
    else if (key == "mask") {
      if (v == "contiguous") c.mask = MaskShape::Contiguous;
      else if (v == "scattered") c.mask = MaskShape::Scattered;
      else throw InputError("config: mask must be contiguous or scattered");
    } else if (key == "source_max_degree") c.source_max_degree = static_cast<int>(parse_int(key, v));
    else if (key == "source_decay") c.source_decay = parse_double(key, v);
    else if (key == "source_balance") c.source_balance = parse_bool(key, v);
    else if (key == "beta") c.beta = parse_double(key, v);
    else if (key == "vsc_samples") c.vsc_samples = static_cast<int>(parse_int(key, v));
    else if (key == "compare_l2") c.compare_l2 = parse_bool(key, v);
    else if (key == "gamma_scale") c.gamma_scale = parse_double(key, v);
    else if (key == "eps") c.eps = parse_double(key, v);
    else if (key == "eta") c.eta = parse_double(key, v);
    else if (key == "alpha") c.alpha = parse_double(key, v);
    else if (key == "interp_manifold") c.interp_manifold = parse_manifold(v);
    else if (key == "interp_weight") c.interp_weight = v;
    else if (key == "interp_weight_param") c.interp_weight_param = parse_double(key, v);
    else if (key == "interp_bandwidth") c.interp_bandwidth = static_cast<int>(parse_int(key, v));
    else if (key == "interp_samples") c.interp_samples = static_cast<int>(parse_int(key, v));
    else if (key == "interp_deltas") c.interp_deltas = static_cast<int>(parse_int(key, v));
    else throw InputError("config: unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  return parse_config(in);
}

inline DiagonalOperator make_operator(const ExperimentConfig& c) {
  return c.problem == OperatorKind::Heat ? heat_operator(c.t_bar, c.bandwidth)
                                         : gradiometry_operator(c.R, c.max_degree, c.quad_degree);
}

inline SourceOptions source_options(const ExperimentConfig& c) {
  return {c.source_max_degree, c.source_decay, c.source_balance};
}

inline double choose_alpha(const ExperimentConfig& c, double eps, double eta) {
  return c.problem == OperatorKind::Heat ? choose_alpha_heat(eps, eta, c.p, c.t_bar)
                                         : choose_alpha_gradiometry(eps, eta, c.p, c.R);
}

// Index of the variational source condition and of the ε-rate: p for heat, 2p for gradiometry.
inline double vsc_index(const ExperimentConfig& c) { return c.problem == OperatorKind::Heat ? c.p : 2.0 * c.p; }

// Target exponent of the squared error in η: 2p for heat, p for gradiometry.
inline double eta_exponent(const ExperimentConfig& c) { return c.problem == OperatorKind::Heat ? 2.0 * c.p : c.p; }

inline L1Options solver_options(const ExperimentConfig& c) {
  L1Options o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.method = c.method;
  return o;
}

struct RateRow {
  double eps = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double bregman_error = 0.0;
  double residual_l1 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;

  bool operator==(const RateRow&) const = default;
};

inline bool row_less(const RateRow& a, const RateRow& b) {
  return std::tie(a.eps, a.eta, a.alpha, a.seed) < std::tie(b.eps, b.eta, b.alpha, b.seed);
}

inline const char* kCsvHeader = "eps,eta,alpha,bregman_error,residual_l1,iterations,converged,seed";

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_csv(std::vector<RateRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), row_less);
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.eps) + ',' + format_double(r.eta) + ',' + format_double(r.alpha) + ',' +
           format_double(r.bregman_error) + ',' + format_double(r.residual_l1) + ',' + std::to_string(r.iterations) +
           ',' + (r.converged ? "1" : "0") + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<RateRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_csv(rows);
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::vector<RateRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InputError("csv: missing or wrong header");
  std::vector<RateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_list(line);
    if (f.size() != 8) throw InputError("csv: expected 8 fields");
    RateRow r;
    r.eps = detail::parse_double("eps", f[0]);
    r.eta = detail::parse_double("eta", f[1]);
    r.alpha = detail::parse_double("alpha", f[2]);
    r.bregman_error = detail::parse_double("bregman_error", f[3]);
    r.residual_l1 = detail::parse_double("residual_l1", f[4]);
    r.iterations = static_cast<int>(detail::parse_int("iterations", f[5]));
    r.converged = detail::parse_bool("converged", f[6]);
    r.seed = detail::parse_u64("seed", f[7]);
    rows.push_back(r);
  }
  return rows;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.points = static_cast<int>(x.size());
  if (x.size() != y.size() || x.size() < 2) return f;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

struct CellCheck {
  RateRow row;
  bool checked = false;  // η within the range where the bounds apply
  BoundCheck energy;
  RateBoundCheck rate;
  double l2_error = -1.0;  // r = 2 error at the same α, when compared
  double eps_measured = 0.0;
  double eta_measured = 0.0;
  double residual_exact = 0.0;  // ||T f̂ - g†||_{L1}
  std::string method;
};

struct RateStudy {
  std::vector<RateRow> rows;  // sorted
  std::vector<CellCheck> cells;
  LineFit eta_fit;  // ln mean error² against ln η over ε = 0 cells with η <= η0
  LineFit eps_fit;  // mean error² against (-ln ε)^{-index} over η = 0 cells
  double eta0 = 0.0;
  double eta_target = 0.0;
  double eps_index = 0.0;
  std::map<std::uint64_t, double> beta_prime;  // fitted source-condition constant per seed
  int energy_violations = 0;
  int rate_violations = 0;
  int unchecked_cells = 0;
  int l2_cells = 0;
  int l1_wins = 0;
  int nonconverged = 0;

  bool inequalities_hold() const { return energy_violations == 0 && rate_violations == 0; }
  double l1_win_fraction() const { return l2_cells ? static_cast<double>(l1_wins) / l2_cells : 1.0; }
};

struct StudyCell {
  double eps, eta;
};

inline std::vector<StudyCell> study_cells(const ExperimentConfig& c) {
  std::vector<StudyCell> cells;
  for (double eta : c.eta_grid) cells.push_back({0.0, eta});
  for (double eps : c.eps_grid) cells.push_back({eps, 0.0});
  return cells;
}

inline RateStudy run_rate_study(const ExperimentConfig& cfg) {
  validate(cfg);
  const DiagonalOperator op = make_operator(cfg);
  const auto& grid = op.space->grid();
  const InterpProfile profile = interp_profile(op.manifold().kind, op.weight);
  const auto gamma = assumption_gamma(op, profile, cfg.gamma_scale);
  const double delta0 = profile.delta0();
  const double pv = vsc_index(cfg);
  const L1Options sopt = solver_options(cfg);

  RateStudy study;
  study.eta0 = delta0 / 4.0;
  study.eta_target = eta_exponent(cfg);
  study.eps_index = pv;

  for (std::uint64_t seed : cfg.seeds) {
    const SourceElement src = make_source(op, cfg.p, mix_seed(seed, 0), source_options(cfg));
    const SpectralFunction gdag = apply(op, src.udag);
    const Eigen::VectorXd gdag_v = synthesize(gdag);
    const double amp = cfg.amplitude_factor * sup_norm(gdag_v);

    std::vector<CellCheck> seed_cells;
    std::vector<SpectralFunction> fits;
    std::uint64_t stream = 1;
    for (const auto& cell : study_cells(cfg)) {
      const NoiseInstance noise = make_impulsive(grid, cell.eta, cell.eps, amp, mix_seed(seed, stream++), cfg.mask);
      const Eigen::VectorXd gobs = gdag_v + noise.xi;
      std::vector<double> alphas;
      if (cfg.alpha_rule == AlphaRule::Paper)
        alphas.push_back(choose_alpha(cfg, cell.eps, cell.eta));
      else
        alphas = cfg.alpha_grid;
      for (double alpha : alphas) {
        const TikhonovProblem prob{op, gobs, alpha, 1};
        const SolveResult res = solve_l1(prob, sopt);
        CellCheck cc;
        cc.row = {cell.eps, cell.eta, alpha, bregman(res.f_hat, src.udag), res.residual_l1, res.iterations,
                  res.converged, seed};
        cc.method = res.method;
        // Bounds are stated with the measured noise levels.
        cc.eps_measured = noise.epsilon_measured;
        cc.eta_measured = noise.eta_measured;
        cc.residual_exact = l1_norm(synthesize(apply(op, res.f_hat)) - gdag_v, grid);
        cc.checked = cc.eta_measured <= study.eta0 * (1.0 + 1e-12);
        if (cc.checked)
          cc.energy = energy_bound_check(res, src.udag, alpha, cc.eps_measured, cc.eta_measured, gamma, delta0);
        if (cfg.compare_l2 && cell.eps == 0.0 && cell.eta > 0.0) {
          const TikhonovProblem p2{op, gobs, alpha, 2};
          cc.l2_error = bregman(solve_l2(p2).f_hat, src.udag);
        }
        fits.push_back(res.f_hat);
        seed_cells.push_back(std::move(cc));
      }
    }

    // β' is the smallest constant making the source condition hold on random probes and on the reconstructions.
    std::vector<SpectralFunction> probes =
        vsc_samples(src.udag, cfg.vsc_samples, mix_seed(seed, 1u << 20), std::max(1.0, 2.0 * l2_norm(src.udag)));
    probes.insert(probes.end(), fits.begin(), fits.end());
    const VscReport fit = vsc_evaluate(op, src.udag, IndexFunction::log(pv), cfg.beta, probes);
    const double bp = fit.required_scale;
    study.beta_prime[seed] = bp;
    const IndexFunction phi = IndexFunction::log(pv, bp);

    for (auto& cc : seed_cells) {
      if (cc.checked)
        cc.rate = rate_bound_check(cc.row.bregman_error, cc.residual_exact, cc.row.alpha, cc.eps_measured,
                                   cc.eta_measured, cfg.beta, phi, gamma);
      study.cells.push_back(std::move(cc));
    }
  }

  for (const auto& cc : study.cells) {
    study.rows.push_back(cc.row);
    if (!cc.row.converged) ++study.nonconverged;
    if (!cc.checked) {
      ++study.unchecked_cells;
      continue;
    }
    if (!cc.energy.holds) ++study.energy_violations;
    if (!cc.rate.error.holds || !cc.rate.residual.holds) ++study.rate_violations;
    if (cc.l2_error >= 0.0) {
      ++study.l2_cells;
      if (cc.row.bregman_error <= cc.l2_error) ++study.l1_wins;
    }
  }
  std::stable_sort(study.rows.begin(), study.rows.end(), row_less);

  if (cfg.alpha_rule == AlphaRule::Paper) {
    std::vector<double> x, y;
    for (double eta : cfg.eta_grid) {
      if (eta > study.eta0) continue;
      double acc = 0.0;
      int n = 0;
      for (const auto& r : study.rows)
        if (r.eps == 0.0 && r.eta == eta) {
          acc += std::log(r.bregman_error);
          ++n;
        }
      if (n == 0) continue;
      x.push_back(std::log(eta));
      y.push_back(acc / n);
    }
    study.eta_fit = fit_line(x, y);
    x.clear();
    y.clear();
    for (double eps : cfg.eps_grid) {
      double acc = 0.0;
      int n = 0;
      for (const auto& r : study.rows)
        if (r.eta == 0.0 && r.eps == eps) {
          acc += r.bregman_error;
          ++n;
        }
      if (n == 0) continue;
      x.push_back(std::pow(-std::log(eps), -pv));
      y.push_back(acc / n);
    }
    study.eps_fit = fit_line(x, y);
  }
  return study;
}

struct InterpStudy {
  int samples = 0;
  int checks = 0;
  int violations = 0;
  double max_ratio = 0.0;  // max lhs/rhs
  double delta0 = 0.0;
  std::vector<std::pair<std::uint64_t, double>> offending;  // (sample seed, δ)
};

inline WeightFunction interp_weight(const ExperimentConfig& c) {
  if (c.interp_weight == "heat") return heat_weight(c.interp_weight_param);
  if (c.interp_weight == "gradiometry") return gradiometry_weight(c.interp_weight_param);
  return indicator_weight(c.interp_weight_param);
}

inline SpacePtr interp_space(ManifoldKind kind, int bandwidth) {
  switch (kind) {
    case ManifoldKind::Circle: return SpectralSpace::circle(bandwidth);
    case ManifoldKind::Interval: return SpectralSpace::interval(bandwidth);
    case ManifoldKind::Sphere: return SpectralSpace::sphere(bandwidth);
  }
  return nullptr;
}

// Chebyshev coefficients u_n e^{-λ*(n)}, n <= N, u_n uniform in [-1, 1].
inline Eigen::VectorXd random_ball_chebyshev(const InterpProfile& profile, int N, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd a(N + 1);
  for (int n = 0; n <= N; ++n) a[n] = rng.uniform(-1.0, 1.0) * std::exp(-profile.conj(n));
  return a;
}

// Random element with coefficients u_n e^{-λ*(n)}, u_n uniform in [-1, 1]: Fourier coefficients on the circle,
// Chebyshev coefficients on the interval, real harmonic coefficients per degree on the sphere.
inline SpectralFunction random_ball_element(const SpacePtr& space, const InterpProfile& profile, std::uint64_t seed) {
  Rng rng(seed);
  const int N = space->bandwidth();
  switch (space->kind()) {
    case ManifoldKind::Circle: {
      std::vector<std::complex<double>> hat(N + 1);
      for (int n = 0; n <= N; ++n) {
        const double e = std::exp(-profile.conj(n));
        const double re = rng.uniform(-1.0, 1.0), im = n == 0 ? 0.0 : rng.uniform(-1.0, 1.0);
        hat[n] = std::complex<double>(re, im) * (e / std::sqrt(2.0));
      }
      return from_fourier(space, hat);
    }
    case ManifoldKind::Interval: return from_chebyshev(space, random_ball_chebyshev(profile, N, seed));
    case ManifoldKind::Sphere: {
      Eigen::VectorXd c(space->size());
      for (int k = 0; k < space->size(); ++k) c[k] = rng.uniform(-1.0, 1.0) * std::exp(-profile.conj(space->degree(k)));
      return SpectralFunction(space, c);
    }
  }
  return SpectralFunction::zero(space);
}

inline std::vector<double> log_delta_grid(double delta0, int count, double span = 1e-3) {
  std::vector<double> d(count);
  for (int i = 0; i < count; ++i)
    d[i] = count == 1 ? delta0 : delta0 * std::pow(span, 1.0 - static_cast<double>(i) / (count - 1));
  d.back() = delta0;
  return d;
}

inline InterpStudy run_interp_study(ManifoldKind kind, const WeightFunction& weight, int samples,
                                    const std::vector<double>& delta_grid, std::uint64_t seed, int bandwidth,
                                    double gamma_scale = 1.0) {
  const InterpProfile profile = interp_profile(kind, weight);
  for (double d : delta_grid)
    if (!(d > 0.0) || d > profile.delta0() * (1.0 + 1e-12)) throw InputError("interp study: delta outside (0, delta0]");
  const SpacePtr space = interp_space(kind, bandwidth);
  InterpStudy rep;
  rep.delta0 = profile.delta0();
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t sseed = mix_seed(seed, static_cast<std::uint64_t>(s));
    const SpectralFunction g = random_ball_element(space, profile, sseed);
    const Eigen::VectorXd v = g.values();
    const double sup = sup_norm(v), l1 = l1_norm(v, g.grid());
    const double z = anorm(g, weight);
    ++rep.samples;
    for (double d : delta_grid) {
      const double rhs = gamma_scale * profile.gamma(d) * z + l1 / d;
      ++rep.checks;
      rep.max_ratio = std::max(rep.max_ratio, rhs > 0.0 ? sup / rhs : 0.0);
      if (sup > rhs * (1.0 + 1e-9)) {
        ++rep.violations;
        rep.offending.emplace_back(sseed, d);
      }
    }
  }
  return rep;
}

inline InterpStudy run_interp_study(const ExperimentConfig& c, std::uint64_t seed) {
  const InterpProfile profile = interp_profile(c.interp_manifold, interp_weight(c));
  return run_interp_study(c.interp_manifold, interp_weight(c), c.interp_samples,
                          log_delta_grid(profile.delta0(), c.interp_deltas), seed, c.interp_bandwidth, c.gamma_scale);
}

}  // namespace l1rates
