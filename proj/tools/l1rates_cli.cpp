#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "l1rates/l1rates.hpp"

namespace {

using namespace l1rates;

enum Exit { kOk = 0, kViolation = 1, kInput = 2, kNoConvergence = 3 };

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string problem;
};

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (!c.problem.empty()) cfg.problem = parse_problem(c.problem);
  if (c.seed) cfg.seeds = {*c.seed};
  validate(cfg);
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

Eigen::VectorXd read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open coefficient file '" + path + "'");
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::getline(in, tok);
      continue;
    }
    v.push_back(detail::parse_double("coefficient", tok));
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Cell {
  DiagonalOperator op;
  SourceElement src;
  Eigen::VectorXd gdag;
  NoiseInstance noise;
};

Cell make_cell(const ExperimentConfig& cfg) {
  Cell c{make_operator(cfg), {}, {}, {}};
  const std::uint64_t seed = cfg.seeds.front();
  c.src = make_source(c.op, cfg.p, mix_seed(seed, 0), source_options(cfg));
  c.gdag = synthesize(apply(c.op, c.src.udag));
  const double amp = cfg.amplitude_factor * sup_norm(c.gdag);
  c.noise = make_impulsive(c.op.space->grid(), cfg.eta, cfg.eps, amp, mix_seed(seed, 1), cfg.mask);
  return c;
}

int cmd_apply(const Common& common, const std::string& coeff_path) {
  const ExperimentConfig cfg = resolve(common);
  const DiagonalOperator op = make_operator(cfg);
  const Eigen::VectorXd c = read_coefficients(coeff_path);
  if (c.size() != op.space->size())
    throw InputError("apply: expected " + std::to_string(op.space->size()) + " coefficients, got " +
                     std::to_string(c.size()));
  const SpectralFunction out = apply(op, SpectralFunction(op.space, c));
  std::string text;
  for (Eigen::Index k = 0; k < out.coeffs().size(); ++k) text += format_double(out.coeffs()[k]) + '\n';
  write_text(common.out, text);
  return kOk;
}

int cmd_noise(const Common& common) {
  const ExperimentConfig cfg = resolve(common);
  const Cell cell = make_cell(cfg);
  const Grid& grid = cell.op.space->grid();
  std::string text = "node,a,b,weight,corrupt,xi\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    text += std::to_string(i) + ',' + format_double(grid.nodes[i].a) + ',' + format_double(grid.nodes[i].b) + ',' +
            format_double(grid.weights[i]) + ',' + (cell.noise.corrupt_mask[i] ? "1" : "0") + ',' +
            format_double(cell.noise.xi[i]) + '\n';
  write_text(common.out, text);
  std::fprintf(stderr, "epsilon_measured=%.17g eta_measured=%.17g amplitude=%.17g\n", cell.noise.epsilon_measured,
               cell.noise.eta_measured, cell.noise.amplitude);
  return kOk;
}

int cmd_solve(const Common& common) {
  const ExperimentConfig cfg = resolve(common);
  const Cell cell = make_cell(cfg);
  const double alpha = cfg.alpha > 0.0 ? cfg.alpha : choose_alpha(cfg, cfg.eps, cfg.eta);
  const TikhonovProblem prob{cell.op, cell.gdag + cell.noise.xi, alpha, 1};
  const SolveResult res = solve_l1(prob, solver_options(cfg));
  const RateRow row{cfg.eps, cfg.eta, alpha, bregman(res.f_hat, cell.src.udag), res.residual_l1, res.iterations,
                    res.converged, cfg.seeds.front()};
  write_text(common.out, format_csv({row}));
  std::fprintf(stderr, "method=%s objective=%.17g pd_gap=%.3e iterations=%d\n", res.method.c_str(), res.objective,
               res.pd_gap, res.iterations);
  if (!res.converged) {
    std::fprintf(stderr, "solver did not converge\n");
    return kNoConvergence;
  }
  const InterpProfile profile = interp_profile(cell.op.manifold().kind, cell.op.weight);
  if (cell.noise.eta_measured <= profile.delta0() / 2.0) {
    const auto chk = energy_bound_check(res, cell.src.udag, alpha, cell.noise.epsilon_measured,
                                        cell.noise.eta_measured, assumption_gamma(cell.op, profile, cfg.gamma_scale),
                                        profile.delta0());
    std::fprintf(stderr, "energy bound: %.6g <= %.6g %s\n", chk.lhs, chk.rhs, chk.holds ? "holds" : "VIOLATED");
    if (!chk.holds) return kViolation;
  }
  return kOk;
}

int cmd_rates(const Common& common) {
  const ExperimentConfig cfg = resolve(common);
  const RateStudy st = run_rate_study(cfg);
  write_text(common.out, format_csv(st.rows));
  std::fprintf(stderr, "problem=%s p=%g cells=%zu nonconverged=%d\n", to_string(cfg.problem).c_str(), cfg.p,
               st.rows.size(), st.nonconverged);
  std::fprintf(stderr, "eta fit: slope=%.4f target=%.4f points=%d (eta <= %.4f)\n", st.eta_fit.slope, st.eta_target,
               st.eta_fit.points, st.eta0);
  std::fprintf(stderr, "eps fit: R2=%.4f slope=%.4g points=%d index=%g\n", st.eps_fit.r2, st.eps_fit.slope,
               st.eps_fit.points, st.eps_index);
  std::fprintf(stderr, "l1 beats l2 in %d/%d cells\n", st.l1_wins, st.l2_cells);
  std::fprintf(stderr, "energy violations=%d rate-bound violations=%d unchecked=%d\n", st.energy_violations,
               st.rate_violations, st.unchecked_cells);
  return st.inequalities_hold() ? kOk : kViolation;
}

int cmd_interp(const Common& common) {
  const ExperimentConfig cfg = resolve(common);
  const InterpStudy st = run_interp_study(cfg, cfg.seeds.front());
  std::ostringstream os;
  os << "manifold=" << to_string(cfg.interp_manifold) << " weight=" << cfg.interp_weight
     << " samples=" << st.samples << " checks=" << st.checks << " violations=" << st.violations
     << " max_ratio=" << format_double(st.max_ratio) << " delta0=" << format_double(st.delta0) << '\n';
  for (const auto& [seed, delta] : st.offending) os << "violation seed=" << seed << " delta=" << format_double(delta) << '\n';
  write_text(common.out, os.str());
  return st.violations == 0 ? kOk : kViolation;
}

int cmd_vsc(const Common& common) {
  const ExperimentConfig cfg = resolve(common);
  const DiagonalOperator op = make_operator(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  const SourceElement src = make_source(op, cfg.p, mix_seed(seed, 0), source_options(cfg));
  const double pv = vsc_index(cfg);
  const VscReport fit = vsc_check(op, src.udag, IndexFunction::log(pv), cfg.beta, cfg.vsc_samples, mix_seed(seed, 7));
  const VscReport fresh =
      vsc_check(op, src.udag, IndexFunction::log(pv, fit.required_scale), cfg.beta, cfg.vsc_samples, mix_seed(seed, 8));
  std::ostringstream os;
  os << "beta=" << format_double(cfg.beta) << " fitted_scale=" << format_double(fit.required_scale)
     << " fresh_samples=" << fresh.samples << " violations=" << fresh.violations
     << " margin=" << format_double(fresh.margin) << '\n';
  write_text(common.out, os.str());
  return fresh.violations == 0 ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L1-fidelity Tikhonov regularization for exponentially ill-posed problems"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "key = value configuration file");
    sub->add_option("--out", common.out, "output path (default stdout)");
    sub->add_option("--seed", common.seed, "seed; replaces the configured seed list");
    sub->add_option("--problem", common.problem, "heat or gradiometry")->check(CLI::IsMember({"heat", "gradiometry"}));
  };
  std::string coeff_path;
  auto* apply_cmd = app.add_subcommand("apply", "apply the forward operator to a coefficient file");
  apply_cmd->add_option("coefficients", coeff_path, "whitespace-separated basis coefficients")->required();
  auto* noise_cmd = app.add_subcommand("noise", "emit an impulsive noise instance");
  auto* solve_cmd = app.add_subcommand("solve", "solve one (eps, eta) cell");
  auto* rates_cmd = app.add_subcommand("rates", "run the rate study and write CSV");
  auto* interp_cmd = app.add_subcommand("interp-check", "certify the interpolation inequality on random samples");
  auto* vsc_cmd = app.add_subcommand("vsc-check", "fit and re-test the variational source condition");
  for (auto* s : {apply_cmd, noise_cmd, solve_cmd, rates_cmd, interp_cmd, vsc_cmd}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*apply_cmd) return cmd_apply(common, coeff_path);
    if (*noise_cmd) return cmd_noise(common);
    if (*solve_cmd) return cmd_solve(common);
    if (*rates_cmd) return cmd_rates(common);
    if (*interp_cmd) return cmd_interp(common);
    if (*vsc_cmd) return cmd_vsc(common);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInput;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kInput;
  } catch (const DiagnosticError& e) {
    std::fprintf(stderr, "diagnostic: %s\n", e.what());
    return kViolation;
  }
  return kInput;
}
