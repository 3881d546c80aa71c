// coevo: finite networks, mean-field fixed points, Vlasov densities and convergence studies.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "coevo/config.hpp"
#include "coevo/meanfield.hpp"
#include "coevo/study.hpp"

namespace fs = std::filesystem;
using namespace coevo;

namespace {

constexpr int kOk = 0, kFlagged = 1, kUsage = 2;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<double> epsilon, T, T_fraction, dt, tol;
  std::optional<std::size_t> max_iter, M_eval, ref_m, ref_n, M_phi;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> N;
};

void add_overrides(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("-o,--out", o.out, "output directory (default: $COEVO_OUT_DIR, then output.dir)");
  app.add_option("--epsilon", o.epsilon, "weight adaptation rate");
  app.add_option("--T", o.T, "final time");
  app.add_option("--T-fraction", o.T_fraction, "final time as a fraction of log(5/4)/epsilon");
  app.add_option("--dt", o.dt, "time step");
  app.add_option("--tol", o.tol, "fixed-point tolerance");
  app.add_option("--max-iter", o.max_iter, "fixed-point iteration cap");
  app.add_option("--M-eval", o.M_eval, "BL metric grid");
  app.add_option("--ref-m", o.ref_m, "reference cells");
  app.add_option("--ref-n", o.ref_n, "reference atoms per cell");
  app.add_option("--M-phi", o.M_phi, "phase cells of the Vlasov PDE");
  app.add_option("--seed", o.seed, "seed for random initial phases");
  app.add_option("--N", o.N, "finite network sizes");
}

ExperimentConfig resolve(const Overrides& o, std::optional<Example> example) {
  ExperimentConfig c = o.config.empty() ? default_config(example.value_or(Example::ring)) : parse_config(o.config);
  if (example && *example != c.example) {
    const auto d = default_config(*example);
    c.example = *example;
    c.N = d.N;
  }
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.T_fraction) {
    c.T = 0.0;
    c.T_fraction = *o.T_fraction;
  } else if (o.epsilon && !o.T) {
    c.T = 0.0;
  }
  if (o.T) c.T = *o.T;
  if (o.dt) c.dt = *o.dt;
  if (o.tol) c.tol = *o.tol;
  if (o.max_iter) c.max_iter = *o.max_iter;
  if (o.M_eval) c.M_eval = *o.M_eval;
  if (o.ref_m) c.ref_m = *o.ref_m;
  if (o.ref_n) c.ref_n = *o.ref_n;
  if (o.M_phi) c.M_phi = *o.M_phi;
  if (o.seed) c.seed = *o.seed;
  if (!o.N.empty()) c.N = o.N;
  if (!o.out.empty())
    c.output_dir = o.out;
  else if (const char* env = std::getenv("COEVO_OUT_DIR"); env && *env)
    c.output_dir = env;
  try {
    return normalized(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int cmd_simulate(const ExperimentConfig& c) {
  const auto s = make_setup(c);
  fs::create_directories(c.output_dir);
  int status = kOk;
  for (auto N : c.N) {
    const auto traj = run_finite(s, N);
    const auto file = fs::path(c.output_dir) / ("trajectory_N_" + std::to_string(N) + ".csv");
    write_trajectory_csv(traj, file.string());
    std::printf("N=%zu  steps=%zu  final w_min=%.6g  -> %s\n", N, traj.nodes() - 1, traj.weight_stats.back().min,
                file.c_str());
    if (traj.positivity_violation_step) {
      std::printf("  flag: negative weight at step %zu\n", *traj.positivity_violation_step);
      status = kFlagged;
    }
  }
  return status;
}

int cmd_mfl(const ExperimentConfig& c) {
  const auto s = make_setup(c);
  fs::create_directories(c.output_dir);
  const auto r = reference_solution(s, c.ref_m, c.ref_n);
  write_path_csv(r.path, (fs::path(c.output_dir) / "mfl_path.csv").string(), c.output_every);
  write_residual_log(r, (fs::path(c.output_dir) / "mfl_residuals.csv").string());
  double defect = 0.0;
  for (double d : r.mass_defects) defect = std::max(defect, d);
  std::printf("fixed point: %zu iterations, residual %.3e, max mass defect %.3e\n", r.iterations, r.residual, defect);
  if (defect > 1e-10) {
    std::printf("flag: mass defect above 1e-10\n");
    return kFlagged;
  }
  return kOk;
}

int cmd_pde(const ExperimentConfig& c) {
  const auto s = make_setup(c);
  fs::create_directories(c.output_dir);
  const auto P = vertex_partition(s, c.ref_m);
  std::vector<std::vector<double>> rho0(P.size());
  double gamma = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto w = project_to_grid(cell_average(s.nu0, P, i), c.M_phi);
    for (double v : w) rho0[i].push_back(v * static_cast<double>(c.M_phi));
    gamma = std::max(gamma, cell_average(s.nu0, P, i).total_mass());
  }
  const auto eta0 = eta0_dgm(s, c.ref_m);
  const double vmax = pde_speed_bound(s.model, eta0.max_fiber_mass(), gamma, c.T);
  const double dt = std::min(c.dt, 0.9 / (static_cast<double>(c.M_phi) * std::max(vmax, 1e-300)));
  const auto field = solve_vlasov_pde(P, rho0, eta0, s.model, rates_from(cell_rates(s.model.omega, P)), c.T, dt,
                                      {c.output_every});
  write_density_csv(field, (fs::path(c.output_dir) / "density.csv").string());
  double drift = 0.0, low = 0.0;
  const auto last = field.times.size() - 1;
  for (std::size_t i = 0; i < P.size(); ++i) {
    drift = std::max(drift, std::abs(field.cell_mass(last, i) - field.cell_mass(0, i)));
    for (double v : field.rho[last][i]) low = std::min(low, v);
  }
  std::printf("pde: M_phi=%zu dt=%.3e  mass drift %.3e  min density %.3e\n", c.M_phi, dt, drift, low);
  return drift > 1e-10 || low < -1e-12 ? kFlagged : kOk;
}

int report(const ConvergenceReport& r) {
  std::printf("%-14s %10s %14s %14s\n", "level", "t", "d_BL", "aggregate");
  for (const auto& row : r.rows)
    std::printf("%-14s %10.6f %14.6e %14.6e%s\n", row.level.c_str(), row.t, row.distance, row.aggregate,
                row.non_monotone ? "  non-monotone" : "");
  std::printf("reference: %zu iterations, residual %.3e\n", r.reference_iterations, r.reference_residual);
  return r.flags() > 0 ? kFlagged : kOk;
}

int cmd_converge(const ExperimentConfig& c) {
  const auto r = convergence_study(c);
  fs::create_directories(c.output_dir);
  emit_csv(r, (fs::path(c.output_dir) / "report.csv").string());
  emit_timing_csv(r, (fs::path(c.output_dir) / "timing.csv").string());
  return report(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-evolutionary Kuramoto networks and their mean-field limit"};
  app.require_subcommand(1);
  Overrides o;
  auto* sim = app.add_subcommand("simulate", "integrate the finite-N network");
  auto* mfl = app.add_subcommand("mfl", "solve the fixed-point equation for the mean-field limit");
  auto* pde = app.add_subcommand("pde", "solve the Vlasov equation for phase densities");
  auto* conv = app.add_subcommand("converge", "convergence study against the fixed-point reference");
  auto* ex = app.add_subcommand("example", "run a preset network with all artifacts");
  std::string example_name;
  ex->add_option("name", example_name, "ring, tree or dense")->required()->check(CLI::IsMember({"ring", "tree", "dense"}));
  for (auto* sc : {sim, mfl, pde, conv, ex}) add_overrides(*sc, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    std::optional<Example> example;
    if (ex->parsed()) example = parse_example(example_name);
    const auto c = resolve(o, example);
    if (sim->parsed()) return cmd_simulate(c);
    if (mfl->parsed()) return cmd_mfl(c);
    if (pde->parsed()) return cmd_pde(c);
    if (conv->parsed()) return cmd_converge(c);
    const auto r = run_example(c);
    std::printf("artifacts in %s\n", c.output_dir.c_str());
    return report(r);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const ReferenceFailure& e) {
    std::fprintf(stderr, "%s; residual log: %s\n", e.what(), e.log().c_str());
    return kFlagged;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kFlagged;
  }
}
