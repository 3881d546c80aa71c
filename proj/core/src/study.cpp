#include "coevo/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace coevo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> random_phases(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(count);
  for (auto& v : p) v = u(rng);
  return p;
}

// Fibers of `d` averaged over [lo, hi) with overlap weights.
HybridMeasure cell_mix(const DigraphMeasure& d, double lo, double hi, Space fiber_space) {
  const auto& P = d.partition();
  HybridMeasure acc(fiber_space);
  const double len = hi - lo;
  for (std::size_t j = 0; j < P.size(); ++j) {
    const double ov = std::min(hi, P.upper(j)) - std::max(lo, P.lower(j));
    if (ov > 0.0) acc = acc + d.fiber_at(j).scaled(ov / len);
  }
  return acc;
}

}  // namespace

std::size_t ConvergenceReport::flags() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.non_monotone; }));
}

StudySetup make_setup(const ExperimentConfig& c) {
  StudySetup s;
  s.config = normalized(c);
  s.preset = make_preset(s.config.example);
  s.model = model_of(s.config);
  s.nu0 = s.config.initial_mode == "random" ? nu0_fibers({Nu0Spec::Kind::uniform, 0.0, 0.0}) : nu0_fibers(s.config.nu0);
  return s;
}

Partition vertex_partition(const StudySetup& s, std::size_t m) { return uniform_partition(s.preset.space, m); }

CoupledState finite_state(const StudySetup& s, std::size_t N) {
  CoupledState st;
  st.weights = preset_weights(s.config.example, N);
  if (s.config.initial_mode == "random") {
    st.phases = random_phases(s.config.seed, N);
  } else {
    const auto nu = discretize_nu(s.nu0, vertex_partition(s, N), 1);
    st.phases.resize(N);
    for (std::size_t i = 0; i < N; ++i) st.phases[i] = nu.cells[i][0].position;
  }
  return st;
}

NodeRates finite_rates(const StudySetup& s, std::size_t N) {
  return rates_from(cell_rates(s.model.omega, vertex_partition(s, N)));
}

Trajectory run_finite(const StudySetup& s, std::size_t N) {
  return integrate_coupled(finite_state(s, N), s.model, finite_rates(s, N), s.config.T, s.config.dt);
}

AtomicFamily initial_atoms(const StudySetup& s, std::size_t m, std::size_t n) {
  const auto P = vertex_partition(s, m);
  if (s.config.initial_mode != "random") return discretize_nu(s.nu0, P, n);
  const auto p = random_phases(s.config.seed, m * n);
  AtomicFamily f;
  f.partition = P;
  f.cells.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < n; ++a) f.cells[i].push_back({p[i * n + a], 1.0 / static_cast<double>(n)});
  return f;
}

DigraphMeasure eta0_dgm(const StudySetup& s, std::size_t m) { return eta0_on(s.preset, vertex_partition(s, m)); }

LatticeState lattice_state(const StudySetup& s, std::size_t m, std::size_t n) {
  const auto P = vertex_partition(s, m);
  return make_lattice_state(initial_atoms(s, m, n), weights_from_dgm(eta0_dgm(s, m), P));
}

Trajectory run_lattice(const StudySetup& s, std::size_t m, std::size_t n) {
  return integrate_lattice(lattice_state(s, m, n), s.model, rates_from(cell_rates(s.model.omega, vertex_partition(s, m))),
                           s.config.T, s.config.dt);
}

FixedPointResult reference_solution(const StudySetup& s, std::size_t m, std::size_t n) {
  const auto& c = s.config;
  auto r = solve_vlasov_fixed_point(initial_atoms(s, m, n), eta0_dgm(s, m), s.model,
                                    rates_from(cell_rates(s.model.omega, vertex_partition(s, m))), c.T, c.dt, c.tol,
                                    c.max_iter, {c.M_eval, 1});
  if (!r.converged) {
    std::filesystem::create_directories(c.output_dir);
    const auto log = (std::filesystem::path(c.output_dir) / "reference_residuals.csv").string();
    write_residual_log(r, log);
    char buf[160];
    std::snprintf(buf, sizeof buf, "reference fixed point stopped after %zu iterations at residual %.3e (tol %.3e)",
                  r.iterations, r.residual, c.tol);
    throw ReferenceFailure(buf, log);
  }
  return r;
}

double cellwise_bl(const DigraphMeasure& a, const DigraphMeasure& b, std::size_t M_eval) {
  const bool a_coarse = a.size() <= b.size();
  const auto& coarse = a_coarse ? a : b;
  const auto& fine = a_coarse ? b : a;
  const auto& P = coarse.partition();
  double sup = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto& c = coarse.fiber_at(i);
    const auto f = cell_mix(fine, P.lower(i), P.upper(i), c.space());
    sup = std::max(sup, bl_distance(c, f, M_eval));
  }
  return sup;
}

HybridMeasure vertex_average(const DigraphMeasure& nu) {
  const auto& P = nu.partition();
  if (nu.size() == 0) throw std::invalid_argument("vertex_average: empty digraph measure");
  HybridMeasure acc(nu.fiber_at(0).space());
  for (std::size_t i = 0; i < P.size(); ++i) acc = acc + nu.fiber_at(i).scaled(P.measure(i));
  return acc;
}

DigraphMeasure finite_dgm(const std::vector<double>& phases, Space space) {
  std::vector<HybridMeasure> f;
  f.reserve(phases.size());
  for (double p : phases) f.push_back(HybridMeasure::dirac(Space::circle, p));
  return DigraphMeasure(uniform_partition(space, phases.size()), std::move(f));
}

double sampled_sup_bl(const FiberFunction& a, const FiberFunction& b, Space space, std::size_t samples,
                      std::size_t M_eval) {
  if (samples == 0) throw std::invalid_argument("sampled_sup_bl: need at least one sample");
  const std::size_t last = space == Space::circle ? samples - 1 : samples;
  double sup = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(samples);
    sup = std::max(sup, bl_distance(a(x), b(x), M_eval));
  }
  return sup;
}

namespace {

struct Level {
  std::string label;
  std::size_t m, n;
  bool finite;
};

ConvergenceReport study(const ExperimentConfig& cfg, std::size_t min_levels, bool artifacts) {
  const auto s = make_setup(cfg);
  const auto& c = s.config;
  std::vector<Level> levels;
  for (auto N : c.N) levels.push_back({"N=" + std::to_string(N), N, 1, true});
  for (std::size_t k = 0; k < c.m.size(); ++k)
    levels.push_back({"m=" + std::to_string(c.m[k]) + ",n=" + std::to_string(c.n[k]), c.m[k], c.n[k], false});
  if (levels.size() < min_levels)
    throw std::invalid_argument("a convergence study needs at least " + std::to_string(min_levels) + " levels, got " +
                                std::to_string(levels.size()));
  const std::filesystem::path dir(c.output_dir);
  if (artifacts) std::filesystem::create_directories(dir);

  ConvergenceReport rep;
  rep.example = c.example;
  auto t0 = Clock::now();
  const auto ref = reference_solution(s, c.ref_m, c.ref_n);
  rep.reference_seconds = seconds_since(t0);
  rep.reference_iterations = ref.iterations;
  rep.reference_residual = ref.residual;
  const std::size_t K = ref.path.nodes() - 1;
  if (artifacts) {
    write_path_csv(ref.path, (dir / "reference_path.csv").string(), c.output_every);
    write_residual_log(ref, (dir / "reference_residuals.csv").string());
  }

  std::vector<double> prev(c.times.size(), kInf);
  for (const auto& lv : levels) {
    t0 = Clock::now();
    const auto traj = lv.finite ? run_finite(s, lv.m) : run_lattice(s, lv.m, lv.n);
    const double wall = seconds_since(t0);
    if (traj.nodes() != ref.path.nodes()) throw std::logic_error("level and reference time grids differ");
    const auto emp = lv.finite ? MeasurePath{} : empirical_path(traj, vertex_partition(s, lv.m));
    for (std::size_t q = 0; q < c.times.size(); ++q) {
      const auto k = static_cast<std::size_t>(std::llround(c.times[q] * static_cast<double>(K)));
      const auto a = lv.finite ? finite_dgm(traj.phases[k], s.preset.space) : emp.at(k);
      const auto b = ref.path.at(k);
      ReportRow row;
      row.level = lv.label;
      row.m = lv.m;
      row.n = lv.n;
      row.t = ref.path.times[k];
      row.distance = cellwise_bl(a, b, c.M_eval);
      row.aggregate = bl_distance(vertex_average(a), vertex_average(b), c.M_eval);
      row.wall_seconds = wall;
      row.non_monotone = !(row.distance < prev[q]);
      prev[q] = row.distance;
      rep.rows.push_back(row);
    }
    if (artifacts) {
      std::string name = lv.label;
      std::replace(name.begin(), name.end(), '=', '_');
      std::replace(name.begin(), name.end(), ',', '_');
      write_trajectory_csv(traj, (dir / ("trajectory_" + name + ".csv")).string());
    }
  }

  if (artifacts) {
    emit_csv(rep, (dir / "report.csv").string());
    emit_timing_csv(rep, (dir / "timing.csv").string());
    std::ofstream os(dir / "eta0_errors.csv");
    os << "N,sup_bl\n";
    for (auto N : c.N) {
      const auto eta = dgm_from_matrix(preset_weights(c.example, N), N, s.preset.space);
      const double e = sampled_sup_bl([&](double x) { return eta.fiber(x); }, s.preset.eta0, s.preset.space, 8 * N, c.M_eval);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", N, e);
      os << buf;
    }
  }
  return rep;
}

}  // namespace

ConvergenceReport convergence_study(const ExperimentConfig& c) { return study(c, 3, false); }

ConvergenceReport run_example(const ExperimentConfig& c) { return study(c, 1, true); }

void emit_csv(const ConvergenceReport& r, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  os << "example,level,m,n,t,distance,aggregate,non_monotone\n";
  char buf[256];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%s,\"%s\",%zu,%zu,%.12g,%.17g,%.17g,%d\n", to_string(r.example).c_str(),
                  row.level.c_str(), row.m, row.n, row.t, row.distance, row.aggregate, row.non_monotone ? 1 : 0);
    os << buf;
  }
}

void emit_timing_csv(const ConvergenceReport& r, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  os << "level,wall_seconds\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "reference,%.6f\n", r.reference_seconds);
  os << buf;
  std::string last;
  for (const auto& row : r.rows) {
    if (row.level == last) continue;
    last = row.level;
    std::snprintf(buf, sizeof buf, "\"%s\",%.6f\n", row.level.c_str(), row.wall_seconds);
    os << buf;
  }
}

}  // namespace coevo
