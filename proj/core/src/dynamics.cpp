#include "coevo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "rk4.hpp"

namespace coevo {

NodeRates constant_rates(std::vector<double> rates) {
  return [r = std::move(rates)](double, std::size_t i) { return r[i]; };
}

NodeRates rates_from(const CellRates& r) {
  return [r](double t, std::size_t i) { return r(t, i); };
}

std::pair<std::size_t, double> step_plan(double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("final time must be finite and nonnegative");
  if (T == 0.0) return {0, dt};
  const auto K = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  return {std::max<std::size_t>(K, 1), T / static_cast<double>(std::max<std::size_t>(K, 1))};
}

double singular_weight(double Ws0, double epsilon, double t) { return std::exp(-epsilon * t) * Ws0; }

namespace {

// sin/cos tables of 2 pi k phi_i, laid out [i * (K+1) + k].
struct HarmonicTable {
  int K = 0;
  std::vector<double> s, c;
  void fill(const double* phi, std::size_t count, int kmax) {
    K = kmax;
    const auto w = static_cast<std::size_t>(K) + 1;
    s.resize(count * w);
    c.resize(count * w);
    for (std::size_t i = 0; i < count; ++i) harmonics(phi[i], K, {&s[i * w], w}, {&c[i * w], w});
  }
  std::span<const double> sin_of(std::size_t i) const {
    const auto w = static_cast<std::size_t>(K) + 1;
    return {&s[i * w], w};
  }
  std::span<const double> cos_of(std::size_t i) const {
    const auto w = static_cast<std::size_t>(K) + 1;
    return {&c[i * w], w};
  }
};

// f(phi_j - phi_i) from harmonic tables.
inline double pair_value(const FourierFunction& f, const HarmonicTable& H, std::size_t i, std::size_t j) {
  double v = f.c0();
  const auto si = H.sin_of(i), ci = H.cos_of(i), sj = H.sin_of(j), cj = H.cos_of(j);
  for (const auto& t : f.terms()) {
    const auto k = static_cast<std::size_t>(t.k);
    v += t.a * (sj[k] * ci[k] - cj[k] * si[k]) + t.b * (cj[k] * ci[k] + sj[k] * si[k]);
  }
  return v;
}

WeightStats stats_of(const double* w, std::size_t n) {
  if (n == 0) return {};
  WeightStats s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    s.min = std::min(s.min, w[i]);
    s.max = std::max(s.max, w[i]);
  }
  s.mean = detail::pairwise_sum(w, n) / static_cast<double>(n);
  return s;
}

void wrap_prefix(std::vector<double>& y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = wrap_phase(y[i]);
}

}  // namespace

Trajectory integrate_coupled(const CoupledState& init, const ModelSpec& model, const NodeRates& omega, double T, double dt,
                             const IntegrateOptions& opt) {
  model.validate();
  const std::size_t N = init.size();
  if (init.weights.size() != N * N) throw std::invalid_argument("integrate_coupled: weights must be N x N");
  if (!(dt > 0.0) || T < dt * (1.0 - 1e-9)) throw std::invalid_argument("integrate_coupled: need dt > 0 and T >= dt");
  const auto [K, h] = step_plan(T, dt);
  const double eps = model.epsilon;
  const int kmax = std::max(model.g.max_harmonic(), model.h.max_harmonic());
  const bool h_const = model.h.is_constant();

  std::vector<double> y(N + N * N);
  for (std::size_t i = 0; i < N; ++i) y[i] = wrap_phase(init.phases[i]);
  std::copy(init.weights.begin(), init.weights.end(), y.begin() + static_cast<std::ptrdiff_t>(N));

  HarmonicTable H;
  std::vector<double> row(N);
  auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& ds) {
    H.fill(s.data(), N, kmax);
    const double* W = s.data() + N;
    double* dW = ds.data() + N;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        const double w = W[i * N + j];
        row[j] = w * pair_value(model.g, H, i, j);
        const double hij = h_const ? model.h.c0() : pair_value(model.h, H, i, j);
        dW[i * N + j] = -eps * (w + hij);
      }
      ds[i] = omega(t, i) + detail::pairwise_sum(row.data(), N) / static_cast<double>(N);
    }
  };

  Trajectory tr;
  tr.times = uniform_times(K, h);
  tr.phases.reserve(K + 1);
  auto record = [&](std::size_t k) {
    tr.phases.emplace_back(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(N));
    tr.weight_stats.push_back(stats_of(y.data() + N, N * N));
    if (opt.record_weights || k == K) tr.weights.emplace_back(y.begin() + static_cast<std::ptrdiff_t>(N), y.end());
  };
  record(0);
  detail::Rk4 rk(y.size());
  for (std::size_t k = 0; k < K; ++k) {
    rk.step(rhs, tr.times[k], h, y);
    detail::require_finite(y, k + 1, "integrate_coupled");
    wrap_prefix(y, N);
    record(k + 1);
  }
  return tr;
}

void LatticeState::validate() const {
  const std::size_t m = cells();
  if (n == 0 || phases.size() != m * n) throw std::invalid_argument("lattice state: need m*n phases");
  if (masses.size() != m || W_s.size() != m || targets.size() != m) throw std::invalid_argument("lattice state: per-cell arrays must have m entries");
  if (W_a.size() != m * n * m) throw std::invalid_argument("lattice state: W_a must have (m n) x m entries");
  for (double a : masses)
    if (a < 0.0) throw std::invalid_argument("lattice state: masses must be nonnegative");
  for (const auto& tg : targets)
    for (const auto& t : tg)
      if (t.cell >= m) throw std::invalid_argument("lattice state: singular target outside the partition");
}

LatticeState make_lattice_state(const AtomicFamily& nu, const LatticeWeights& w) {
  const std::size_t m = nu.size();
  if (w.W_s.size() != m) throw std::invalid_argument("make_lattice_state: weights and family have different cell counts");
  const std::size_t n = nu.max_atoms();
  LatticeState s;
  s.partition = nu.partition;
  s.n = n;
  s.phases.resize(m * n);
  s.masses.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (nu.cells[i].size() != n) throw std::invalid_argument("make_lattice_state: every cell needs the same atom count");
    s.masses[i] = nu.cell_mass(i);
    for (std::size_t j = 0; j < n; ++j) s.phases[i * n + j] = wrap_phase(nu.cells[i][j].position);
  }
  s.W_a.resize(m * n * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < m; ++p) s.W_a[(i * n + j) * m + p] = w.W_a[i][p];
  s.W_s = w.W_s;
  s.targets = w.targets;
  s.validate();
  return s;
}

namespace {

// Per-cell coupling sums at one stage: G[a * m + p] = (a_p/n) sum_l g(phi_pl - phi_a),
// and the same with h.
struct LatticeCoupling {
  std::size_t m, n;
  int kmax;
  std::vector<Moments> moments;
  std::vector<double> G, Hh, sa, ca;

  LatticeCoupling(std::size_t m_, std::size_t n_, int kmax_)
      : m(m_), n(n_), kmax(kmax_), moments(m_, Moments(kmax_)), G(m_ * n_ * m_), Hh(m_ * n_ * m_),
        sa(static_cast<std::size_t>(kmax_) + 1), ca(static_cast<std::size_t>(kmax_) + 1) {}

  void compute(const double* phi, const std::vector<double>& masses, const ModelSpec& model) {
    for (std::size_t p = 0; p < m; ++p) {
      moments[p].clear();
      const double w = masses[p] / static_cast<double>(n);
      for (std::size_t l = 0; l < n; ++l) moments[p].add(phi[p * n + l], w);
    }
    for (std::size_t a = 0; a < m * n; ++a) {
      harmonics(phi[a], kmax, sa, ca);
      for (std::size_t p = 0; p < m; ++p) {
        G[a * m + p] = model.g.convolve(moments[p], sa, ca);
        Hh[a * m + p] = model.h.convolve(moments[p], sa, ca);
      }
    }
  }

  double singular_drive(std::size_t a, const std::vector<SingularTarget>& tg) const {
    double v = 0.0;
    for (const auto& t : tg) v += t.fraction * G[a * m + t.cell];
    return v;
  }
};

std::vector<double> entry_horizons(const LatticeState& s, const ModelSpec& model) {
  const std::size_t m = s.cells();
  const double hp = model.h.positive_part_sup();
  std::vector<double> hor(s.W_a.size(), kInf);
  if (hp == 0.0) return hor;
  for (std::size_t a = 0; a < s.atoms(); ++a)
    for (std::size_t p = 0; p < m; ++p) {
      const double w0 = s.W_a[a * m + p];
      const double ap = s.masses[p];
      hor[a * m + p] = ap > 0.0 ? (w0 > 0.0 ? std::log1p(w0 / (ap * hp)) / model.epsilon : 0.0) : kInf;
    }
  return hor;
}

}  // namespace

Trajectory integrate_lattice(const LatticeState& init, const ModelSpec& model, const NodeRates& omega_cells, double T,
                             double dt, const IntegrateOptions& opt) {
  model.validate();
  init.validate();
  if (!(dt > 0.0) || T < dt * (1.0 - 1e-9)) throw std::invalid_argument("integrate_lattice: need dt > 0 and T >= dt");
  const auto [K, h] = step_plan(T, dt);
  const std::size_t m = init.cells(), n = init.n, A = m * n;
  const double eps = model.epsilon;
  LatticeCoupling C(m, n, std::max(model.g.max_harmonic(), model.h.max_harmonic()));

  std::vector<double> mu(m);
  for (std::size_t p = 0; p < m; ++p) mu[p] = init.partition.measure(p);

  std::vector<double> y(A + A * m);
  for (std::size_t a = 0; a < A; ++a) y[a] = wrap_phase(init.phases[a]);
  std::copy(init.W_a.begin(), init.W_a.end(), y.begin() + static_cast<std::ptrdiff_t>(A));

  auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& ds) {
    C.compute(s.data(), init.masses, model);
    const double* W = s.data() + A;
    double* dW = ds.data() + A;
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t i = a / n;
      double v = 0.0;
      for (std::size_t p = 0; p < m; ++p) {
        v += W[a * m + p] * mu[p] * C.G[a * m + p];
        dW[a * m + p] = -eps * W[a * m + p] - eps * C.Hh[a * m + p];
      }
      ds[a] = omega_cells(t, i) + v + singular_weight(init.W_s[i], eps, t) * C.singular_drive(a, init.targets[i]);
    }
  };

  const auto horizon = entry_horizons(init, model);
  Trajectory tr;
  tr.times = uniform_times(K, h);
  tr.atoms_per_cell = n;
  tr.masses = init.masses;
  auto record = [&](std::size_t k) {
    tr.phases.emplace_back(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(A));
    tr.weight_stats.push_back(stats_of(y.data() + A, A * m));
    std::vector<double> ws(m);
    for (std::size_t i = 0; i < m; ++i) ws[i] = singular_weight(init.W_s[i], eps, tr.times[k]);
    tr.singular.push_back(std::move(ws));
    if (opt.record_weights || k == K) tr.weights.emplace_back(y.begin() + static_cast<std::ptrdiff_t>(A), y.end());
    if (!tr.positivity_violation_step) {
      for (std::size_t e = 0; e < A * m; ++e)
        if (tr.times[k] <= horizon[e] && y[A + e] < -opt.positivity_tol * (1.0 + std::abs(init.W_a[e]))) {
          tr.positivity_violation_step = k;
          break;
        }
    }
  };
  record(0);
  detail::Rk4 rk(y.size());
  for (std::size_t k = 0; k < K; ++k) {
    rk.step(rhs, tr.times[k], h, y);
    detail::require_finite(y, k + 1, "integrate_lattice");
    wrap_prefix(y, A);
    record(k + 1);
  }
  return tr;
}

Trajectory integrate_lattice_decoupled(const LatticeState& init, const ModelSpec& model, const NodeRates& omega_cells,
                                       double T, double dt) {
  model.validate();
  init.validate();
  if (!(dt > 0.0) || T < dt * (1.0 - 1e-9)) throw std::invalid_argument("integrate_lattice_decoupled: need dt > 0 and T >= dt");
  const auto [K, h] = step_plan(T, dt);
  const std::size_t m = init.cells(), n = init.n, A = m * n;
  const double eps = model.epsilon;
  LatticeCoupling C(m, n, std::max(model.g.max_harmonic(), model.h.max_harmonic()));
  std::vector<double> mu(m);
  for (std::size_t p = 0; p < m; ++p) mu[p] = init.partition.measure(p);

  std::vector<double> y(A + A * m, 0.0);
  for (std::size_t a = 0; a < A; ++a) y[a] = wrap_phase(init.phases[a]);

  auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& ds) {
    C.compute(s.data(), init.masses, model);
    const double* Q = s.data() + A;
    double* dQ = ds.data() + A;
    const double decay = std::exp(-eps * t), grow = std::exp(eps * t);
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t i = a / n;
      double initial = 0.0, memory = 0.0;
      for (std::size_t p = 0; p < m; ++p) {
        const double Gp = mu[p] * C.G[a * m + p];
        initial += init.W_a[a * m + p] * Gp;
        memory += Gp * Q[a * m + p];
        dQ[a * m + p] = grow * C.Hh[a * m + p];
      }
      initial += init.W_s[i] * C.singular_drive(a, init.targets[i]);
      ds[a] = omega_cells(t, i) + decay * initial - eps * decay * memory;
    }
  };

  Trajectory tr;
  tr.times = uniform_times(K, h);
  tr.atoms_per_cell = n;
  tr.masses = init.masses;
  tr.phases.emplace_back(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(A));
  detail::Rk4 rk(y.size());
  for (std::size_t k = 0; k < K; ++k) {
    rk.step(rhs, tr.times[k], h, y);
    detail::require_finite(y, k + 1, "integrate_lattice_decoupled");
    wrap_prefix(y, A);
    tr.phases.emplace_back(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(A));
  }
  return tr;
}

MeasurePath empirical_path(const Trajectory& traj, const Partition& partition) {
  const std::size_t m = partition.size(), n = traj.atoms_per_cell;
  if (traj.masses.size() != m) throw std::invalid_argument("empirical_path: trajectory does not carry lattice masses for this partition");
  MeasurePath p;
  p.partition = partition;
  p.times = traj.times;
  p.weights.assign(m, {});
  for (std::size_t i = 0; i < m; ++i) p.weights[i].assign(n, traj.masses[i] / static_cast<double>(n));
  p.positions.resize(traj.nodes());
  for (std::size_t k = 0; k < traj.nodes(); ++k) {
    p.positions[k].resize(m);
    for (std::size_t i = 0; i < m; ++i)
      p.positions[k][i].assign(traj.phases[k].begin() + static_cast<std::ptrdiff_t>(i * n),
                               traj.phases[k].begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  }
  return p;
}

DigraphMeasure lattice_weights_dgm(const Trajectory& traj, const LatticeState& init, std::size_t node, std::size_t atom) {
  const std::size_t m = init.cells(), n = init.n;
  if (!init.partition.is_uniform()) throw std::invalid_argument("lattice_weights_dgm: needs a uniform partition");
  if (atom >= n) throw std::invalid_argument("lattice_weights_dgm: atom index out of range");
  const std::vector<double>* W = nullptr;
  if (traj.weights.size() == traj.nodes()) W = &traj.weights[node];
  else if (node + 1 == traj.nodes() && !traj.weights.empty()) W = &traj.weights.back();
  else throw std::invalid_argument("lattice_weights_dgm: weights were not recorded at this node");
  std::vector<HybridMeasure> fibers;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = i * n + atom;
    std::vector<double> dens((*W).begin() + static_cast<std::ptrdiff_t>(a * m), (*W).begin() + static_cast<std::ptrdiff_t>((a + 1) * m));
    std::vector<Atom> atoms;
    const double ws = traj.singular.empty() ? init.W_s[i] : traj.singular[node][i];
    for (const auto& t : init.targets[i]) atoms.push_back({t.position, t.fraction * ws});
    fibers.emplace_back(init.partition.space(), std::move(atoms), std::move(dens));
  }
  return DigraphMeasure(init.partition, std::move(fibers));
}

DigraphMeasure dgm_from_matrix(const std::vector<double>& W, std::size_t N, Space space) {
  if (W.size() != N * N) throw std::invalid_argument("dgm_from_matrix: W must be N x N");
  std::vector<HybridMeasure> fibers;
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<Atom> atoms;
    for (std::size_t j = 0; j < N; ++j)
      if (W[i * N + j] != 0.0)
        atoms.push_back({(2.0 * static_cast<double>(j) + 1.0) / (2.0 * static_cast<double>(N)), W[i * N + j] / static_cast<double>(N)});
    fibers.emplace_back(space, std::move(atoms));
  }
  return DigraphMeasure(uniform_partition(space, N), std::move(fibers));
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const std::size_t N = traj.phases.empty() ? 0 : traj.phases[0].size();
  os << "time";
  for (std::size_t i = 0; i < N; ++i) os << ",phi_" << i;
  if (!traj.weight_stats.empty()) os << ",w_min,w_max,w_mean";
  os << '\n';
  char buf[64];
  for (std::size_t k = 0; k < traj.nodes(); ++k) {
    std::snprintf(buf, sizeof buf, "%.12g", traj.times[k]);
    os << buf;
    for (double v : traj.phases[k]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    if (k < traj.weight_stats.size()) {
      const auto& s = traj.weight_stats[k];
      std::snprintf(buf, sizeof buf, ",%.17g", s.min);
      os << buf;
      std::snprintf(buf, sizeof buf, ",%.17g", s.max);
      os << buf;
      std::snprintf(buf, sizeof buf, ",%.17g", s.mean);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace coevo
