#include "coevo/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace coevo {

double AtomicFamily::cell_mass(std::size_t i) const {
  double s = 0.0;
  for (const auto& a : cells[i]) s += a.weight;
  return s;
}

double AtomicFamily::total_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) s += cell_mass(i) * partition.measure(i);
  return s;
}

std::size_t AtomicFamily::max_atoms() const {
  std::size_t n = 0;
  for (const auto& c : cells) n = std::max(n, c.size());
  return n;
}

DigraphMeasure AtomicFamily::as_digraph() const {
  std::vector<HybridMeasure> f;
  f.reserve(cells.size());
  for (const auto& c : cells) f.emplace_back(Space::circle, c);
  return DigraphMeasure(partition, std::move(f));
}

void DiscretizationPlan::validate(const ModelSpec& model) const {
  if (m < 1 || n < 1) throw std::invalid_argument("discretization plan needs m, n >= 1");
  if (beta < 0.0) throw std::invalid_argument("discretization plan needs beta >= 0");
  if (model.h.positive_part_sup() > 0.0 && !(T < positivity_horizon(beta, 1.0, model.h, model.epsilon)))
    throw std::invalid_argument("discretization plan: T is not below the positivity horizon for beta");
}

std::vector<double> quantile_midpoints(const HybridMeasure& mu, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  const double total = mu.total_mass();
  if (!(total > 0.0)) return out;

  std::vector<Atom> atoms(mu.atoms().begin(), mu.atoms().end());
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
  const auto dens = mu.density();
  const std::size_t M = dens.size();

  // Breakpoints: density cell boundaries and atom positions.
  std::vector<double> bp{0.0, 1.0};
  for (std::size_t k = 1; k < M; ++k) bp.push_back(static_cast<double>(k) / static_cast<double>(M));
  for (const auto& a : atoms) bp.push_back(a.position);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  std::size_t next_atom = 0, j = 0;
  double F = 0.0;
  auto level = [&](std::size_t q) { return total * (2.0 * static_cast<double>(q) + 1.0) / (2.0 * static_cast<double>(n)); };
  for (std::size_t b = 0; b < bp.size() && j < n; ++b) {
    const double x = bp[b];
    double jump = 0.0;
    while (next_atom < atoms.size() && atoms[next_atom].position <= x) jump += atoms[next_atom++].weight;
    F += jump;
    while (j < n && F >= level(j)) out[j++] = x;
    if (b + 1 == bp.size() || M == 0) continue;
    const double y = bp[b + 1];
    const double d = dens[cell_index(0.5 * (x + y), M)];
    const double add = d * (y - x);
    while (j < n && F + add >= level(j)) {
      out[j] = d > 0.0 ? std::min(y, x + (level(j) - F) / d) : y;
      ++j;
    }
    F += add;
  }
  for (; j < n; ++j) out[j] = atoms.empty() ? 1.0 : atoms.back().position;  // rounding leftovers
  if (mu.space() == Space::circle)
    for (auto& p : out) p = wrap_phase(p);
  return out;
}

HybridMeasure cell_average(const FiberFunction& nu0, const Partition& partition, std::size_t cell, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("cell_average needs at least one sample");
  const double lo = partition.lower(cell), len = partition.measure(cell);
  HybridMeasure acc = nu0(lo + 0.5 * len / static_cast<double>(samples)).scaled(1.0 / static_cast<double>(samples));
  for (std::size_t s = 1; s < samples; ++s) {
    const double x = lo + (static_cast<double>(s) + 0.5) * len / static_cast<double>(samples);
    acc = acc + nu0(x).scaled(1.0 / static_cast<double>(samples));
  }
  return acc;
}

namespace {

std::vector<Atom> equal_atoms(const HybridMeasure& avg, std::size_t n) {
  const double mass = avg.total_mass();
  const auto pos = quantile_midpoints(avg, n);
  std::vector<Atom> atoms(n);
  for (std::size_t j = 0; j < n; ++j) atoms[j] = {pos[j], mass > 0.0 ? mass / static_cast<double>(n) : 0.0};
  return atoms;
}

}  // namespace

AtomicFamily discretize_nu(const FiberFunction& nu0, const Partition& partition, std::size_t n, std::size_t samples) {
  if (n == 0) throw std::invalid_argument("discretize_nu: n must be at least 1");
  AtomicFamily out{partition, {}};
  out.cells.reserve(partition.size());
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const auto avg = cell_average(nu0, partition, i, samples);
    if (avg.space() != Space::circle) throw std::invalid_argument("discretize_nu: fibers must live on the circle");
    out.cells.push_back(equal_atoms(avg, n));
  }
  return out;
}

AtomicFamily discretize_nu(const DigraphMeasure& nu0, const Partition& partition, std::size_t n) {
  if (nu0.partition() == partition) {
    if (n == 0) throw std::invalid_argument("discretize_nu: n must be at least 1");
    AtomicFamily out{partition, {}};
    for (const auto& f : nu0.fibers()) out.cells.push_back(equal_atoms(f, n));
    return out;
  }
  return discretize_nu([&](double x) { return nu0.fiber(x); }, partition, n);
}

DigraphMeasure discretize_eta(const FiberFunction& eta0, const Partition& partition, std::size_t n, double beta) {
  if (n == 0) throw std::invalid_argument("discretize_eta: n must be at least 1");
  std::vector<HybridMeasure> fibers;
  fibers.reserve(partition.size());
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const auto f = eta0(partition.representative(i));
    const double floor = f.has_density() ? f.min_density() : 0.0;
    if (floor < beta)
      throw std::invalid_argument("discretize_eta: a.c. lower bound " + std::to_string(floor) + " of the fiber at x = " +
                                  std::to_string(partition.representative(i)) + " is below beta = " + std::to_string(beta));
    const auto sing = f.singular_part();
    std::vector<Atom> atoms;
    if (sing.total_mass() > 0.0) atoms = equal_atoms(sing, n);
    std::vector<double> dens;
    if (f.has_density()) {
      const auto ac = partition.is_uniform() ? f.ac_part().regridded(partition.size()) : f.ac_part();
      dens.assign(ac.density().begin(), ac.density().end());
    }
    fibers.emplace_back(f.space(), std::move(atoms), std::move(dens));
  }
  return DigraphMeasure(partition, std::move(fibers));
}

DigraphMeasure discretize_eta(const DigraphMeasure& eta0, const Partition& partition, std::size_t n, double beta) {
  return discretize_eta([&](double x) { return eta0.fiber(x); }, partition, n, beta);
}

CellRates cell_rates(const OmegaSpec& omega, const Partition& partition) {
  return CellRates{omega, partition.representatives()};
}

std::vector<std::vector<double>> discretize_omega(const OmegaSpec& omega, const Partition& partition,
                                                  const std::vector<double>& times) {
  std::vector<std::vector<double>> table(times.size(), std::vector<double>(partition.size()));
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < partition.size(); ++i) table[k][i] = omega(times[k], partition.representative(i));
  return table;
}

LatticeWeights weights_from_dgm(const DigraphMeasure& eta, const Partition& partition) {
  const std::size_t m = partition.size();
  LatticeWeights w;
  w.W_a.assign(m, std::vector<double>(m, 0.0));
  w.W_s.assign(m, 0.0);
  w.targets.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& f = eta.fiber(partition.representative(i));
    if (f.has_density()) {
      const auto ac = f.ac_part();
      for (std::size_t p = 0; p < m; ++p) {
        const double mu = partition.measure(p);
        w.W_a[i][p] = mu > 0.0 ? ac.mass_in(partition.lower(p), partition.upper(p)) / mu : 0.0;
      }
    }
    const double s = f.singular_mass();
    w.W_s[i] = s;
    if (s != 0.0)
      for (const auto& a : f.atoms())
        if (a.weight != 0.0) w.targets[i].push_back({a.position, a.weight / s, partition.index_of(a.position)});
  }
  return w;
}

DigraphMeasure dgm_from_weights(const LatticeWeights& w, const Partition& partition) {
  if (!partition.is_uniform()) throw std::invalid_argument("dgm_from_weights: block densities need a uniform partition");
  const std::size_t m = partition.size();
  std::vector<HybridMeasure> fibers;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Atom> atoms;
    for (const auto& t : w.targets[i]) atoms.push_back({t.position, t.fraction * w.W_s[i]});
    const bool any = std::any_of(w.W_a[i].begin(), w.W_a[i].end(), [](double v) { return v != 0.0; });
    fibers.emplace_back(partition.space(), std::move(atoms), any ? w.W_a[i] : std::vector<double>{});
  }
  return DigraphMeasure(partition, std::move(fibers));
}

}  // namespace coevo
