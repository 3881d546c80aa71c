#include "coevo/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

namespace coevo {

Partition::Partition(Space space, std::vector<double> breakpoints, std::vector<double> representatives)
    : space_(space), bp_(std::move(breakpoints)), reps_(std::move(representatives)) {
  if (bp_.size() < 2 || bp_.front() != 0.0 || bp_.back() != 1.0)
    throw std::invalid_argument("partition breakpoints must start at 0 and end at 1");
  for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
    if (!(bp_[i + 1] > bp_[i])) throw std::invalid_argument("partition breakpoints must be strictly increasing");
  const std::size_t m = bp_.size() - 1;
  if (reps_.empty()) {
    reps_.resize(m);
    for (std::size_t i = 0; i < m; ++i) reps_[i] = 0.5 * (bp_[i] + bp_[i + 1]);
  }
  if (reps_.size() != m) throw std::invalid_argument("partition needs one representative per cell");
  for (std::size_t i = 0; i < m; ++i)
    if (reps_[i] < bp_[i] || reps_[i] > bp_[i + 1]) throw std::invalid_argument("representative outside its cell");
  uniform_ = true;
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(measure(i) - 1.0 / static_cast<double>(m)) > 1e-14) uniform_ = false;
}

double Partition::max_diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i) d = std::max(d, measure(i));
  return d;
}

std::size_t Partition::index_of(double x) const {
  if (space_ == Space::circle) x = wrap_phase(x);
  if (uniform_) return cell_index(x, size());
  auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
  if (it == bp_.begin()) return 0;
  return std::min(static_cast<std::size_t>(it - bp_.begin()) - 1, size() - 1);
}

Partition uniform_partition(Space space, std::size_t m) {
  if (m == 0) throw std::invalid_argument("uniform_partition: m must be at least 1");
  std::vector<double> bp(m + 1), reps(m);
  for (std::size_t i = 0; i <= m; ++i) bp[i] = static_cast<double>(i) / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) reps[i] = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(m));
  return Partition(space, std::move(bp), std::move(reps));
}

DigraphMeasure::DigraphMeasure(Partition partition, std::vector<HybridMeasure> fibers)
    : partition_(std::move(partition)), fibers_(std::move(fibers)) {
  if (fibers_.size() != partition_.size()) throw std::invalid_argument("digraph measure needs one fiber per cell");
}

double DigraphMeasure::max_fiber_mass() const {
  double m = 0.0;
  for (const auto& f : fibers_) m = std::max(m, f.total_mass());
  return m;
}

DigraphMeasure DigraphMeasure::scaled(double c) const {
  std::vector<HybridMeasure> f;
  f.reserve(fibers_.size());
  for (const auto& x : fibers_) f.push_back(x.scaled(c));
  return DigraphMeasure(partition_, std::move(f));
}

bool DigraphMeasure::is_positive(double tol) const {
  return std::all_of(fibers_.begin(), fibers_.end(), [&](const HybridMeasure& f) { return f.is_positive(tol); });
}

double ac_lower_bound(const DigraphMeasure& eta) {
  if (eta.size() == 0) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : eta.fibers()) m = std::min(m, f.min_density());
  return std::max(m, 0.0);
}

std::vector<std::vector<double>> block_mass_matrix(const DigraphMeasure& eta) {
  const auto& P = eta.partition();
  const std::size_t m = P.size();
  std::vector<std::vector<double>> B(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& f = eta.fiber_at(i);
    const double wi = P.measure(i);
    for (const auto& a : f.atoms()) B[i][P.index_of(a.position)] += wi * a.weight;
    if (f.has_density()) {
      const HybridMeasure ac(f.space(), {}, std::vector<double>(f.density().begin(), f.density().end()));
      for (std::size_t p = 0; p < m; ++p) B[i][p] += wi * ac.mass_in(P.lower(p), P.upper(p));
    }
  }
  return B;
}

std::vector<std::vector<double>> transpose_blocks(const std::vector<std::vector<double>>& B) {
  const std::size_t m = B.size();
  std::vector<std::vector<double>> T(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < m; ++p) T[p][i] = B[i][p];
  return T;
}

double symmetry_defect(const DigraphMeasure& eta) {
  const auto B = block_mass_matrix(eta);
  double d = 0.0;
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t p = i + 1; p < B.size(); ++p) d = std::max(d, std::abs(B[i][p] - B[p][i]));
  return d;
}

namespace {

template <class Metric>
double sup_over_representatives(const DigraphMeasure& eta, const DigraphMeasure& xi, Metric&& metric) {
  if (eta.space() != xi.space()) throw std::invalid_argument("digraph measures live on different vertex spaces");
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (double x : eta.partition().representatives()) pairs.insert({eta.partition().index_of(x), xi.partition().index_of(x)});
  for (double x : xi.partition().representatives()) pairs.insert({eta.partition().index_of(x), xi.partition().index_of(x)});
  double best = 0.0;
  for (const auto& [i, j] : pairs) best = std::max(best, metric(eta.fiber_at(i), xi.fiber_at(j)));
  return best;
}

}  // namespace

double sup_bl_distance(const DigraphMeasure& eta, const DigraphMeasure& xi, std::size_t M_eval) {
  return sup_over_representatives(eta, xi, [&](const HybridMeasure& a, const HybridMeasure& b) { return bl_distance(a, b, M_eval); });
}

double sup_tv_distance(const DigraphMeasure& eta, const DigraphMeasure& xi) {
  return sup_over_representatives(eta, xi, [](const HybridMeasure& a, const HybridMeasure& b) { return tv_distance(a, b); });
}

}  // namespace coevo
