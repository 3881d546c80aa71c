#include "coevo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace coevo {

const char* to_string(Space s) { return s == Space::circle ? "circle" : "interval"; }

double wrap_phase(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double distance(Space s, double x, double y) {
  const double d = std::abs(x - y);
  if (s == Space::interval) return d;
  const double w = d - std::floor(d);
  return std::min(w, 1.0 - w);
}

std::size_t cell_index(double x, std::size_t M) {
  if (!(x > 0.0)) return 0;
  auto k = static_cast<std::size_t>(x * static_cast<double>(M));
  return std::min(k, M - 1);
}

namespace {

void check_same_space(const HybridMeasure& a, const HybridMeasure& b) {
  if (a.space() != b.space())
    throw std::invalid_argument(std::string("measures live on different spaces: ") + to_string(a.space()) +
                                " vs " + to_string(b.space()));
}

// Calls visit(i, j, length) for every nonempty overlap of cell i of an Ma-grid
// with cell j of an Mb-grid. Breakpoints are compared as exact integers.
template <class F>
void for_each_overlap(std::size_t Ma, std::size_t Mb, F&& visit) {
  const std::uint64_t A = Ma, B = Mb;
  const double unit = 1.0 / (static_cast<double>(A) * static_cast<double>(B));
  std::uint64_t i = 0, j = 0, pos = 0;  // pos in units of 1/(A*B)
  while (i < A && j < B) {
    const std::uint64_t end_a = (i + 1) * B, end_b = (j + 1) * A;
    const std::uint64_t end = std::min(end_a, end_b);
    visit(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<double>(end - pos) * unit);
    pos = end;
    if (end_a == end) ++i;
    if (end_b == end) ++j;
  }
}

}  // namespace

HybridMeasure::HybridMeasure(Space space) : space_(space) {}

HybridMeasure::HybridMeasure(Space space, std::vector<Atom> atoms, std::vector<double> density)
    : space_(space), atoms_(std::move(atoms)), density_(std::move(density)) {
  for (auto& a : atoms_) {
    if (!std::isfinite(a.position) || !std::isfinite(a.weight))
      throw std::invalid_argument("non-finite atom in HybridMeasure");
    if (space_ == Space::circle) {
      a.position = wrap_phase(a.position);
    } else if (a.position < 0.0 || a.position > 1.0) {
      throw std::invalid_argument("atom position outside [0,1] on the interval");
    }
  }
  for (double d : density_)
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite density value in HybridMeasure");
}

HybridMeasure HybridMeasure::dirac(Space space, double position, double weight) {
  return HybridMeasure(space, {{position, weight}});
}

HybridMeasure HybridMeasure::uniform(Space space, double mass, std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("uniform measure needs at least one cell");
  return HybridMeasure(space, {}, std::vector<double>(cells, mass));
}

double HybridMeasure::singular_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

double HybridMeasure::ac_mass() const {
  if (density_.empty()) return 0.0;
  double s = 0.0;
  for (double d : density_) s += d;
  return s / static_cast<double>(density_.size());
}

double HybridMeasure::min_density() const {
  if (density_.empty()) return 0.0;
  return *std::min_element(density_.begin(), density_.end());
}

bool HybridMeasure::is_positive(double tol) const {
  for (const auto& a : atoms_)
    if (a.weight < -tol) return false;
  for (double d : density_)
    if (d < -tol) return false;
  return true;
}

double HybridMeasure::mass_in(double lo, double hi) const {
  double s = 0.0;
  const bool close_right = space_ == Space::interval && hi >= 1.0;
  for (const auto& a : atoms_)
    if (a.position >= lo && (a.position < hi || (close_right && a.position <= hi))) s += a.weight;
  if (!density_.empty()) {
    const double M = static_cast<double>(density_.size());
    for (std::size_t k = 0; k < density_.size(); ++k) {
      const double a = std::max(lo, static_cast<double>(k) / M);
      const double b = std::min(hi, static_cast<double>(k + 1) / M);
      if (b > a) s += density_[k] * (b - a);
    }
  }
  return s;
}

HybridMeasure HybridMeasure::scaled(double c) const {
  HybridMeasure r = *this;
  for (auto& a : r.atoms_) a.weight *= c;
  for (auto& d : r.density_) d *= c;
  return r;
}

HybridMeasure HybridMeasure::refined(std::size_t M) const {
  if (M == 0) throw std::invalid_argument("refined: grid size must be positive");
  HybridMeasure r(space_, atoms_, {});
  if (density_.empty()) {
    r.density_.assign(M, 0.0);
    return r;
  }
  if (M % density_.size() != 0) throw std::invalid_argument("refined: target grid is not a multiple of the current grid");
  const std::size_t f = M / density_.size();
  r.density_.reserve(M);
  for (double d : density_) r.density_.insert(r.density_.end(), f, d);
  return r;
}

HybridMeasure HybridMeasure::regridded(std::size_t M) const {
  if (M == 0) throw std::invalid_argument("regridded: grid size must be positive");
  std::vector<double> d(M, 0.0);
  if (!density_.empty()) {
    for_each_overlap(density_.size(), M, [&](std::size_t i, std::size_t j, double len) { d[j] += density_[i] * len; });
    for (auto& v : d) v *= static_cast<double>(M);
  }
  return HybridMeasure(space_, atoms_, std::move(d));
}

namespace {

HybridMeasure combine(const HybridMeasure& a, const HybridMeasure& b, double sign) {
  check_same_space(a, b);
  std::vector<Atom> atoms(a.atoms().begin(), a.atoms().end());
  for (const auto& at : b.atoms()) atoms.push_back({at.position, sign * at.weight});
  std::vector<double> dens;
  if (!a.has_density()) {
    for (double d : b.density()) dens.push_back(sign * d);
  } else if (!b.has_density()) {
    dens.assign(a.density().begin(), a.density().end());
  } else {
    const std::size_t L = std::lcm(a.grid_size(), b.grid_size());
    const auto ra = a.refined(L), rb = b.refined(L);
    dens.resize(L);
    for (std::size_t k = 0; k < L; ++k) dens[k] = ra.density()[k] + sign * rb.density()[k];
  }
  return HybridMeasure(a.space(), std::move(atoms), std::move(dens));
}

}  // namespace

HybridMeasure operator+(const HybridMeasure& a, const HybridMeasure& b) { return combine(a, b, 1.0); }
HybridMeasure operator-(const HybridMeasure& a, const HybridMeasure& b) { return combine(a, b, -1.0); }

double total_mass(const HybridMeasure& mu) { return mu.total_mass(); }

double tv_distance(const HybridMeasure& mu, const HybridMeasure& nu) {
  check_same_space(mu, nu);
  std::vector<Atom> atoms(mu.atoms().begin(), mu.atoms().end());
  for (const auto& a : nu.atoms()) atoms.push_back({a.position, -a.weight});
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.position < y.position; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size();) {
    double w = 0.0;
    std::size_t j = i;
    for (; j < atoms.size() && atoms[j].position == atoms[i].position; ++j) w += atoms[j].weight;
    total += std::abs(w);
    i = j;
  }
  if (mu.has_density() && nu.has_density()) {
    const auto da = mu.density(), db = nu.density();
    for_each_overlap(da.size(), db.size(),
                     [&](std::size_t i, std::size_t j, double len) { total += std::abs(da[i] - db[j]) * len; });
  } else {
    for (const auto* m : {&mu, &nu}) {
      if (!m->has_density()) continue;
      const double M = static_cast<double>(m->grid_size());
      for (double d : m->density()) total += std::abs(d) / M;
    }
  }
  return total;
}

std::vector<double> project_to_grid(const HybridMeasure& mu, std::size_t M_eval) {
  if (M_eval == 0) throw std::invalid_argument("project_to_grid: M_eval must be positive");
  std::vector<double> w(M_eval, 0.0);
  for (const auto& a : mu.atoms()) w[cell_index(a.position, M_eval)] += a.weight;
  if (mu.has_density()) {
    const auto d = mu.density();
    for_each_overlap(d.size(), M_eval, [&](std::size_t i, std::size_t j, double len) { w[j] += d[i] * len; });
  }
  return w;
}

namespace {

// Concave piecewise-linear function on the integer range [lo, hi], stored as
// its value at lo plus segments of decreasing slope. Slopes carry a lazy offset.
class ConcaveChain {
public:
  ConcaveChain(long lo, double value_at_lo) : lo_(lo), hi_(lo), v0_(value_at_lo) {}

  static ConcaveChain linear(long lo, long hi, double slope) {
    ConcaveChain c(lo, slope * static_cast<double>(lo));
    if (hi > lo) c.seg_.push_back({hi - lo, slope});
    c.hi_ = hi;
    return c;
  }

  void add_linear(double w) {
    v0_ += w * static_cast<double>(lo_);
    offset_ += w;
  }

  // Sliding-window maximum with radius r.
  void dilate(long r) {
    if (r <= 0) return;
    auto it = std::partition_point(seg_.begin(), seg_.end(), [&](const Seg& s) { return s.slope + offset_ > 0.0; });
    seg_.insert(it, Seg{2 * r, -offset_});
    lo_ -= r;
    hi_ += r;
  }

  void clip(long lo, long hi) {
    while (lo_ < lo) {
      auto& s = seg_.front();
      const long need = lo - lo_;
      const long take = std::min(need, s.len);
      v0_ += static_cast<double>(take) * (s.slope + offset_);
      lo_ += take;
      s.len -= take;
      if (s.len == 0) seg_.pop_front();
    }
    while (hi_ > hi) {
      auto& s = seg_.back();
      const long take = std::min(hi_ - hi, s.len);
      hi_ -= take;
      s.len -= take;
      if (s.len == 0) seg_.pop_back();
    }
  }

  double max_value() const {
    double v = v0_;
    for (const auto& s : seg_) {
      const double slope = s.slope + offset_;
      if (slope <= 0.0) break;
      v += static_cast<double>(s.len) * slope;
    }
    return v;
  }

  double value_at(long j) const {
    double v = v0_;
    long pos = lo_;
    for (const auto& s : seg_) {
      if (pos >= j) break;
      const long take = std::min(s.len, j - pos);
      v += static_cast<double>(take) * (s.slope + offset_);
      pos += take;
    }
    return v;
  }

private:
  struct Seg {
    long len;
    double slope;
  };
  long lo_, hi_;
  double v0_;
  double offset_ = 0.0;
  std::deque<Seg> seg_;
};

}  // namespace

double bl_dual_optimum(std::span<const double> w, Space space) {
  const long K = static_cast<long>(w.size());
  if (K == 0) return 0.0;
  // Vertices of the feasible polytope have f_k = j_k / K with integer j_k, so the
  // chain recursion runs over integers in [-K, K].
  std::vector<long> idx;
  for (long k = 0; k < K; ++k)
    if (w[static_cast<std::size_t>(k)] != 0.0) idx.push_back(k);
  if (idx.empty()) return 0.0;
  const double h = 1.0 / static_cast<double>(K);
  auto wt = [&](std::size_t s) { return w[static_cast<std::size_t>(idx[s])]; };

  if (space == Space::interval || idx.size() == 1) {
    if (idx.size() == 1) return std::abs(wt(0));
    auto c = ConcaveChain::linear(-K, K, wt(0));
    for (std::size_t s = 1; s < idx.size(); ++s) {
      c.dilate(idx[s] - idx[s - 1]);
      c.clip(-K, K);
      c.add_linear(wt(s));
    }
    return c.max_value() * h;
  }

  const long wrap_gap = K - (idx.back() - idx.front());
  auto value_with_anchor = [&](long a) {
    ConcaveChain c(a, wt(0) * static_cast<double>(a));
    for (std::size_t s = 1; s < idx.size(); ++s) {
      c.dilate(idx[s] - idx[s - 1]);
      c.clip(-K, K);
      c.add_linear(wt(s));
    }
    c.dilate(wrap_gap);
    c.clip(-K, K);
    return c.value_at(a);
  };
  // The optimum as a function of the anchored value is concave on the integers.
  long lo = -K, hi = K;
  while (hi - lo > 2) {
    const long mid = lo + (hi - lo) / 2;
    if (value_with_anchor(mid) < value_with_anchor(mid + 1))
      lo = mid + 1;
    else
      hi = mid;
  }
  double best = value_with_anchor(lo);
  for (long a = lo + 1; a <= hi; ++a) best = std::max(best, value_with_anchor(a));
  return best * h;
}

double bl_distance(const HybridMeasure& mu, const HybridMeasure& nu, std::size_t M_eval) {
  check_same_space(mu, nu);
  if (M_eval < 2) throw std::invalid_argument("bl_distance: M_eval must be at least 2");
  auto w = project_to_grid(mu, M_eval);
  auto v = project_to_grid(nu, M_eval);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] -= v[k];
  return bl_dual_optimum(w, mu.space());
}

}  // namespace coevo
