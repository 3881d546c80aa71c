#include "coevo/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace coevo {

namespace {

double nearest_image(double d) { return d - std::round(d); }

}  // namespace

std::vector<double> uniform_times(std::size_t steps, double dt) {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) * dt;
  return t;
}

HybridMeasure MeasurePath::fiber(std::size_t node, std::size_t cell) const {
  const auto& pos = positions[node][cell];
  const auto& w = weights[cell];
  std::vector<Atom> atoms(pos.size());
  for (std::size_t a = 0; a < pos.size(); ++a) atoms[a] = {pos[a], w[a]};
  return HybridMeasure(Space::circle, std::move(atoms));
}

DigraphMeasure MeasurePath::at(std::size_t node) const {
  std::vector<HybridMeasure> f;
  f.reserve(cells());
  for (std::size_t i = 0; i < cells(); ++i) f.push_back(fiber(node, i));
  return DigraphMeasure(partition, std::move(f));
}

double MeasurePath::fiber_mass(std::size_t cell) const {
  double s = 0.0;
  for (double w : weights[cell]) s += w;
  return s;
}

void MeasurePath::positions_at(double t, std::vector<std::vector<double>>& out) const {
  const std::size_t K = nodes();
  if (K == 0) throw std::invalid_argument("empty measure path");
  out.resize(cells());
  const double h = dt();
  std::size_t k = 0;
  if (K > 1 && t > 0.0) k = std::min(static_cast<std::size_t>(t / h), K - 1);
  if (K == 1 || std::abs(t - times[k]) <= 1e-12 * h) {
    for (std::size_t i = 0; i < cells(); ++i) out[i] = positions[k][i];
    return;
  }
  if (k + 1 < K && std::abs(t - times[k + 1]) <= 1e-12 * h) {
    for (std::size_t i = 0; i < cells(); ++i) out[i] = positions[k + 1][i];
    return;
  }
  const std::size_t width = std::min<std::size_t>(4, K);
  std::size_t s0 = k >= 1 ? k - 1 : 0;
  if (s0 + width > K) s0 = K - width;
  double lw[4];
  for (std::size_t a = 0; a < width; ++a) {
    double v = 1.0;
    for (std::size_t b = 0; b < width; ++b)
      if (b != a) v *= (t - times[s0 + b]) / (times[s0 + a] - times[s0 + b]);
    lw[a] = v;
  }
  double lifted[4];
  for (std::size_t i = 0; i < cells(); ++i) {
    const std::size_t na = positions[k][i].size();
    out[i].resize(na);
    for (std::size_t a = 0; a < na; ++a) {
      // unwrap outward from node k
      const std::size_t c = k - s0;
      lifted[c] = positions[k][i][a];
      for (std::size_t q = c + 1; q < width; ++q)
        lifted[q] = lifted[q - 1] + nearest_image(positions[s0 + q][i][a] - positions[s0 + q - 1][i][a]);
      for (std::size_t q = c; q-- > 0;) lifted[q] = lifted[q + 1] + nearest_image(positions[s0 + q][i][a] - positions[s0 + q + 1][i][a]);
      double v = 0.0;
      for (std::size_t q = 0; q < width; ++q) v += lw[q] * lifted[q];
      out[i][a] = wrap_phase(v);
    }
  }
}

MeasurePath MeasurePath::constant(const AtomicFamily& nu0, const std::vector<double>& times) {
  MeasurePath p;
  p.partition = nu0.partition;
  p.times = times;
  std::vector<std::vector<double>> pos(nu0.size());
  p.weights.resize(nu0.size());
  for (std::size_t i = 0; i < nu0.size(); ++i)
    for (const auto& a : nu0.cells[i]) {
      pos[i].push_back(a.position);
      p.weights[i].push_back(a.weight);
    }
  p.positions.assign(times.size(), pos);
  return p;
}

void write_path_csv(const MeasurePath& path, const std::string& file, std::size_t every) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  os << "time,cell,atom,position,weight\n";
  char buf[160];
  if (every == 0) every = 1;
  for (std::size_t k = 0; k < path.nodes(); ++k) {
    if (k % every != 0 && k + 1 != path.nodes()) continue;
    for (std::size_t i = 0; i < path.cells(); ++i)
      for (std::size_t a = 0; a < path.weights[i].size(); ++a) {
        std::snprintf(buf, sizeof buf, "%.12g,%zu,%zu,%.17g,%.17g\n", path.times[k], i, a, path.positions[k][i][a],
                      path.weights[i][a]);
        os << buf;
      }
  }
}

}  // namespace coevo
