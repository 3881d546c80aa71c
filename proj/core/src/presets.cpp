#include "coevo/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace coevo {

std::string to_string(Example e) {
  switch (e) {
    case Example::ring: return "ring";
    case Example::tree: return "tree";
    case Example::dense: return "dense";
    case Example::custom: return "custom";
  }
  return "?";
}

Example parse_example(const std::string& name) {
  if (name == "ring") return Example::ring;
  if (name == "tree") return Example::tree;
  if (name == "dense") return Example::dense;
  if (name == "custom") return Example::custom;
  throw std::invalid_argument("unknown example '" + name + "' (expected ring, tree, dense or custom)");
}

std::string to_string(Nu0Spec::Kind k) {
  switch (k) {
    case Nu0Spec::Kind::curve: return "curve";
    case Nu0Spec::Kind::wave: return "wave";
    case Nu0Spec::Kind::uniform: return "uniform";
  }
  return "?";
}

Nu0Spec::Kind parse_nu0_kind(const std::string& name) {
  if (name == "curve") return Nu0Spec::Kind::curve;
  if (name == "wave") return Nu0Spec::Kind::wave;
  if (name == "uniform") return Nu0Spec::Kind::uniform;
  throw std::invalid_argument("unknown nu0 kind '" + name + "' (expected curve, wave or uniform)");
}

FiberFunction nu0_fibers(const Nu0Spec& spec, std::size_t grid) {
  switch (spec.kind) {
    case Nu0Spec::Kind::curve:
      return [spec](double x) {
        return HybridMeasure::dirac(Space::circle, spec.offset + spec.amplitude * std::sin(kTwoPi * x));
      };
    case Nu0Spec::Kind::wave: {
      if (std::abs(spec.amplitude) > 1.0) throw std::invalid_argument("wave nu0 needs |amplitude| <= 1 for a positive density");
      if (grid == 0) throw std::invalid_argument("wave nu0 needs a positive grid");
      return [spec, grid](double x) {
        const double M = static_cast<double>(grid);
        std::vector<double> d(grid);
        for (std::size_t k = 0; k < grid; ++k) {
          // cell average of cos(2 pi (phi - s)) over [k/M, (k+1)/M]
          const double s = x + spec.offset, l = static_cast<double>(k) / M, r = static_cast<double>(k + 1) / M;
          const double avg = M * (std::sin(kTwoPi * (r - s)) - std::sin(kTwoPi * (l - s))) / kTwoPi;
          d[k] = 1.0 + spec.amplitude * avg;
        }
        return HybridMeasure(Space::circle, {}, std::move(d));
      };
    }
    case Nu0Spec::Kind::uniform:
      return [](double) { return HybridMeasure::uniform(Space::circle, 1.0, 1); };
  }
  throw std::invalid_argument("bad nu0 kind");
}

std::vector<double> ring_weights(std::size_t N) {
  if (N < 2) throw std::invalid_argument("ring needs N >= 2");
  const double w = static_cast<double>(N);
  std::vector<double> W(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    W[i * N + (i + 1) % N] = w;
    W[i * N + (i + N - 1) % N] = w;
  }
  return W;
}

bool is_tree_size(std::size_t N) { return N >= 3 && ((N + 1) & N) == 0; }

void require_tree_size(std::size_t N) {
  if (is_tree_size(N)) return;
  std::string sizes;
  for (std::size_t k = 1; k <= 12; ++k) sizes += std::to_string((std::size_t{2} << k) - 1) + ", ";
  throw std::invalid_argument("tree networks need N = 2^{k+1} - 1, got " + std::to_string(N) + "; admissible sizes: " + sizes + "...");
}

std::vector<double> tree_weights(std::size_t N) {
  require_tree_size(N);
  const double w = static_cast<double>(N);
  std::vector<double> W(N * N, 0.0);
  for (std::size_t i = 1; i <= N; ++i)
    for (std::size_t j : {2 * i, 2 * i + 1, i / 2})
      if (j >= 1 && j <= N) W[(i - 1) * N + (j - 1)] = w;
  return W;
}

std::vector<double> dense_weights(std::size_t N) {
  auto W = tree_weights(N);
  const double n = static_cast<double>(N);
  for (std::size_t i = 1; i <= N; ++i)
    for (std::size_t j = 1; j <= N; ++j) W[(i - 1) * N + (j - 1)] += std::exp2(-static_cast<double>(i + j) / n);
  return W;
}

std::vector<double> preset_weights(Example e, std::size_t N) {
  switch (e) {
    case Example::ring:
    case Example::custom: return ring_weights(N);
    case Example::tree: return tree_weights(N);
    case Example::dense: return dense_weights(N);
  }
  throw std::invalid_argument("bad example");
}

HybridMeasure ring_eta0(double x) { return HybridMeasure(Space::circle, {{x, 2.0}}); }

HybridMeasure tree_eta0(double x) {
  if (x <= 0.0) return HybridMeasure(Space::interval, {{0.0, 2.0}});
  if (x <= 0.5) return HybridMeasure(Space::interval, {{2.0 * x, 2.0}, {0.5 * x, 1.0}});
  return HybridMeasure(Space::interval, {{0.5 * x, 1.0}});
}

HybridMeasure dense_eta0(double x, std::size_t grid) {
  if (grid == 0) throw std::invalid_argument("dense eta0 needs a positive grid");
  const double M = static_cast<double>(grid), ln2 = std::log(2.0), sx = std::exp2(-x);
  std::vector<double> d(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const double l = static_cast<double>(k) / M, r = static_cast<double>(k + 1) / M;
    d[k] = sx * M * (std::exp2(-l) - std::exp2(-r)) / ln2;
  }
  auto sing = tree_eta0(x);
  return HybridMeasure(Space::interval, std::vector<Atom>(sing.atoms().begin(), sing.atoms().end()), std::move(d));
}

Preset make_preset(Example e, std::size_t dense_grid) {
  Preset p;
  p.example = e;
  p.g = FourierFunction::sin2pi();
  switch (e) {
    case Example::ring:
    case Example::custom:
      p.space = Space::circle;
      p.h = FourierFunction::constant(-1.0);
      p.eta0 = ring_eta0;
      break;
    case Example::tree:
      p.space = Space::interval;
      p.h = FourierFunction::neg_sin_squared();
      p.eta0 = tree_eta0;
      break;
    case Example::dense:
      p.space = Space::interval;
      p.h = FourierFunction::sin2pi();
      p.a_floor = 0.25;
      p.eta0 = [dense_grid](double x) { return dense_eta0(x, dense_grid); };
      break;
  }
  return p;
}

DigraphMeasure eta0_on(const Preset& p, const Partition& partition) {
  std::vector<HybridMeasure> f;
  for (std::size_t i = 0; i < partition.size(); ++i) f.push_back(p.eta0(partition.representative(i)));
  return DigraphMeasure(partition, std::move(f));
}

double preset_horizon(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return std::log(1.25) / epsilon;
}

}  // namespace coevo
