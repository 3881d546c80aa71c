#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "coevo/digraph.hpp"
#include "coevo/measure.hpp"
#include "coevo/model.hpp"

namespace coevo {

// A fibered measure given pointwise: x -> measure (on T for nu, on X for eta).
using FiberFunction = std::function<HybridMeasure(double x)>;

// Per cell a list of weighted atoms on the circle; the discretized nu_{m,n,0}.
struct AtomicFamily {
  Partition partition;
  std::vector<std::vector<Atom>> cells;

  std::size_t size() const { return cells.size(); }
  double cell_mass(std::size_t i) const;
  // sum_i mass_i * mu(A_i)
  double total_mass() const;
  std::size_t max_atoms() const;
  DigraphMeasure as_digraph() const;
};

struct DiscretizationPlan {
  std::size_t m = 1;
  std::size_t n = 1;
  double beta = 0.0;
  double T = 0.0;
  void validate(const ModelSpec& model) const;
};

// Positions F^{-1}((2j-1)/(2n)), j = 1..n, of the normalized measure; the
// circle seam maps 1 to 0. A zero-mass measure yields n atoms at 0.
std::vector<double> quantile_midpoints(const HybridMeasure& mu, std::size_t n);

// Cell average of x -> nu0^x, by the midpoint rule with `samples` points per cell.
HybridMeasure cell_average(const FiberFunction& nu0, const Partition& partition, std::size_t cell, std::size_t samples = 64);

AtomicFamily discretize_nu(const FiberFunction& nu0, const Partition& partition, std::size_t n, std::size_t samples = 64);
AtomicFamily discretize_nu(const DigraphMeasure& nu0, const Partition& partition, std::size_t n);

// Fibers evaluated at the cell representatives; singular parts become n equal
// atoms, a.c. parts are replaced by their cell averages on the partition grid.
DigraphMeasure discretize_eta(const FiberFunction& eta0, const Partition& partition, std::size_t n, double beta);
DigraphMeasure discretize_eta(const DigraphMeasure& eta0, const Partition& partition, std::size_t n, double beta);

// omega^m(t, z) = omega(t, x_i) for z in A_i.
struct CellRates {
  OmegaSpec omega;
  std::vector<double> representatives;
  double operator()(double t, std::size_t cell) const { return omega(t, representatives[cell]); }
};
CellRates cell_rates(const OmegaSpec& omega, const Partition& partition);
// table[k][i] = omega(times[k], x_i)
std::vector<std::vector<double>> discretize_omega(const OmegaSpec& omega, const Partition& partition,
                                                  const std::vector<double>& times);

struct SingularTarget {
  double position;  // y-atom coordinate
  double fraction;  // share of W^s_i carried by this atom
  std::size_t cell; // q: the cell containing the atom
};

struct LatticeWeights {
  std::vector<std::vector<double>> W_a;  // m x m a.c. densities eta^{x_i,a}(A_p)/mu(A_p)
  std::vector<double> W_s;               // eta^{x_i,s}(X)
  std::vector<std::vector<SingularTarget>> targets;
};

LatticeWeights weights_from_dgm(const DigraphMeasure& eta, const Partition& partition);
// Inverse assembly: a.c. part as block densities, singular atoms at the stored coordinates.
DigraphMeasure dgm_from_weights(const LatticeWeights& w, const Partition& partition);

}  // namespace coevo
