#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coevo/digraph.hpp"
#include "coevo/discretize.hpp"
#include "coevo/model.hpp"
#include "coevo/path.hpp"

namespace coevo {

// omega_i(t) for node (or cell) i.
using NodeRates = std::function<double(double t, std::size_t i)>;

NodeRates constant_rates(std::vector<double> rates);
NodeRates rates_from(const CellRates& r);

struct CoupledState {
  std::vector<double> phases;   // N
  std::vector<double> weights;  // N x N row-major, W_ij

  std::size_t size() const { return phases.size(); }
  double& W(std::size_t i, std::size_t j) { return weights[i * phases.size() + j]; }
  double W(std::size_t i, std::size_t j) const { return weights[i * phases.size() + j]; }
};

// Structured lattice state. The a.c. weights are kept per atom: W_a[(i n + j) m + p]
// is the density carried by atom j of cell i towards cell p.
struct LatticeState {
  Partition partition;
  std::size_t n = 1;
  std::vector<double> phases;  // m n
  std::vector<double> masses;  // a_{m,i}
  std::vector<double> W_a;     // (m n) x m
  std::vector<double> W_s;     // m
  std::vector<std::vector<SingularTarget>> targets;

  std::size_t cells() const { return partition.size(); }
  std::size_t atoms() const { return phases.size(); }
  void validate() const;
};

// Builds the lattice state from discretized data: phases from the atoms of nu,
// masses a_{m,i} from the cell masses, weights replicated per atom.
LatticeState make_lattice_state(const AtomicFamily& nu, const LatticeWeights& w);

struct WeightStats {
  double min = 0, max = 0, mean = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> phases;       // per node
  std::vector<std::vector<double>> weights;      // per node when recorded, else only the final state
  std::vector<std::vector<double>> singular;     // lattice only: W_s per node
  std::vector<WeightStats> weight_stats;         // per node
  std::optional<std::size_t> positivity_violation_step;
  // lattice metadata for empirical paths
  std::size_t atoms_per_cell = 1;
  std::vector<double> masses;

  std::size_t nodes() const { return times.size(); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct IntegrateOptions {
  bool record_weights = false;
  // tolerance below zero for the positivity flag
  double positivity_tol = 1e-10;
};

// Number of fixed steps and the step size that divides T exactly (dt_eff <= dt).
std::pair<std::size_t, double> step_plan(double T, double dt);

Trajectory integrate_coupled(const CoupledState& init, const ModelSpec& model, const NodeRates& omega, double T, double dt,
                             const IntegrateOptions& opt = {});

Trajectory integrate_lattice(const LatticeState& init, const ModelSpec& model, const NodeRates& omega_cells, double T,
                             double dt, const IntegrateOptions& opt = {});

// Same lattice, weights eliminated: the state is the phases plus the memory
// integrals Q_{(ij)p}(t) = int_0^t e^{eps s} H_p(phi_ij(s), s) ds, so that
// W^a(t) = e^{-eps t}(W^a_0 - eps Q). Returns phases only.
Trajectory integrate_lattice_decoupled(const LatticeState& init, const ModelSpec& model, const NodeRates& omega_cells,
                                       double T, double dt);

// W^s_i(t) = e^{-eps t} W^s_{i,0}
double singular_weight(double Ws0, double epsilon, double t);

// Per node and cell, atoms a_{m,i}/n at the lattice phases.
MeasurePath empirical_path(const Trajectory& traj, const Partition& partition);

// DGM of the lattice weights at node k (requires recorded weights); atom j of each cell.
DigraphMeasure lattice_weights_dgm(const Trajectory& traj, const LatticeState& init, std::size_t node, std::size_t atom = 0);

// Finite-N digraph measure (1/N) sum_j W_ij delta_{(2j-1)/(2N)} on the N-cell partition.
DigraphMeasure dgm_from_matrix(const std::vector<double>& W, std::size_t N, Space space);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace coevo
