#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coevo/digraph.hpp"
#include "coevo/discretize.hpp"
#include "coevo/dynamics.hpp"
#include "coevo/model.hpp"
#include "coevo/path.hpp"

namespace coevo {

// Characteristics phi(t, x) for every tracked atom, with the weight fibers
// eta_t^x they carry (recorded at selected nodes).
struct HybridTrajectory {
  Partition partition;  // vertex partition of the tracked atoms
  std::vector<double> times;
  std::vector<std::vector<std::vector<double>>> phases;  // [node][cell][atom]
  std::vector<std::size_t> eta_nodes;
  std::vector<std::vector<std::vector<HybridMeasure>>> eta;  // [snapshot][cell][atom]

  std::size_t nodes() const { return times.size(); }
  // eta_t as a digraph measure, using the fiber carried by atom `atom` of each cell.
  DigraphMeasure eta_dgm(std::size_t snapshot, std::size_t atom = 0) const;
};

struct FlowOptions {
  // Record eta_t every k nodes (and at the last node); 0 records nothing.
  std::size_t eta_every = 0;
};

// RK4 on the hybrid system: each atom carries its phase and the a.c. offset
// E_p(t) of its weight fiber on every cell p of nu's partition, so that
// eta_t^x = e^{-eps t} eta_0^x + sum_p E_p 1_{A_p} (density part).
// nu is evaluated between its nodes by interpolation of its labelled atoms.
HybridTrajectory characteristic_flow(const AtomicFamily& phi0, const DigraphMeasure& eta0, const MeasurePath& nu,
                                     const ModelSpec& model, const NodeRates& omega_cells, double T, double dt,
                                     const FlowOptions& opt = {});

// eta_t^x = e^{-eps t} eta_0^x - eps int_0^t e^{-eps(t-s)} (int h(psi - phi(s,x)) dnu_s^y(psi)) ds mu_X(dy),
// the time integral by the trapezoid rule on nu's grid. phi_path[node][cell] is one
// characteristic per cell of xpart.
std::vector<DigraphMeasure> reconstruct_eta(const DigraphMeasure& eta0, const MeasurePath& nu, const Partition& xpart,
                                            const std::vector<std::vector<double>>& phi_path, const ModelSpec& model);

// Atoms moved to their flowed positions, weights unchanged.
HybridMeasure pushforward(const HybridMeasure& nu0_fiber, std::span<const double> flowed_positions);

struct FixedPointOptions {
  std::size_t M_eval = 2048;
  // Residual evaluated on every k-th node (and the last one).
  std::size_t residual_every = 1;
};

struct FixedPointResult {
  MeasurePath path;
  std::vector<double> residuals;      // per iterate: sup_t sup_x d_BL(nu^{j+1}_t, nu^j_t)
  std::vector<double> mass_defects;   // per iterate: max |fiber mass - initial fiber mass|
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

FixedPointResult solve_vlasov_fixed_point(const AtomicFamily& nu0, const DigraphMeasure& eta0, const ModelSpec& model,
                                          const NodeRates& omega_cells, double T, double dt, double tol,
                                          std::size_t max_iter, const FixedPointOptions& opt = {});

void write_residual_log(const FixedPointResult& r, const std::string& file);

// Phase densities rho(t, x-cell, phi-cell) on M_phi circle cells.
struct DensityField {
  Partition partition;
  std::size_t M_phi = 0;
  std::vector<double> times;                            // snapshot times
  std::vector<std::vector<std::vector<double>>> rho;   // [snapshot][cell][phi cell]

  HybridMeasure fiber(std::size_t snapshot, std::size_t cell) const;
  double cell_mass(std::size_t snapshot, std::size_t cell) const;
};

struct PdeOptions {
  std::size_t snapshot_every = 0;  // 0: initial and final only
};

// Conservative first-order upwind finite volumes for d_t rho + d_phi(rho V) = 0 per
// x-cell. The memory part of V is carried by accumulator fields E_p(t, x, phi)
// advected with the flow. rho0[i] is the initial density of x-cell i on M_phi cells.
DensityField solve_vlasov_pde(const Partition& partition, const std::vector<std::vector<double>>& rho0,
                              const DigraphMeasure& eta0, const ModelSpec& model, const NodeRates& omega_cells, double T,
                              double dt, const PdeOptions& opt = {});

// Largest |V| the solver can meet on [0, T]; the CFL check uses it.
double pde_speed_bound(const ModelSpec& model, double eta0_norm, double fiber_mass, double T);

void write_density_csv(const DensityField& f, const std::string& file);

}  // namespace coevo
