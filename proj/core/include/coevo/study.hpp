#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "coevo/config.hpp"
#include "coevo/dynamics.hpp"
#include "coevo/meanfield.hpp"
#include "coevo/presets.hpp"

namespace coevo {

struct ReportRow {
  std::string level;  // "N=16" or "m=8,n=4"
  std::size_t m = 0, n = 0;
  double t = 0.0;
  double distance = 0.0;   // sup over cells of d_BL between cell-averaged fibers
  double aggregate = 0.0;  // d_BL of the vertex-averaged phase distributions
  double wall_seconds = 0.0;
  bool non_monotone = false;
};

struct ConvergenceReport {
  Example example = Example::ring;
  std::vector<ReportRow> rows;
  std::size_t reference_iterations = 0;
  double reference_residual = 0.0;
  double reference_seconds = 0.0;

  std::size_t flags() const;
};

// The reference fixed point did not converge; the residual log was written to `log`.
class ReferenceFailure : public std::runtime_error {
public:
  ReferenceFailure(const std::string& what, std::string log) : std::runtime_error(what), log_(std::move(log)) {}
  const std::string& log() const { return log_; }

private:
  std::string log_;
};

// Everything a run needs, resolved from a normalized config.
struct StudySetup {
  ExperimentConfig config;
  Preset preset;
  ModelSpec model;
  FiberFunction nu0;  // the limit's initial fibers (uniform in random mode)
};

StudySetup make_setup(const ExperimentConfig& c);

Partition vertex_partition(const StudySetup& s, std::size_t m);

// Finite-N network: preset weights and initial phases (quantile or seeded random).
CoupledState finite_state(const StudySetup& s, std::size_t N);
NodeRates finite_rates(const StudySetup& s, std::size_t N);
Trajectory run_finite(const StudySetup& s, std::size_t N);

// Lattice with m cells and n atoms per cell: nu_0 quantile atoms, eta_0 at the representatives.
LatticeState lattice_state(const StudySetup& s, std::size_t m, std::size_t n);
Trajectory run_lattice(const StudySetup& s, std::size_t m, std::size_t n);

AtomicFamily initial_atoms(const StudySetup& s, std::size_t m, std::size_t n);
DigraphMeasure eta0_dgm(const StudySetup& s, std::size_t m);

// Picard fixed point on (m, n). Throws ReferenceFailure (after writing the residual
// log into the output directory) when it does not reach tol.
FixedPointResult reference_solution(const StudySetup& s, std::size_t m, std::size_t n);

// Cells of the coarser partition; each side's fibers averaged over a cell with
// overlap weights; sup of d_BL over those cells.
double cellwise_bl(const DigraphMeasure& a, const DigraphMeasure& b, std::size_t M_eval);
// int nu^x dmu_X(x)
HybridMeasure vertex_average(const DigraphMeasure& nu);

// Finite-N phases as the fibered measure x -> delta_{phi_i}, x in cell i.
DigraphMeasure finite_dgm(const std::vector<double>& phases, Space space);

// sup over x = k/samples of d_BL(a(x), b(x)).
double sampled_sup_bl(const FiberFunction& a, const FiberFunction& b, Space space, std::size_t samples, std::size_t M_eval);

// One row per (level, report time), reference = Picard on (ref_m, ref_n). Needs at least 3 levels.
ConvergenceReport convergence_study(const ExperimentConfig& c);

// convergence_study plus artifacts in config.output_dir: report, timings,
// trajectories, reference path, residual log, initial-weight errors.
ConvergenceReport run_example(const ExperimentConfig& c);

void emit_csv(const ConvergenceReport& r, const std::string& file);
void emit_timing_csv(const ConvergenceReport& r, const std::string& file);

}  // namespace coevo
