#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coevo/digraph.hpp"
#include "coevo/discretize.hpp"

namespace coevo {

// Time-indexed family of atomic circle fibers over a vertex partition. Atoms are
// labelled: atom a of cell i is the same particle at every node, and its weight
// does not change in time.
struct MeasurePath {
  Partition partition;
  std::vector<double> times;
  std::vector<std::vector<double>> weights;                 // [cell][atom]
  std::vector<std::vector<std::vector<double>>> positions;  // [node][cell][atom]

  std::size_t nodes() const { return times.size(); }
  std::size_t cells() const { return weights.size(); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  double end_time() const { return times.empty() ? 0.0 : times.back(); }

  HybridMeasure fiber(std::size_t node, std::size_t cell) const;
  DigraphMeasure at(std::size_t node) const;
  double fiber_mass(std::size_t cell) const;

  // Atom positions at an arbitrary time in [0, end_time()], by 4-point Lagrange
  // interpolation of the lifted (unwrapped) positions; exact at the nodes.
  void positions_at(double t, std::vector<std::vector<double>>& out) const;

  // nu_t = nu_0 at every node of the grid.
  static MeasurePath constant(const AtomicFamily& nu0, const std::vector<double>& times);
};

std::vector<double> uniform_times(std::size_t steps, double dt);

// Rows: time, cell, atom, position, weight.
void write_path_csv(const MeasurePath& path, const std::string& file, std::size_t every = 1);

}  // namespace coevo
