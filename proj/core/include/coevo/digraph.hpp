#pragma once

#include <cstddef>
#include <vector>

#include "coevo/measure.hpp"

namespace coevo {

// Partition of X into half-open cells [b_i, b_{i+1}); on the interval the last
// cell also contains 1.
class Partition {
public:
  Partition() = default;
  Partition(Space space, std::vector<double> breakpoints, std::vector<double> representatives = {});

  Space space() const { return space_; }
  std::size_t size() const { return reps_.size(); }
  double lower(std::size_t i) const { return bp_[i]; }
  double upper(std::size_t i) const { return bp_[i + 1]; }
  double measure(std::size_t i) const { return bp_[i + 1] - bp_[i]; }
  double representative(std::size_t i) const { return reps_[i]; }
  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<double>& representatives() const { return reps_; }
  double max_diameter() const;
  bool is_uniform() const { return uniform_; }

  std::size_t index_of(double x) const;

  bool operator==(const Partition& o) const { return space_ == o.space_ && bp_ == o.bp_ && reps_ == o.reps_; }

private:
  Space space_ = Space::interval;
  std::vector<double> bp_{0.0, 1.0};
  std::vector<double> reps_{0.5};
  bool uniform_ = true;
};

Partition uniform_partition(Space space, std::size_t m);

// x -> eta^x, constant on the cells of a partition.
class DigraphMeasure {
public:
  DigraphMeasure() = default;
  DigraphMeasure(Partition partition, std::vector<HybridMeasure> fibers);

  const Partition& partition() const { return partition_; }
  Space space() const { return partition_.space(); }
  std::size_t size() const { return fibers_.size(); }
  const HybridMeasure& fiber_at(std::size_t cell) const { return fibers_[cell]; }
  const HybridMeasure& fiber(double x) const { return fibers_[partition_.index_of(x)]; }
  const std::vector<HybridMeasure>& fibers() const { return fibers_; }

  // sup_x eta^x(X)
  double max_fiber_mass() const;
  DigraphMeasure scaled(double c) const;
  bool is_positive(double tol = 0.0) const;

private:
  Partition partition_;
  std::vector<HybridMeasure> fibers_;
};

inline const HybridMeasure& fiber(const DigraphMeasure& eta, double x) { return eta.fiber(x); }

// min over fibers of the density floor (0 when some fiber has no density part).
double ac_lower_bound(const DigraphMeasure& eta);

// B_ip = mu(A_i) * eta^{x_i}(A_p), atoms assigned to their containing cell.
std::vector<std::vector<double>> block_mass_matrix(const DigraphMeasure& eta);
std::vector<std::vector<double>> transpose_blocks(const std::vector<std::vector<double>>& B);
double symmetry_defect(const DigraphMeasure& eta);

double sup_bl_distance(const DigraphMeasure& eta, const DigraphMeasure& xi, std::size_t M_eval = 2048);
double sup_tv_distance(const DigraphMeasure& eta, const DigraphMeasure& xi);

}  // namespace coevo
