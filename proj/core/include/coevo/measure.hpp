#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coevo {

// Underlying one-dimensional space: the circle T = [0,1) or the interval [0,1].
enum class Space { circle, interval };

const char* to_string(Space s);

// Reduces a phase to [0,1).
double wrap_phase(double x);

// d^T on the circle, |x - y| on the interval.
double distance(Space s, double x, double y);
inline double circle_distance(double x, double y) { return distance(Space::circle, x, y); }

// Index of the uniform M-cell grid cell containing x. Clamps 1.0 into the last cell.
std::size_t cell_index(double x, std::size_t M);

struct Atom {
  double position;
  double weight;
};

// Finite signed measure: atoms (singular part) plus a piecewise-constant density
// on a uniform grid (absolutely continuous part, per unit length).
class HybridMeasure {
public:
  explicit HybridMeasure(Space space = Space::circle);
  HybridMeasure(Space space, std::vector<Atom> atoms, std::vector<double> density = {});

  static HybridMeasure dirac(Space space, double position, double weight = 1.0);
  static HybridMeasure uniform(Space space, double mass, std::size_t cells = 1);

  Space space() const { return space_; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const double> density() const { return density_; }
  std::size_t grid_size() const { return density_.size(); }
  bool has_density() const { return !density_.empty(); }

  double singular_mass() const;
  double ac_mass() const;
  double total_mass() const { return singular_mass() + ac_mass(); }
  // Minimum density value; 0 when there is no density part.
  double min_density() const;
  bool is_positive(double tol = 0.0) const;

  // Mass in the half-open interval [lo, hi) (hi == 1 closes it on the interval).
  double mass_in(double lo, double hi) const;

  HybridMeasure scaled(double c) const;
  // Density re-expressed on an M-cell grid (must be a multiple of the current grid).
  HybridMeasure refined(std::size_t M) const;
  // Density replaced by its cell averages on an arbitrary M-cell grid (mass preserving).
  HybridMeasure regridded(std::size_t M) const;
  HybridMeasure singular_part() const { return HybridMeasure(space_, atoms_, {}); }
  HybridMeasure ac_part() const { return HybridMeasure(space_, {}, density_); }

  friend HybridMeasure operator+(const HybridMeasure& a, const HybridMeasure& b);
  friend HybridMeasure operator-(const HybridMeasure& a, const HybridMeasure& b);
  friend HybridMeasure operator*(double c, const HybridMeasure& a) { return a.scaled(c); }

private:
  Space space_;
  std::vector<Atom> atoms_;
  std::vector<double> density_;
};

double total_mass(const HybridMeasure& mu);

// |mu - nu|(X), computed exactly on the representation.
double tv_distance(const HybridMeasure& mu, const HybridMeasure& nu);

// Signed cell weights of mu on the uniform M_eval grid.
std::vector<double> project_to_grid(const HybridMeasure& mu, std::size_t M_eval);

// Exact optimum of  max sum_k f_k w_k  s.t. |f_k| <= 1, |f_{k+1} - f_k| <= 1/M
// where M = w.size(); adjacency wraps on the circle.
double bl_dual_optimum(std::span<const double> w, Space space);

double bl_distance(const HybridMeasure& mu, const HybridMeasure& nu, std::size_t M_eval = 2048);

}  // namespace coevo
