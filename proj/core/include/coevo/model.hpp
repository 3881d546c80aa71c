#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace coevo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// f(u) = c0 + sum_k a_k sin(2 pi k u) + b_k cos(2 pi k u), 1-periodic.
struct FourierTerm {
  int k;
  double a;  // sin coefficient
  double b;  // cos coefficient
  bool operator==(const FourierTerm&) const = default;
};

// Per-harmonic moments of a weighted point set: S_k = sum w sin(2 pi k psi),
// C_k = sum w cos(2 pi k psi). Harmonic 0 holds the total weight in C.
struct Moments {
  std::vector<double> S, C;
  explicit Moments(int kmax = 0) : S(static_cast<std::size_t>(kmax) + 1, 0.0), C(static_cast<std::size_t>(kmax) + 1, 0.0) {}
  void clear();
  void add(double psi, double w);
  void add_scaled(const Moments& o, double c);
};

class FourierFunction {
public:
  FourierFunction() = default;
  FourierFunction(double c0, std::vector<FourierTerm> terms);

  static FourierFunction constant(double c) { return FourierFunction(c, {}); }
  static FourierFunction sin2pi(double amplitude = 1.0) { return FourierFunction(0.0, {{1, amplitude, 0.0}}); }
  static FourierFunction cos2pi(double amplitude = 1.0) { return FourierFunction(0.0, {{1, 0.0, amplitude}}); }
  // -sin^2(2 pi u) = -1/2 + (1/2) cos(4 pi u)
  static FourierFunction neg_sin_squared() { return FourierFunction(-0.5, {{2, 0.0, 0.5}}); }

  double c0() const { return c0_; }
  const std::vector<FourierTerm>& terms() const { return terms_; }
  int max_harmonic() const { return kmax_; }
  bool is_constant() const;

  double operator()(double u) const;

  double sup_norm_bound() const;      // |c0| + sum(|a|+|b|)
  double lipschitz_bound() const;     // 2 pi sum k(|a|+|b|)
  double bl_bound() const { return sup_norm_bound() + lipschitz_bound(); }
  double sup_norm_sampled(std::size_t samples = 4096) const;
  double positive_part_sup(std::size_t samples = 4096) const;
  // h(1-u) = h(u): no sine terms.
  bool is_symmetric() const;

  // sum over a point set of w * f(psi - phi), given the set's moments.
  double convolve(const Moments& m, double phi) const;
  // Same, with sin/cos of 2 pi k phi precomputed (index k).
  double convolve(const Moments& m, std::span<const double> sin_phi, std::span<const double> cos_phi) const;

  bool operator==(const FourierFunction&) const = default;

private:
  double c0_ = 0.0;
  std::vector<FourierTerm> terms_;
  int kmax_ = 0;
};

// sin/cos of 2 pi k phi for k = 0..kmax.
void harmonics(double phi, int kmax, std::span<double> s, std::span<double> c);

// Natural frequencies omega(t, x).
class OmegaSpec {
public:
  enum class Kind { constant, separable, tabulated };

  static OmegaSpec constant(double c);
  // omega(t, x) = time(t) * space(x), both 1-periodic Fourier series.
  static OmegaSpec separable(FourierFunction time, FourierFunction space);
  // values[k][i]: rate of cell i (of m equal cells) on [k dt, (k+1) dt); the last row extends to +inf.
  static OmegaSpec tabulated(std::size_t cells, double dt, std::vector<std::vector<double>> values);

  Kind kind() const { return kind_; }
  double operator()(double t, double x) const;
  double sup_norm(double T) const;

  double constant_value() const { return c_; }
  const FourierFunction& time_factor() const { return time_; }
  const FourierFunction& space_factor() const { return space_; }
  std::size_t table_cells() const { return cells_; }
  double table_dt() const { return dt_; }
  const std::vector<std::vector<double>>& table() const { return table_; }

private:
  Kind kind_ = Kind::constant;
  double c_ = 0.0;
  FourierFunction time_, space_;
  std::size_t cells_ = 0;
  double dt_ = 0.0;
  std::vector<std::vector<double>> table_;
};

struct ModelSpec {
  double epsilon = 1.0;
  FourierFunction g = FourierFunction::sin2pi();
  FourierFunction h = FourierFunction::constant(-1.0);
  OmegaSpec omega = OmegaSpec::constant(0.0);

  void validate() const;
};

struct StabilityConstants {
  double L1 = 0, L2 = 0, L3 = 0, L4 = 0, C1 = 0, C2 = 0;
  double K1 = 0, K2 = 0, K3 = 0, K4 = 0, K5 = 0;
};

// (1/eps) log(1 + beta / (gamma ||h+||)), +inf when h+ vanishes.
double positivity_horizon(double beta, double gamma, const FourierFunction& h, double epsilon);
// beta / (||h+|| (e^{eps T} - 1)), +inf when h+ vanishes.
double gamma_bound(double beta, double T, const FourierFunction& h, double epsilon);

StabilityConstants stability_constants(const ModelSpec& model, double eta0_norm, double nu_bound, double T);

inline double eval(const FourierFunction& f, double u) { return f(u); }

}  // namespace coevo
