#include "coevo/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace coevo {

void Moments::clear() {
  std::fill(S.begin(), S.end(), 0.0);
  std::fill(C.begin(), C.end(), 0.0);
}

void Moments::add(double psi, double w) {
  C[0] += w;
  const std::size_t K = S.size();
  if (K <= 1) return;
  const double s1 = std::sin(kTwoPi * psi), c1 = std::cos(kTwoPi * psi);
  double s = s1, c = c1;
  for (std::size_t k = 1; k < K; ++k) {
    S[k] += w * s;
    C[k] += w * c;
    const double sn = s * c1 + c * s1;
    c = c * c1 - s * s1;
    s = sn;
  }
}

void Moments::add_scaled(const Moments& o, double c) {
  for (std::size_t k = 0; k < S.size() && k < o.S.size(); ++k) {
    S[k] += c * o.S[k];
    C[k] += c * o.C[k];
  }
}

void harmonics(double phi, int kmax, std::span<double> s, std::span<double> c) {
  s[0] = 0.0;
  c[0] = 1.0;
  if (kmax < 1) return;
  const double s1 = std::sin(kTwoPi * phi), c1 = std::cos(kTwoPi * phi);
  s[1] = s1;
  c[1] = c1;
  for (int k = 2; k <= kmax; ++k) {
    s[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k - 1)] * c1 + c[static_cast<std::size_t>(k - 1)] * s1;
    c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k - 1)] * c1 - s[static_cast<std::size_t>(k - 1)] * s1;
  }
}

FourierFunction::FourierFunction(double c0, std::vector<FourierTerm> terms) : c0_(c0), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.k < 1) throw std::invalid_argument("Fourier harmonic index must be a positive integer, got " + std::to_string(t.k));
    if (!std::isfinite(t.a) || !std::isfinite(t.b)) throw std::invalid_argument("non-finite Fourier coefficient");
    kmax_ = std::max(kmax_, t.k);
  }
  if (!std::isfinite(c0_)) throw std::invalid_argument("non-finite Fourier constant term");
}

bool FourierFunction::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) { return t.a == 0.0 && t.b == 0.0; });
}

double FourierFunction::operator()(double u) const {
  double v = c0_;
  for (const auto& t : terms_) {
    const double x = kTwoPi * t.k * u;
    v += t.a * std::sin(x) + t.b * std::cos(x);
  }
  return v;
}

double FourierFunction::sup_norm_bound() const {
  double s = std::abs(c0_);
  for (const auto& t : terms_) s += std::abs(t.a) + std::abs(t.b);
  return s;
}

double FourierFunction::lipschitz_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.k * (std::abs(t.a) + std::abs(t.b));
  return kTwoPi * s;
}

double FourierFunction::sup_norm_sampled(std::size_t samples) const {
  double m = 0.0;
  for (std::size_t i = 0; i < samples; ++i) m = std::max(m, std::abs((*this)(static_cast<double>(i) / samples)));
  return m;
}

double FourierFunction::positive_part_sup(std::size_t samples) const {
  if (is_constant()) return std::max(c0_, 0.0);
  double m = 0.0;
  for (std::size_t i = 0; i < samples; ++i) m = std::max(m, (*this)(static_cast<double>(i) / samples));
  return m;
}

bool FourierFunction::is_symmetric() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) { return t.a == 0.0; });
}

// sin(2pi k(psi - phi)) = sin_psi cos_phi - cos_psi sin_phi
// cos(2pi k(psi - phi)) = cos_psi cos_phi + sin_psi sin_phi
double FourierFunction::convolve(const Moments& m, std::span<const double> sp, std::span<const double> cp) const {
  double v = c0_ * m.C[0];
  for (const auto& t : terms_) {
    const auto k = static_cast<std::size_t>(t.k);
    const double Sk = m.S[k], Ck = m.C[k];
    v += t.a * (Sk * cp[k] - Ck * sp[k]) + t.b * (Ck * cp[k] + Sk * sp[k]);
  }
  return v;
}

double FourierFunction::convolve(const Moments& m, double phi) const {
  std::vector<double> s(static_cast<std::size_t>(kmax_) + 1), c(static_cast<std::size_t>(kmax_) + 1);
  harmonics(phi, kmax_, s, c);
  return convolve(m, s, c);
}

OmegaSpec OmegaSpec::constant(double c) {
  OmegaSpec o;
  o.kind_ = Kind::constant;
  o.c_ = c;
  return o;
}

OmegaSpec OmegaSpec::separable(FourierFunction time, FourierFunction space) {
  OmegaSpec o;
  o.kind_ = Kind::separable;
  o.time_ = std::move(time);
  o.space_ = std::move(space);
  return o;
}

OmegaSpec OmegaSpec::tabulated(std::size_t cells, double dt, std::vector<std::vector<double>> values) {
  if (cells == 0 || values.empty() || !(dt > 0.0)) throw std::invalid_argument("tabulated omega needs cells, rows and dt > 0");
  for (const auto& row : values)
    if (row.size() != cells) throw std::invalid_argument("tabulated omega row has the wrong number of cells");
  OmegaSpec o;
  o.kind_ = Kind::tabulated;
  o.cells_ = cells;
  o.dt_ = dt;
  o.table_ = std::move(values);
  return o;
}

double OmegaSpec::operator()(double t, double x) const {
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::separable:
      return time_(t) * space_(x);
    case Kind::tabulated: {
      auto k = t <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(t / dt_ + 1e-9);
      k = std::min(k, table_.size() - 1);
      auto i = x <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(x * static_cast<double>(cells_));
      i = std::min(i, cells_ - 1);
      return table_[k][i];
    }
  }
  return 0.0;
}

double OmegaSpec::sup_norm(double T) const {
  switch (kind_) {
    case Kind::constant:
      return std::abs(c_);
    case Kind::separable:
      return time_.sup_norm_bound() * space_.sup_norm_bound();
    case Kind::tabulated: {
      double m = 0.0;
      const auto rows = std::min(table_.size(), static_cast<std::size_t>(std::max(0.0, T) / dt_) + 1);
      for (std::size_t k = 0; k < rows; ++k)
        for (double v : table_[k]) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

void ModelSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be a positive finite number");
}

double positivity_horizon(double beta, double gamma, const FourierFunction& h, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("positivity_horizon: epsilon must be positive");
  if (beta < 0.0) throw std::invalid_argument("positivity_horizon: beta must be nonnegative");
  if (!(gamma > 0.0)) throw std::invalid_argument("positivity_horizon: gamma must be positive");
  const double hp = h.positive_part_sup();
  if (hp == 0.0) return kInf;
  return std::log1p(beta / (gamma * hp)) / epsilon;
}

double gamma_bound(double beta, double T, const FourierFunction& h, double epsilon) {
  if (!(T > 0.0)) throw std::invalid_argument("gamma_bound: T must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("gamma_bound: epsilon must be positive");
  const double hp = h.positive_part_sup();
  if (hp == 0.0) return kInf;
  return beta / (hp * std::expm1(epsilon * T));
}

StabilityConstants stability_constants(const ModelSpec& model, double eta0_norm, double nu_bound, double T) {
  model.validate();
  for (double v : {eta0_norm, nu_bound, T})
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("stability_constants: inputs must be finite and nonnegative");
  const double eps = model.epsilon;
  const double g_inf = model.g.sup_norm_bound(), g_lip = model.g.lipschitz_bound(), g_bl = model.g.bl_bound();
  const double h_inf = model.h.sup_norm_bound(), h_lip = model.h.lipschitz_bound(), h_bl = model.h.bl_bound();
  const double nu = nu_bound, eta = eta0_norm;
  const double w_inf = model.omega.sup_norm(T);

  StabilityConstants k;
  k.L1 = w_inf + g_inf * nu * eta + (T * T / 2.0 + 1.0) * eps * g_inf * h_inf * nu * nu;
  k.C1 = g_lip * nu * (eta + h_inf * nu);
  k.C2 = eps * g_inf * h_lip * nu * nu;
  if (k.C1 > 0.0) {
    k.L2 = k.C1 + k.C2 / k.C1;
  } else if (k.C2 == 0.0) {
    k.L2 = 0.0;
  } else {
    throw std::domain_error("stability_constants: C1 = 0 while the h-Lipschitz term is positive; L2 is undefined");
  }
  k.L3 = g_bl * (nu * h_inf + eta) + g_inf * h_bl * nu * eps * T;
  k.L4 = nu * (g_lip * (eta + h_inf * nu) + g_inf * h_lip * nu * eps * T);
  // The K constants take the fiber-mass bound gamma as the measure-norm bound.
  const double gm = nu;
  k.K1 = T * gm;
  k.K2 = g_lip * gm;
  k.K3 = g_bl * (h_inf * gm + eta) + g_inf * h_bl * gm * eps * T;
  k.K4 = gm * (g_lip * (h_inf * gm + eta) + g_inf * h_lip * gm * eps * T);
  k.K5 = k.K3 + std::max(k.K2, k.K4);
  return k;
}

}  // namespace coevo
