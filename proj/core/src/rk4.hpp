#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace coevo::detail {

// Classical fixed-step RK4 with reusable stage buffers.
class Rk4 {
public:
  explicit Rk4(std::size_t dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  // rhs(t, y, dy)
  template <class Rhs>
  void step(Rhs&& rhs, double t, double dt, std::vector<double>& y) {
    const std::size_t n = y.size();
    rhs(t, y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
    rhs(t + 0.5 * dt, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
    rhs(t + 0.5 * dt, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    rhs(t + dt, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

inline void require_finite(const std::vector<double>& y, std::size_t step, const char* what) {
  for (double v : y)
    if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + ": non-finite state at step " + std::to_string(step));
}

// Pairwise summation in a fixed tree order.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace coevo::detail
