#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "coevo/model.hpp"

using namespace coevo;
using doctest::Approx;

TEST_CASE("Fourier evaluation") {
  CHECK(eval(FourierFunction::sin2pi(), 0.25) == Approx(1.0));
  const auto h = FourierFunction::neg_sin_squared();
  CHECK(h(0.0) == Approx(0.0));
  for (double u : {0.1, 0.37, 0.5, 0.81}) {
    const double s = std::sin(kTwoPi * u);
    CHECK(h(u) == Approx(-s * s).epsilon(1e-14));
  }
  CHECK(FourierFunction::constant(-1.0)(0.42) == -1.0);
  CHECK_THROWS_AS(FourierFunction(0.0, {{0, 1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("norm and Lipschitz bounds dominate sampled values") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const FourierFunction f(u(rng), {{1, u(rng), u(rng)}, {3, u(rng), u(rng)}});
    double sup = 0.0, lip = 0.0;
    const int S = 10000;
    for (int k = 0; k < S; ++k) {
      const double x = static_cast<double>(k) / S, y = static_cast<double>(k + 1) / S;
      sup = std::max(sup, std::abs(f(x)));
      lip = std::max(lip, std::abs(f(y) - f(x)) * S);
    }
    CHECK(sup <= f.sup_norm_bound() + 1e-12);
    CHECK(lip <= f.lipschitz_bound() + 1e-9);
  }
}

TEST_CASE("convolution against moments equals the direct sum") {
  const FourierFunction f(0.3, {{1, 0.7, -0.2}, {2, 0.0, 0.5}});
  Moments m(2);
  const std::vector<std::pair<double, double>> atoms{{0.1, 0.5}, {0.45, 0.25}, {0.9, 1.5}};
  for (auto [p, w] : atoms) m.add(p, w);
  for (double phi : {0.0, 0.33, 0.71}) {
    double direct = 0.0;
    for (auto [p, w] : atoms) direct += w * f(p - phi);
    CHECK(f.convolve(m, phi) == Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("harmonic recurrence matches direct trig") {
  std::vector<double> s(6), c(6);
  harmonics(0.3141, 5, s, c);
  for (int k = 0; k <= 5; ++k) {
    CHECK(s[k] == Approx(std::sin(kTwoPi * k * 0.3141)).epsilon(1e-13));
    CHECK(c[k] == Approx(std::cos(kTwoPi * k * 0.3141)).epsilon(1e-13));
  }
}

TEST_CASE("positivity horizon") {
  CHECK(positivity_horizon(0.25, 1.0, FourierFunction::sin2pi(), 1.0) == Approx(std::log(1.25)).epsilon(1e-12));
  CHECK(std::isinf(positivity_horizon(0.25, 1.0, FourierFunction::constant(-1.0), 1.0)));
  CHECK(positivity_horizon(0.0, 3.0, FourierFunction::sin2pi(), 1.0) == 0.0);
  CHECK_THROWS_AS(positivity_horizon(0.25, 1.0, FourierFunction::sin2pi(), 0.0), std::invalid_argument);
  // monotone in beta, gamma and |h+|
  const auto h = FourierFunction::sin2pi();
  CHECK(positivity_horizon(0.3, 1.0, h, 1.0) > positivity_horizon(0.2, 1.0, h, 1.0));
  CHECK(positivity_horizon(0.3, 2.0, h, 1.0) < positivity_horizon(0.3, 1.0, h, 1.0));
  CHECK(positivity_horizon(0.3, 1.0, FourierFunction::sin2pi(2.0), 1.0) < positivity_horizon(0.3, 1.0, h, 1.0));
}

TEST_CASE("gamma bound inverts the horizon") {
  const auto h = FourierFunction::sin2pi();
  CHECK(gamma_bound(0.25, std::log(1.25), h, 1.0) == Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(gamma_bound(0.25, 1.0, FourierFunction::constant(-1.0), 1.0)));
  CHECK(gamma_bound(0.0, 1.0, h, 1.0) == 0.0);
  CHECK_THROWS_AS(gamma_bound(0.25, 0.0, h, 1.0), std::invalid_argument);
  for (double beta : {0.1, 0.5, 2.0})
    for (double gamma : {0.3, 1.0, 4.0})
      for (double eps : {0.5, 2.0}) {
        const double T = positivity_horizon(beta, gamma, h, eps);
        CHECK(gamma_bound(beta, T, h, eps) == Approx(gamma).epsilon(1e-12));
      }
}

TEST_CASE("stability constants") {
  ModelSpec ring;
  const auto k = stability_constants(ring, 2.0, 1.0, std::log(1.25));
  CHECK(k.C1 == Approx(6.0 * M_PI));
  CHECK(k.C2 == 0.0);
  CHECK(k.L2 == Approx(6.0 * M_PI));

  ModelSpec zero_g;
  zero_g.g = FourierFunction::constant(0.0);
  zero_g.omega = OmegaSpec::constant(0.7);
  const auto z = stability_constants(zero_g, 2.0, 1.0, 1.0);
  CHECK(z.L1 == Approx(0.7));
  CHECK(z.C1 == 0.0);
  CHECK(z.L2 == 0.0);
  CHECK(stability_constants(ring, 2.0, 0.0, 1.0).L1 == Approx(0.0));

  zero_g.h = FourierFunction::sin2pi();
  zero_g.g = FourierFunction::constant(1.0);  // Lip(g) = 0 so C1 = 0 while C2 > 0
  CHECK_THROWS(stability_constants(zero_g, 2.0, 1.0, 1.0));

  // plug-in of the closed-form norms for g = sin, h = sin, eta0 norm 3, nu bound 2, eps 0.5, T 0.3, omega 0.4
  ModelSpec d;
  d.epsilon = 0.5;
  d.h = FourierFunction::sin2pi();
  d.omega = OmegaSpec::constant(0.4);
  const double T = 0.3, e = 3.0, nu = 2.0, L = kTwoPi;
  const auto s = stability_constants(d, e, nu, T);
  const double C1 = L * nu * (e + nu), C2 = 0.5 * L * nu * nu;
  CHECK(s.L1 == Approx(0.4 + nu * e + (T * T / 2 + 1) * 0.5 * nu * nu));
  CHECK(s.C1 == Approx(C1));
  CHECK(s.C2 == Approx(C2));
  CHECK(s.L2 == Approx(C1 + C2 / C1));
  CHECK(s.L3 == Approx((1 + L) * (nu + e) + (1 + L) * nu * 0.5 * T));
  CHECK(s.L4 == Approx(nu * (L * (e + nu) + L * nu * 0.5 * T)));
  CHECK(s.K1 == Approx(T * nu));
  CHECK(s.K2 == Approx(L * nu));
}

TEST_CASE("omega specifications") {
  const auto c = OmegaSpec::constant(1.5);
  CHECK(c(0.3, 0.9) == 1.5);
  CHECK(c.sup_norm(1.0) == 1.5);
  const auto s = OmegaSpec::separable(FourierFunction::constant(2.0), FourierFunction(0.0, {{1, 0.0, 1.0}}));
  CHECK(s(0.0, 0.5) == Approx(-2.0));
  const auto t = OmegaSpec::tabulated(2, 0.1, {{1.0, 2.0}, {3.0, 4.0}});
  CHECK(t(0.15, 0.75) == 4.0);
  CHECK(t.sup_norm(0.05) == 2.0);
}
