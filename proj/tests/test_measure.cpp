#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "coevo/measure.hpp"
#include "oracles.hpp"

using namespace coevo;
using doctest::Approx;

TEST_CASE("total mass of atoms and densities") {
  CHECK(total_mass(HybridMeasure::dirac(Space::circle, 0.3)) == 1.0);
  CHECK(total_mass(HybridMeasure(Space::circle, {}, std::vector<double>(8, 1.0))) == Approx(1.0));
  // atoms scaled by e^{-eps t} = 1/2 plus uniform mass 1 - 1/2
  const double decay = std::exp(-std::log(2.0));
  const HybridMeasure mu(Space::circle, {{0.4, 2.0 * decay}}, {1.0 - decay});
  CHECK(total_mass(mu) == Approx(1.5).epsilon(1e-15));
}

TEST_CASE("total variation on Jordan parts") {
  CHECK(tv_distance(HybridMeasure::dirac(Space::circle, 0.2), HybridMeasure::dirac(Space::circle, 0.2)) == 0.0);
  const auto eta0 = HybridMeasure::dirac(Space::circle, 0.7, 2.0);
  CHECK(tv_distance(eta0, HybridMeasure::uniform(Space::circle, 1.0)) == Approx(3.0));
  const HybridMeasure eta_t(Space::circle, {{0.7, 1.0}}, {0.5});
  CHECK(tv_distance(eta_t, eta0) == Approx(1.5));
  // densities on different grids are compared on the common refinement
  const HybridMeasure a(Space::interval, {}, {1.0, 3.0});
  const HybridMeasure b(Space::interval, {}, {2.0, 2.0, 2.0});
  // |1-2| on [0,1/2), |3-2| on [1/2,1)
  CHECK(tv_distance(a, b) == Approx(1.0));
  CHECK_THROWS_AS(tv_distance(HybridMeasure(Space::circle), HybridMeasure(Space::interval)), std::invalid_argument);
}

TEST_CASE("projection onto the metric grid") {
  auto w = project_to_grid(HybridMeasure::dirac(Space::circle, 0.5), 4);
  CHECK(w == std::vector<double>{0.0, 0.0, 1.0, 0.0});
  w = project_to_grid(HybridMeasure::uniform(Space::circle, 1.0), 4);
  for (double v : w) CHECK(v == Approx(0.25));
  const HybridMeasure d(Space::circle, {{0.26, 1.0}, {0.24, -1.0}});
  w = project_to_grid(d, 2);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 0.0);
}

TEST_CASE("bounded Lipschitz distance closed forms") {
  const std::size_t M = 2048;
  CHECK(bl_distance(HybridMeasure::dirac(Space::circle, 0.3), HybridMeasure::dirac(Space::circle, 0.3), M) == 0.0);
  CHECK(std::abs(bl_distance(HybridMeasure::dirac(Space::circle, 0.1), HybridMeasure::dirac(Space::circle, 0.4), M) - 0.3) <=
        2.0 / M);
  CHECK(std::abs(bl_distance(HybridMeasure::dirac(Space::circle, 0.9), HybridMeasure::dirac(Space::circle, 0.05), M) - 0.15) <=
        2.0 / M);
  CHECK(std::abs(bl_distance(HybridMeasure::dirac(Space::circle, 0.6, 2.5), HybridMeasure::dirac(Space::circle, 0.6, 0.5), M) -
                 2.0) <= 2.0 / M);
  // on the interval there is no wrap
  CHECK(std::abs(bl_distance(HybridMeasure::dirac(Space::interval, 0.05), HybridMeasure::dirac(Space::interval, 0.9), M) -
                 0.85) <= 2.0 / M);
  CHECK_THROWS_AS(bl_distance(HybridMeasure(Space::circle), HybridMeasure(Space::interval), M), std::invalid_argument);
  CHECK_THROWS_AS(bl_distance(HybridMeasure(Space::circle), HybridMeasure(Space::circle), 1), std::invalid_argument);
}

TEST_CASE("dual chain optimum equals the vertex-enumeration LP on small grids") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t M = 2; M <= 6; ++M)
    for (int rep = 0; rep < 15; ++rep)
      for (Space s : {Space::circle, Space::interval}) {
        std::vector<double> w(M);
        for (auto& v : w) v = u(rng);
        if (rep % 3 == 0) w[rep % M] = 0.0;
        const double lp = oracle::bl_lp_vertices(w, s == Space::circle);
        CHECK(bl_dual_optimum(w, s) == Approx(lp).epsilon(1e-12));
      }
}

TEST_CASE("metric properties on random atomic measures") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_measure = [&](Space s) {
    std::vector<Atom> a(5);
    for (auto& x : a) x = {u(rng), u(rng)};
    return HybridMeasure(s, a, {u(rng), u(rng), u(rng)});
  };
  for (int rep = 0; rep < 20; ++rep)
    for (Space s : {Space::circle, Space::interval}) {
      const auto a = random_measure(s), b = random_measure(s), c = random_measure(s);
      const double ab = bl_distance(a, b, 512), ba = bl_distance(b, a, 512);
      CHECK(ab == Approx(ba).epsilon(1e-12));
      CHECK(ab <= tv_distance(a, b) + 1e-12);
      CHECK(ab <= bl_distance(a, c, 512) + bl_distance(c, b, 512) + 1e-12);
      CHECK(bl_distance(a, a, 512) == 0.0);
    }
}

TEST_CASE("circle distance and wrapping") {
  CHECK(circle_distance(0.1, 0.9) == Approx(0.2));
  CHECK(circle_distance(0.0, 0.5) == Approx(0.5));
  CHECK(wrap_phase(-0.25) == Approx(0.75));
  CHECK(wrap_phase(3.0) == 0.0);
  CHECK(distance(Space::interval, 0.1, 0.9) == Approx(0.8));
  CHECK(cell_index(1.0, 4) == 3);
  CHECK(cell_index(-0.5, 4) == 0);
  const HybridMeasure m(Space::circle, {{1.25, 1.0}});
  CHECK(m.atoms()[0].position == Approx(0.25));
  CHECK_THROWS_AS(HybridMeasure(Space::interval, {{1.5, 1.0}}), std::invalid_argument);
}

TEST_CASE("grid changes preserve mass") {
  const HybridMeasure m(Space::interval, {{0.3, 0.5}}, {1.0, 2.0, 4.0});
  CHECK(m.refined(6).total_mass() == Approx(m.total_mass()));
  CHECK(m.regridded(4).total_mass() == Approx(m.total_mass()));
  CHECK(m.regridded(4).density()[0] == Approx(1.0));
  CHECK(m.mass_in(0.0, 1.0 / 3.0) == Approx(1.0 / 3.0 + 0.5));
  CHECK(m.mass_in(0.25, 0.5) == Approx(0.5 + 1.0 / 12.0 + 1.0 / 3.0));
  CHECK_THROWS(m.refined(4));
  const auto sum = m + HybridMeasure(Space::interval, {}, {1.0, 1.0});
  CHECK(sum.grid_size() == 6);
  CHECK(sum.total_mass() == Approx(m.total_mass() + 1.0));
}
