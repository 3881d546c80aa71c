#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "coevo/digraph.hpp"
#include "coevo/dynamics.hpp"
#include "coevo/presets.hpp"
#include "coevo/study.hpp"

using namespace coevo;
using doctest::Approx;

namespace {

DigraphMeasure ring_on(std::size_t m) {
  const auto P = uniform_partition(Space::circle, m);
  std::vector<HybridMeasure> f;
  for (std::size_t i = 0; i < m; ++i) f.push_back(HybridMeasure::dirac(Space::circle, P.representative(i), 2.0));
  return DigraphMeasure(P, f);
}

DigraphMeasure random_dgm(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto P = uniform_partition(Space::interval, m);
  std::vector<HybridMeasure> f;
  for (std::size_t i = 0; i < m; ++i)
    f.emplace_back(Space::interval, std::vector<Atom>{{u(rng), u(rng)}}, std::vector<double>{u(rng), u(rng), u(rng), u(rng)});
  return DigraphMeasure(P, f);
}

}  // namespace

TEST_CASE("uniform partitions") {
  const auto one = uniform_partition(Space::interval, 1);
  CHECK(one.size() == 1);
  CHECK(one.max_diameter() == 1.0);
  const auto four = uniform_partition(Space::circle, 4);
  CHECK(four.max_diameter() == Approx(0.25));
  CHECK(four.representative(1) == Approx(0.375));
  CHECK(four.index_of(0.999) == 3);
  CHECK(four.index_of(1.0) == 0);
  CHECK(uniform_partition(Space::interval, 4).index_of(1.0) == 3);
  CHECK_THROWS(Partition(Space::interval, {0.0, 0.6, 0.5, 1.0}));
}

TEST_CASE("fibers") {
  const auto ring = ring_on(8);
  const auto& f = fiber(ring, 0.3);  // cell 2, representative 5/16
  CHECK(f.atoms().size() == 1);
  CHECK(f.atoms()[0].position == Approx(5.0 / 16.0));
  CHECK(f.atoms()[0].weight == 2.0);
  const auto tree = make_preset(Example::tree);
  const auto t = tree.eta0(0.8);
  CHECK(t.atoms().size() == 1);
  CHECK(t.atoms()[0].position == Approx(0.4));
  CHECK(t.total_mass() == 1.0);
  const auto P = uniform_partition(Space::interval, 3);
  const DigraphMeasure c(P, std::vector<HybridMeasure>(3, HybridMeasure::uniform(Space::interval, 1.0)));
  CHECK(tv_distance(c.fiber(0.1), c.fiber(0.9)) == 0.0);
}

TEST_CASE("a.c. lower bound") {
  CHECK(ac_lower_bound(ring_on(5)) == 0.0);
  const auto dense = make_preset(Example::dense, 256);
  const auto P = uniform_partition(Space::interval, 16);
  const auto eta = eta0_on(dense, P);
  CHECK(ac_lower_bound(eta) >= 0.25);
  const DigraphMeasure mixed(uniform_partition(Space::interval, 2),
                             {HybridMeasure(Space::interval, {{0.2, 1.0}}, {0.3}), HybridMeasure(Space::interval, {}, {0.5, 0.7})});
  CHECK(ac_lower_bound(mixed) == Approx(0.3));
  CHECK(ac_lower_bound(mixed.scaled(2.5)) == Approx(0.75));
}

TEST_CASE("symmetry defect at block level") {
  const auto P = uniform_partition(Space::interval, 3);
  const DigraphMeasure uni(P, std::vector<HybridMeasure>(3, HybridMeasure::uniform(Space::interval, 1.0)));
  CHECK(symmetry_defect(uni) == Approx(0.0).epsilon(1e-15));
  const auto P2 = uniform_partition(Space::interval, 2);
  const DigraphMeasure one(P2, {HybridMeasure::dirac(Space::interval, P2.representative(1)), HybridMeasure(Space::interval)});
  CHECK(symmetry_defect(one) == Approx(0.5));
  CHECK(symmetry_defect(ring_on(6)) == 0.0);
}

TEST_CASE("block transpose is an involution; sup_bl never exceeds sup_tv") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const auto a = random_dgm(rng, 4), b = random_dgm(rng, 4);
    const auto B = block_mass_matrix(a);
    CHECK(transpose_blocks(transpose_blocks(B)) == B);
    CHECK(sup_bl_distance(a, b, 512) <= sup_tv_distance(a, b) + 1e-12);
    CHECK(sup_bl_distance(a, a, 512) == 0.0);
    CHECK(sup_tv_distance(a, a) == 0.0);
  }
}

TEST_CASE("sup_tv with one differing atom") {
  const auto P = uniform_partition(Space::interval, 2);
  const DigraphMeasure a(P, {HybridMeasure::dirac(Space::interval, 0.3), HybridMeasure(Space::interval)});
  const DigraphMeasure b(P, {HybridMeasure(Space::interval, {{0.3, 1.0}, {0.8, 0.4}}), HybridMeasure(Space::interval)});
  CHECK(sup_tv_distance(a, b) == Approx(0.4));
}

TEST_CASE("ring matrix fibers approach 2 delta_x") {
  const auto ring = make_preset(Example::ring);
  double prev = kInf;
  for (std::size_t N : {16, 64, 256}) {
    const auto eta = dgm_from_matrix(ring_weights(N), N, Space::circle);
    CHECK(eta.max_fiber_mass() == Approx(2.0));
    const double e = sampled_sup_bl([&](double x) { return eta.fiber(x); }, ring.eta0, Space::circle, 4 * N, 2048);
    CHECK(e <= 4.0 / static_cast<double>(N));
    CHECK(e < prev);
    prev = e;
  }
}
