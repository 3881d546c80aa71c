#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "coevo/meanfield.hpp"
#include "coevo/presets.hpp"
#include "coevo/study.hpp"

using namespace coevo;
using doctest::Approx;

namespace {

ModelSpec plain(double eps, FourierFunction h) {
  ModelSpec m;
  m.epsilon = eps;
  m.h = std::move(h);
  return m;
}

AtomicFamily one_atom_cells(const Partition& P, const std::vector<double>& phases) {
  AtomicFamily f{P, {}};
  for (double p : phases) f.cells.push_back({{p, 1.0}});
  return f;
}

DigraphMeasure empty_eta(const Partition& P) {
  return DigraphMeasure(P, std::vector<HybridMeasure>(P.size(), HybridMeasure(P.space())));
}

}  // namespace

TEST_CASE("flow without weights is free rotation") {
  const auto P = uniform_partition(Space::circle, 3);
  const auto phi0 = one_atom_cells(P, {0.1, 0.4, 0.8});
  const auto nu = MeasurePath::constant(phi0, uniform_times(10, 0.05));
  const auto fl = characteristic_flow(phi0, empty_eta(P), nu, plain(1.0, FourierFunction::constant(0.0)),
                                      constant_rates({0.1, 0.2, 0.3}), 0.5, 0.05, {5});
  CHECK(fl.phases.back()[0][0] == Approx(0.15));
  CHECK(fl.phases.back()[2][0] == Approx(0.95));
  CHECK(fl.eta_nodes == std::vector<std::size_t>{0, 5, 10});
  CHECK(fl.eta_dgm(2).max_fiber_mass() == 0.0);
}

TEST_CASE("flow toward a frozen atom matches a scalar RK4") {
  // one cell, nu frozen at delta_{0.5}, eta0 = w delta_{x}: phi' = w e^{-eps t} sin(2 pi (0.5 - phi))
  const auto P = uniform_partition(Space::circle, 1);
  const auto phi0 = one_atom_cells(P, {0.1});
  const auto nu = MeasurePath::constant(one_atom_cells(P, {0.5}), uniform_times(100, 0.01));
  const DigraphMeasure eta(P, {HybridMeasure::dirac(Space::circle, 0.5, 1.5)});
  const auto fl = characteristic_flow(phi0, eta, nu, plain(0.8, FourierFunction::constant(0.0)), constant_rates({0.0}), 1.0, 0.01);
  auto f = [](double t, double p) { return 1.5 * std::exp(-0.8 * t) * std::sin(kTwoPi * (0.5 - p)); };
  double p = 0.1, t = 0.0;
  const double h = 0.01;
  for (int k = 0; k < 100; ++k, t += h) {
    const double k1 = f(t, p), k2 = f(t + h / 2, p + h / 2 * k1), k3 = f(t + h / 2, p + h / 2 * k2), k4 = f(t + h, p + h * k3);
    p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(fl.phases.back()[0][0] == Approx(p).epsilon(1e-12));
}

TEST_CASE("recorded weights agree with the trapezoid reconstruction") {
  const auto P = uniform_partition(Space::circle, 4);
  const auto phi0 = discretize_nu(nu0_fibers({}), P, 1);
  const auto nu = MeasurePath::constant(discretize_nu(nu0_fibers({Nu0Spec::Kind::wave, 0.0, 0.5}), P, 8), uniform_times(400, 0.001));
  const auto model = plain(1.0, FourierFunction(0.2, {{1, 0.3, -0.4}}));
  const auto eta0 = eta0_on(make_preset(Example::ring), P);
  const auto fl = characteristic_flow(phi0, eta0, nu, model, constant_rates({0.3, 0.3, 0.3, 0.3}), 0.4, 0.001, {400});
  std::vector<std::vector<double>> path;
  for (const auto& ph : fl.phases) {
    path.emplace_back();
    for (const auto& c : ph) path.back().push_back(c[0]);
  }
  const auto rec = reconstruct_eta(eta0, nu, P, path, model);
  REQUIRE(rec.size() == 401);
  CHECK(sup_tv_distance(rec.back(), fl.eta_dgm(1)) < 1e-6);
  CHECK(sup_tv_distance(rec.front(), eta0) < 1e-15);
}

TEST_CASE("reconstructed weights under constant h") {
  // h = -1 and nu of mass 1 per cell: a.c. density grows as 1 - e^{-eps t}
  const auto P = uniform_partition(Space::circle, 2);
  const auto nu = MeasurePath::constant(one_atom_cells(P, {0.2, 0.7}), uniform_times(500, 0.002));
  const std::vector<std::vector<double>> path(501, {0.0, 0.5});
  const auto rec = reconstruct_eta(empty_eta(P), nu, P, path, plain(2.0, FourierFunction::constant(-1.0)));
  const double want = 1.0 - std::exp(-2.0);
  for (double d : rec.back().fiber_at(1).density()) CHECK(d == Approx(want).epsilon(1e-6));
}

TEST_CASE("pushforward") {
  const HybridMeasure f(Space::circle, {{0.1, 0.25}, {0.4, 0.75}});
  const std::vector<double> to{0.9, 0.3};
  const auto g = pushforward(f, to);
  CHECK(g.atoms()[0].position == 0.9);
  CHECK(g.atoms()[1].weight == 0.75);
  CHECK(g.total_mass() == f.total_mass());
  CHECK_THROWS_AS(pushforward(f, std::vector<double>{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(pushforward(HybridMeasure::uniform(Space::circle, 1.0), std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("fixed point of a synchronized state") {
  const auto P = uniform_partition(Space::circle, 4);
  const auto nu0 = discretize_nu([](double) { return HybridMeasure::dirac(Space::circle, 0.3); }, P, 2);
  const auto r = solve_vlasov_fixed_point(nu0, eta0_on(make_preset(Example::ring), P), ModelSpec{}, constant_rates({0, 0, 0, 0}),
                                          0.2, 0.01, 1e-12, 5);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.residual == 0.0);
  CHECK(r.mass_defects[0] == 0.0);
}

TEST_CASE("Picard residuals contract") {
  ExperimentConfig c = default_config(Example::ring);
  c.T_fraction = 1.0;
  c.dt = 5e-3;
  c.M_eval = 512;
  const auto s = make_setup(c);
  const auto nu0 = initial_atoms(s, 8, 4);
  const auto r = solve_vlasov_fixed_point(nu0, eta0_dgm(s, 8), s.model, finite_rates(s, 8), s.config.T, s.config.dt, 1e-9, 30,
                                          {512, 1});
  CHECK(r.converged);
  REQUIRE(r.residuals.size() >= 4);
  // the grid metric moves in steps of 1/(4 M_eval) per atom, so late iterates may repeat a value
  CHECK(r.residuals[1] < 0.2 * r.residuals[0]);
  for (std::size_t j = 0; j + 1 < r.residuals.size(); ++j) CHECK(r.residuals[j + 1] <= r.residuals[j]);
  for (double d : r.mass_defects) CHECK(d <= 1e-12);

  const auto capped = solve_vlasov_fixed_point(nu0, eta0_dgm(s, 8), s.model, finite_rates(s, 8), s.config.T, s.config.dt, 1e-9, 2,
                                               {512, 1});
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 2);
}

TEST_CASE("fixed point refuses times beyond the positivity horizon") {
  const auto dense = make_preset(Example::dense, 64);
  const auto P = uniform_partition(Space::interval, 4);
  const auto nu0 = discretize_nu(nu0_fibers({}), P, 1);
  ModelSpec m;
  m.h = dense.h;
  const double Tstar = positivity_horizon(ac_lower_bound(eta0_on(dense, P)), 1.0, m.h, 1.0);
  CHECK_THROWS_AS(solve_vlasov_fixed_point(nu0, eta0_on(dense, P), m, constant_rates({0, 0, 0, 0}), 2.0 * Tstar, 0.01, 1e-6, 3),
                  std::invalid_argument);
}

TEST_CASE("Vlasov PDE: uniform stays uniform, mass is conserved") {
  const auto P = uniform_partition(Space::circle, 3);
  const auto eta0 = eta0_on(make_preset(Example::ring), P);
  const auto model = plain(1.0, FourierFunction::sin2pi(0.5));
  const std::size_t M = 64;
  const std::vector<std::vector<double>> flat(3, std::vector<double>(M, 1.0));
  const auto u = solve_vlasov_pde(P, flat, eta0, model, constant_rates({0.3, 0.3, 0.3}), 0.2, 0.002);
  for (double v : u.rho.back()[1]) CHECK(v == Approx(1.0).epsilon(1e-12));

  std::vector<std::vector<double>> bump(3, std::vector<double>(M));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < M; ++c) bump[i][c] = 1.0 + 0.8 * std::cos(kTwoPi * ((c + 0.5) / M - 0.3 * i));
  const auto b = solve_vlasov_pde(P, bump, eta0, model, constant_rates({0.0, 0.1, -0.2}), 0.3, 0.002, {50});
  CHECK(b.times.size() == 4);
  for (std::size_t s = 0; s < b.times.size(); ++s)
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(b.cell_mass(s, i) == Approx(1.0).epsilon(1e-12));
      for (double v : b.rho[s][i]) CHECK(v >= 0.0);
    }
  CHECK_THROWS_AS(solve_vlasov_pde(P, bump, eta0, model, constant_rates({0, 0, 0}), 0.3, 0.1), std::invalid_argument);
}

TEST_CASE("Vlasov PDE agrees with a fine particle lattice") {
  ExperimentConfig c = default_config(Example::ring);
  c.nu0 = {Nu0Spec::Kind::wave, 0.5, 0.5};
  c.T_fraction = 1.0;
  c.dt = 1e-3;
  const auto s = make_setup(c);
  const std::size_t m = 4, M = 256;
  const auto P = vertex_partition(s, m);
  std::vector<std::vector<double>> rho0(m);
  for (std::size_t i = 0; i < m; ++i)
    for (double w : project_to_grid(cell_average(s.nu0, P, i), M)) rho0[i].push_back(w * M);
  const auto field = solve_vlasov_pde(P, rho0, eta0_dgm(s, m), s.model, finite_rates(s, m), s.config.T, 5e-4);
  const auto lat = run_lattice(s, m, 256);
  const auto emp = empirical_path(lat, P).at(lat.nodes() - 1);
  for (std::size_t i = 0; i < m; ++i) CHECK(bl_distance(field.fiber(field.times.size() - 1, i), emp.fiber_at(i), 1024) < 2e-2);
}
