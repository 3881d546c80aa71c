#include "coevo/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "rk4.hpp"

namespace coevo {

namespace {

struct SingularLink {
  std::size_t cell;
  double weight;
};

// eta_0^{x_i} seen through the cells of nu's partition.
struct EtaLinks {
  std::vector<HybridMeasure> fibers;          // eta_0^{x_i}
  std::vector<std::vector<double>> ac_mass;   // [i][p] = eta_0^{x_i,a}(A_p)
  std::vector<std::vector<SingularLink>> singular;
};

EtaLinks link_eta(const DigraphMeasure& eta0, const Partition& xpart, const Partition& ypart) {
  EtaLinks L;
  const std::size_t m = xpart.size(), my = ypart.size();
  L.ac_mass.assign(m, std::vector<double>(my, 0.0));
  L.singular.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& f = eta0.fiber(xpart.representative(i));
    if (!f.is_positive()) throw std::invalid_argument("eta0 must be a positive digraph measure");
    L.fibers.push_back(f);
    if (f.has_density()) {
      const auto ac = f.ac_part();
      for (std::size_t p = 0; p < my; ++p) L.ac_mass[i][p] = ac.mass_in(ypart.lower(p), ypart.upper(p));
    }
    for (const auto& a : f.atoms())
      if (a.weight != 0.0) L.singular[i].push_back({ypart.index_of(a.position), a.weight});
  }
  return L;
}

HybridMeasure eta_fiber(const HybridMeasure& f0, double decay, const std::vector<double>& offset, Space space) {
  return f0.scaled(decay) + HybridMeasure(space, {}, offset);
}

void fill_moments(std::vector<Moments>& mom, const std::vector<std::vector<double>>& pos,
                  const std::vector<std::vector<double>>& w) {
  for (std::size_t p = 0; p < mom.size(); ++p) {
    mom[p].clear();
    for (std::size_t a = 0; a < pos[p].size(); ++a) mom[p].add(pos[p][a], w[p][a]);
  }
}

}  // namespace

DigraphMeasure HybridTrajectory::eta_dgm(std::size_t snapshot, std::size_t atom) const {
  std::vector<HybridMeasure> f;
  for (std::size_t i = 0; i < partition.size(); ++i) f.push_back(eta.at(snapshot).at(i).at(atom));
  return DigraphMeasure(partition, std::move(f));
}

HybridTrajectory characteristic_flow(const AtomicFamily& phi0, const DigraphMeasure& eta0, const MeasurePath& nu,
                                     const ModelSpec& model, const NodeRates& omega_cells, double T, double dt,
                                     const FlowOptions& opt) {
  model.validate();
  if (nu.nodes() == 0 || nu.end_time() < T * (1.0 - 1e-12)) throw std::invalid_argument("characteristic_flow: nu path is shorter than T");
  if (!nu.partition.is_uniform()) throw std::invalid_argument("characteristic_flow: nu needs a uniform vertex partition");
  const auto [K, h] = step_plan(T, dt);
  const Partition& xpart = phi0.partition;
  const std::size_t m = xpart.size(), my = nu.cells();
  const Space xspace = xpart.space();
  const auto links = link_eta(eta0, xpart, nu.partition);
  const double eps = model.epsilon;
  const int kmax = std::max(model.g.max_harmonic(), model.h.max_harmonic());

  std::vector<std::size_t> cell_of, first(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    first[i + 1] = first[i] + phi0.cells[i].size();
    for (std::size_t a = 0; a < phi0.cells[i].size(); ++a) cell_of.push_back(i);
  }
  const std::size_t A = cell_of.size();
  std::vector<double> mu(my);
  for (std::size_t p = 0; p < my; ++p) mu[p] = nu.partition.measure(p);

  std::vector<double> y(A + A * my, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < phi0.cells[i].size(); ++a) y[first[i] + a] = wrap_phase(phi0.cells[i][a].position);

  std::vector<Moments> mom(my, Moments(kmax));
  std::vector<std::vector<double>> pos;
  std::vector<double> sa(static_cast<std::size_t>(kmax) + 1), ca(static_cast<std::size_t>(kmax) + 1), G(my);
  auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& ds) {
    nu.positions_at(t, pos);
    fill_moments(mom, pos, nu.weights);
    const double decay = std::exp(-eps * t);
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t i = cell_of[a];
      harmonics(s[a], kmax, sa, ca);
      const double* E = s.data() + A + a * my;
      double* dE = ds.data() + A + a * my;
      double initial = 0.0, memory = 0.0;
      for (std::size_t p = 0; p < my; ++p) {
        G[p] = model.g.convolve(mom[p], sa, ca);
        initial += links.ac_mass[i][p] * G[p];
        memory += E[p] * mu[p] * G[p];
        dE[p] = -eps * E[p] - eps * model.h.convolve(mom[p], sa, ca);
      }
      for (const auto& l : links.singular[i]) initial += l.weight * G[l.cell];
      ds[a] = omega_cells(t, i) + decay * initial + memory;
    }
  };

  HybridTrajectory out;
  out.partition = xpart;
  out.times = uniform_times(K, h);
  auto record = [&](std::size_t k) {
    std::vector<std::vector<double>> ph(m);
    for (std::size_t i = 0; i < m; ++i) ph[i].assign(y.begin() + static_cast<std::ptrdiff_t>(first[i]), y.begin() + static_cast<std::ptrdiff_t>(first[i + 1]));
    out.phases.push_back(std::move(ph));
    if (opt.eta_every == 0 || (k % opt.eta_every != 0 && k != K)) return;
    const double decay = std::exp(-eps * out.times[k]);
    std::vector<std::vector<HybridMeasure>> snap(m);
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t i = cell_of[a];
      std::vector<double> E(y.begin() + static_cast<std::ptrdiff_t>(A + a * my), y.begin() + static_cast<std::ptrdiff_t>(A + (a + 1) * my));
      snap[i].push_back(eta_fiber(links.fibers[i], decay, E, xspace));
    }
    out.eta_nodes.push_back(k);
    out.eta.push_back(std::move(snap));
  };
  record(0);
  detail::Rk4 rk(y.size());
  for (std::size_t k = 0; k < K; ++k) {
    rk.step(rhs, out.times[k], h, y);
    detail::require_finite(y, k + 1, "characteristic_flow");
    for (std::size_t a = 0; a < A; ++a) y[a] = wrap_phase(y[a]);
    record(k + 1);
  }
  return out;
}

std::vector<DigraphMeasure> reconstruct_eta(const DigraphMeasure& eta0, const MeasurePath& nu, const Partition& xpart,
                                            const std::vector<std::vector<double>>& phi_path, const ModelSpec& model) {
  model.validate();
  if (phi_path.size() != nu.nodes()) throw std::invalid_argument("reconstruct_eta: phase path and nu have different time grids");
  if (!nu.partition.is_uniform()) throw std::invalid_argument("reconstruct_eta: nu needs a uniform vertex partition");
  const std::size_t m = xpart.size(), my = nu.cells();
  const auto links = link_eta(eta0, xpart, nu.partition);
  const double eps = model.epsilon, h = nu.dt();
  const int kmax = model.h.max_harmonic();
  std::vector<Moments> mom(my, Moments(kmax));
  std::vector<double> sa(static_cast<std::size_t>(kmax) + 1), ca(static_cast<std::size_t>(kmax) + 1);

  auto forcing = [&](std::size_t k, std::vector<std::vector<double>>& H) {
    fill_moments(mom, nu.positions[k], nu.weights);
    H.assign(m, std::vector<double>(my));
    for (std::size_t i = 0; i < m; ++i) {
      harmonics(phi_path[k][i], kmax, sa, ca);
      for (std::size_t p = 0; p < my; ++p) H[i][p] = model.h.convolve(mom[p], sa, ca);
    }
  };

  std::vector<DigraphMeasure> out;
  std::vector<std::vector<double>> I(m, std::vector<double>(my, 0.0)), Hprev, Hcur;
  forcing(0, Hprev);
  const double step_decay = std::exp(-eps * h);
  for (std::size_t k = 0; k < nu.nodes(); ++k) {
    if (k > 0) {
      forcing(k, Hcur);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < my; ++p)
          I[i][p] = step_decay * I[i][p] + 0.5 * h * (step_decay * Hprev[i][p] + Hcur[i][p]);
      std::swap(Hprev, Hcur);
    }
    const double decay = std::exp(-eps * nu.times[k]);
    std::vector<HybridMeasure> fibers;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> off(my);
      for (std::size_t p = 0; p < my; ++p) off[p] = -eps * I[i][p];
      fibers.push_back(eta_fiber(links.fibers[i], decay, off, xpart.space()));
    }
    out.emplace_back(xpart, std::move(fibers));
  }
  return out;
}

HybridMeasure pushforward(const HybridMeasure& nu0_fiber, std::span<const double> flowed_positions) {
  if (nu0_fiber.has_density()) throw std::invalid_argument("pushforward: the fiber must be purely atomic");
  const auto atoms = nu0_fiber.atoms();
  if (atoms.size() != flowed_positions.size())
    throw std::invalid_argument("pushforward: " + std::to_string(atoms.size()) + " atoms but " +
                                std::to_string(flowed_positions.size()) + " flowed positions");
  std::vector<Atom> out(atoms.size());
  for (std::size_t a = 0; a < atoms.size(); ++a) out[a] = {flowed_positions[a], atoms[a].weight};
  return HybridMeasure(nu0_fiber.space(), std::move(out));
}

FixedPointResult solve_vlasov_fixed_point(const AtomicFamily& nu0, const DigraphMeasure& eta0, const ModelSpec& model,
                                          const NodeRates& omega_cells, double T, double dt, double tol,
                                          std::size_t max_iter, const FixedPointOptions& opt) {
  model.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("solve_vlasov_fixed_point: tol must be positive");
  double gamma = 0.0;
  for (std::size_t i = 0; i < nu0.size(); ++i) gamma = std::max(gamma, nu0.cell_mass(i));
  const double horizon = gamma > 0.0 ? positivity_horizon(ac_lower_bound(eta0), gamma, model.h, model.epsilon) : kInf;
  if (T > horizon * (1.0 + 1e-12))
    throw std::invalid_argument("solve_vlasov_fixed_point: T = " + std::to_string(T) + " is beyond the positivity horizon " +
                                std::to_string(horizon));
  const auto [K, h] = step_plan(T, dt);
  const auto times = uniform_times(K, h);

  FixedPointResult r;
  r.path = MeasurePath::constant(nu0, times);
  std::vector<HybridMeasure> initial;
  for (std::size_t i = 0; i < nu0.size(); ++i) initial.emplace_back(Space::circle, nu0.cells[i]);
  const std::size_t every = std::max<std::size_t>(1, opt.residual_every);

  for (std::size_t j = 0; j < max_iter; ++j) {
    const auto flow = characteristic_flow(nu0, eta0, r.path, model, omega_cells, T, h);
    MeasurePath next = r.path;
    next.positions = flow.phases;

    double defect = 0.0, residual = 0.0;
    for (std::size_t k = 0; k < next.nodes(); ++k) {
      const bool eval = k % every == 0 || k + 1 == next.nodes();
      for (std::size_t i = 0; i < next.cells(); ++i) {
        const auto f = pushforward(initial[i], next.positions[k][i]);
        defect = std::max(defect, std::abs(f.total_mass() - initial[i].total_mass()));
        if (eval) residual = std::max(residual, bl_distance(f, r.path.fiber(k, i), opt.M_eval));
      }
    }
    r.path = std::move(next);
    r.residuals.push_back(residual);
    r.mass_defects.push_back(defect);
    r.iterations = j + 1;
    r.residual = residual;
    if (residual < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

void write_residual_log(const FixedPointResult& r, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  os << "iteration,residual,mass_defect\n";
  char buf[96];
  for (std::size_t j = 0; j < r.residuals.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", j + 1, r.residuals[j], r.mass_defects[j]);
    os << buf;
  }
}

HybridMeasure DensityField::fiber(std::size_t snapshot, std::size_t cell) const {
  return HybridMeasure(Space::circle, {}, rho.at(snapshot).at(cell));
}

double DensityField::cell_mass(std::size_t snapshot, std::size_t cell) const {
  const auto& r = rho.at(snapshot).at(cell);
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

double pde_speed_bound(const ModelSpec& model, double eta0_norm, double fiber_mass, double T) {
  return model.omega.sup_norm(T) +
         model.g.sup_norm_bound() * fiber_mass * (eta0_norm + model.h.sup_norm_bound() * fiber_mass);
}

DensityField solve_vlasov_pde(const Partition& partition, const std::vector<std::vector<double>>& rho0,
                              const DigraphMeasure& eta0, const ModelSpec& model, const NodeRates& omega_cells, double T,
                              double dt, const PdeOptions& opt) {
  model.validate();
  const std::size_t m = partition.size();
  if (rho0.size() != m || m == 0) throw std::invalid_argument("solve_vlasov_pde: need one initial density per x-cell");
  const std::size_t M = rho0[0].size();
  if (M < 2) throw std::invalid_argument("solve_vlasov_pde: need at least two phase cells");
  double gamma = 0.0;
  for (const auto& r : rho0) {
    if (r.size() != M) throw std::invalid_argument("solve_vlasov_pde: all x-cells need the same phase grid");
    for (double v : r)
      if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("solve_vlasov_pde: initial density must be finite and nonnegative");
    gamma = std::max(gamma, std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(M));
  }
  const auto links = link_eta(eta0, partition, partition);
  double eta_norm = 0.0;
  for (const auto& f : links.fibers) eta_norm = std::max(eta_norm, f.total_mass());

  const auto [K, h] = step_plan(T, dt);
  const double dphi = 1.0 / static_cast<double>(M);
  const double vmax = pde_speed_bound(model, eta_norm, gamma, T);
  if (h * vmax > dphi)
    throw std::invalid_argument("solve_vlasov_pde: CFL violated, dt = " + std::to_string(h) + " exceeds dphi/max|V| = " +
                                std::to_string(dphi / vmax));

  const double eps = model.epsilon;
  const int kmax = std::max(model.g.max_harmonic(), model.h.max_harmonic());
  const auto W = static_cast<std::size_t>(kmax) + 1;
  // Exact cell integrals of sin/cos(2 pi k psi), and harmonics at faces (c+1)/M and centers.
  std::vector<double> cs(M * W), cc(M * W), fs(M * W), fc(M * W), ms(M * W), mc(M * W);
  for (std::size_t c = 0; c < M; ++c) {
    const double l = static_cast<double>(c) * dphi, r = l + dphi;
    cc[c * W] = dphi;
    for (std::size_t k = 1; k < W; ++k) {
      const double w = kTwoPi * static_cast<double>(k);
      cs[c * W + k] = (std::cos(w * l) - std::cos(w * r)) / w;
      cc[c * W + k] = (std::sin(w * r) - std::sin(w * l)) / w;
    }
    harmonics(r, kmax, {&fs[c * W], W}, {&fc[c * W], W});
    harmonics(l + 0.5 * dphi, kmax, {&ms[c * W], W}, {&mc[c * W], W});
  }
  std::vector<double> mu(m);
  for (std::size_t p = 0; p < m; ++p) mu[p] = partition.measure(p);

  auto rho = rho0;
  std::vector<std::vector<std::vector<double>>> E(m, std::vector<std::vector<double>>(m, std::vector<double>(M, 0.0)));
  std::vector<Moments> mom(m, Moments(kmax));
  std::vector<double> Gf(m * M), Hc(m * M), V(M), flux(M), Vc(M);

  DensityField out;
  out.partition = partition;
  out.M_phi = M;
  auto record = [&](std::size_t k) {
    const bool keep = k == 0 || k == K || (opt.snapshot_every > 0 && k % opt.snapshot_every == 0);
    if (!keep) return;
    out.times.push_back(static_cast<double>(k) * h);
    out.rho.push_back(rho);
  };
  record(0);

  for (std::size_t k = 0; k < K; ++k) {
    const double t = static_cast<double>(k) * h, decay = std::exp(-eps * t);
    for (std::size_t p = 0; p < m; ++p) {
      mom[p].clear();
      for (std::size_t c = 0; c < M; ++c) {
        const double r = rho[p][c];
        for (std::size_t q = 0; q < W; ++q) {
          mom[p].S[q] += r * cs[c * W + q];
          mom[p].C[q] += r * cc[c * W + q];
        }
      }
      for (std::size_t c = 0; c < M; ++c) {
        Gf[p * M + c] = model.g.convolve(mom[p], {&fs[c * W], W}, {&fc[c * W], W});
        Hc[p * M + c] = model.h.convolve(mom[p], {&ms[c * W], W}, {&mc[c * W], W});
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double w = omega_cells(t, i);
      for (std::size_t c = 0; c < M; ++c) {
        const std::size_t c1 = (c + 1) % M;
        double initial = 0.0, memory = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
          const double G = Gf[p * M + c];
          initial += links.ac_mass[i][p] * G;
          memory += 0.5 * (E[i][p][c] + E[i][p][c1]) * mu[p] * G;
        }
        for (const auto& l : links.singular[i]) initial += l.weight * Gf[l.cell * M + c];
        V[c] = w + decay * initial + memory;
        flux[c] = V[c] > 0.0 ? V[c] * rho[i][c] : V[c] * rho[i][c1];
      }
      for (std::size_t c = 0; c < M; ++c) Vc[c] = 0.5 * (V[c] + V[(c + M - 1) % M]);
      for (std::size_t p = 0; p < m; ++p) {
        auto& e = E[i][p];
        std::vector<double> next(M);
        for (std::size_t c = 0; c < M; ++c) {
          const std::size_t cl = (c + M - 1) % M, cr = (c + 1) % M;
          const double grad = Vc[c] > 0.0 ? (e[c] - e[cl]) : (e[cr] - e[c]);
          next[c] = e[c] - h / dphi * Vc[c] * grad - h * eps * (e[c] + Hc[p * M + c]);
        }
        e.swap(next);
      }
      std::vector<double> next(M);
      for (std::size_t c = 0; c < M; ++c) next[c] = rho[i][c] - h / dphi * (flux[c] - flux[(c + M - 1) % M]);
      rho[i].swap(next);
    }
    for (const auto& r : rho)
      for (double v : r)
        if (!std::isfinite(v)) throw std::runtime_error("solve_vlasov_pde: non-finite density at step " + std::to_string(k + 1));
    record(k + 1);
  }
  return out;
}

void write_density_csv(const DensityField& f, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  os << "time,x_cell,phi_cell,rho\n";
  char buf[96];
  for (std::size_t s = 0; s < f.times.size(); ++s)
    for (std::size_t i = 0; i < f.rho[s].size(); ++i)
      for (std::size_t c = 0; c < f.rho[s][i].size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.12g,%zu,%zu,%.17g\n", f.times[s], i, c, f.rho[s][i][c]);
        os << buf;
      }
}

}  // namespace coevo
