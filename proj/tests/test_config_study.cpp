#include <doctest.h>

#include <stdexcept>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coevo/config.hpp"
#include "coevo/study.hpp"

using namespace coevo;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("coevo_tests_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small_ring() {
  auto c = default_config(Example::ring);
  c.N = {4, 8, 16};
  c.ref_m = 8;
  c.ref_n = 2;
  c.T_fraction = 0.5;
  c.dt = 0.01;
  c.M_eval = 256;
  return normalized(c);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COEVO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = normalized(default_config(Example::ring));
  CHECK(c.T == Approx(std::log(1.25)));
  CHECK(c.T_fraction == Approx(1.0));
  CHECK(c.N == std::vector<std::size_t>{16, 64, 256});
  CHECK(std::remainder(c.T, c.dt) == Approx(0.0).epsilon(1e-12));
  CHECK(c.dt <= 1e-3);
  CHECK(default_config(Example::tree).N.front() == 7);
  CHECK(parse_config_text("") == c);
}

TEST_CASE("unknown keys name the key and the line") {
  try {
    parse_config_text("example: ring\nrun:\n  N: [4, 8]\n  foo: 3\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("run.foo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("bogus: 1\n"), ConfigError);
}

TEST_CASE("malformed YAML reports a line") {
  try {
    parse_config_text("example: ring\nrun: [1, 2\n  N: 3\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() >= 2);
  }
}

TEST_CASE("inconsistent values") {
  CHECK_THROWS_AS(parse_config_text("example: tree\nrun:\n  N: [6]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model:\n  epsilon: -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("example: dense\nrun:\n  T_fraction: 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("initial:\n  mode: sideways\n"), ConfigError);
  try {
    require_tree_size(6);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("15") != std::string::npos);
  }
}

TEST_CASE("emit and parse round trip") {
  auto c = default_config(Example::dense);
  c.g = FourierFunction(0.1, {{1, 0.5, -0.25}, {3, 0.0, 0.125}});
  c.omega_mean = 0.3;
  c.omega_amplitude = 0.1;
  c.initial_mode = "random";
  c.seed = 42;
  c.nu0 = {Nu0Spec::Kind::wave, 0.2, 0.7};
  c.m = {4, 8};
  c.n = {2, 4};
  c.T_fraction = 0.75;
  c.times = {0.25, 1.0};
  c.output_dir = "some/where";
  const auto a = normalized(c);
  const auto b = parse_config_text(emit_config(a));
  CHECK(b == a);
  CHECK(emit_config(b) == emit_config(a));
}

TEST_CASE("model from config") {
  auto c = default_config(Example::tree);
  c.omega_mean = 1.0;
  c.omega_amplitude = 0.5;
  const auto m = model_of(c);
  CHECK(m.h == FourierFunction::neg_sin_squared());
  CHECK(m.omega(0.3, 0.0) == Approx(1.5));
  CHECK(m.omega(0.3, 0.5) == Approx(0.5));
}

TEST_CASE("cellwise metric") {
  const auto P2 = uniform_partition(Space::circle, 2), P4 = uniform_partition(Space::circle, 4);
  const DigraphMeasure coarse(P2, {HybridMeasure::dirac(Space::circle, 0.25), HybridMeasure::dirac(Space::circle, 0.75)});
  const DigraphMeasure fine(P4, {HybridMeasure::dirac(Space::circle, 0.25), HybridMeasure::dirac(Space::circle, 0.25),
                                 HybridMeasure::dirac(Space::circle, 0.75), HybridMeasure::dirac(Space::circle, 0.75)});
  CHECK(cellwise_bl(coarse, fine, 256) == Approx(0.0).epsilon(1e-14));
  CHECK(cellwise_bl(fine, coarse, 256) == Approx(0.0).epsilon(1e-14));
  const auto avg = vertex_average(fine);
  CHECK(avg.total_mass() == Approx(1.0));
  CHECK(avg.mass_in(0.7, 0.8) == Approx(0.5));
  const auto fd = finite_dgm({0.1, 0.6}, Space::interval);
  CHECK(fd.fiber(0.7).atoms()[0].position == 0.6);
}

TEST_CASE("finite states") {
  auto c = small_ring();
  const auto s = make_setup(c);
  const auto st = finite_state(s, 8);
  CHECK(st.weights == ring_weights(8));
  // curve nu0: phases follow 0.5 + 0.25 sin(2 pi x) sampled over each cell
  CHECK(st.phases[1] > 0.5);
  CHECK(st.phases[5] < 0.5);
  c.initial_mode = "random";
  c.seed = 7;
  const auto r1 = finite_state(make_setup(c), 8), r2 = finite_state(make_setup(c), 8);
  CHECK(r1.phases == r2.phases);
  c.seed = 8;
  CHECK(finite_state(make_setup(c), 8).phases != r1.phases);
}

TEST_CASE("study needs three levels") {
  auto c = small_ring();
  c.N = {4, 8};
  CHECK_THROWS_AS(convergence_study(c), std::invalid_argument);
}

TEST_CASE("reference failure writes the residual log") {
  auto c = small_ring();
  c.max_iter = 1;
  c.tol = 1e-14;
  c.output_dir = scratch("reffail").string();
  const auto s = make_setup(c);
  CHECK_THROWS_AS(reference_solution(s, 8, 2), ReferenceFailure);
  CHECK(fs::exists(fs::path(c.output_dir) / "reference_residuals.csv"));
}

TEST_CASE("example artifacts are deterministic") {
  auto c = small_ring();
  const auto da = scratch("det_a");
  c.output_dir = da.string();
  const auto ra = run_example(c);
  c.output_dir = scratch("det_b").string();
  const auto rb = run_example(c);
  CHECK(ra.rows.size() == 6);
  for (const char* f : {"report.csv", "reference_path.csv", "reference_residuals.csv", "trajectory_N_8.csv", "eta0_errors.csv"}) {
    const auto a = slurp(da / f);
    CHECK_MESSAGE(!a.empty(), f);
    CHECK_MESSAGE(a == slurp(fs::path(c.output_dir) / f), f);
  }
  CHECK(fs::exists(fs::path(c.output_dir) / "timing.csv"));
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch("cli");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("simulate --bogus") == 2);
  CHECK(run_cli("") == 2);
  {
    std::ofstream os(dir / "bad.yaml");
    os << "example: ring\nrun:\n  foo: 1\n";
  }
  CHECK(run_cli("simulate -c " + (dir / "bad.yaml").string()) == 2);
  CHECK(run_cli("simulate --N 4 --T 0.05 --dt 0.01 -o " + (dir / "sim").string()) == 0);
  CHECK(fs::exists(dir / "sim" / "trajectory_N_4.csv"));
  CHECK(run_cli("mfl --T 0.05 --dt 0.01 --ref-m 4 --ref-n 2 --max-iter 1 --tol 1e-14 -o " + (dir / "mfl").string()) == 1);
  CHECK(run_cli("example tree --N 6 -o " + (dir / "tree").string()) == 2);
}
