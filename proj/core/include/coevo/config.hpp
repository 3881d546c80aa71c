#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coevo/model.hpp"
#include "coevo/presets.hpp"

namespace coevo {

// Malformed or inconsistent configuration. line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct ExperimentConfig {
  Example example = Example::ring;

  // model
  double epsilon = 1.0;
  std::optional<FourierFunction> g, h;  // preset values when empty
  double omega_mean = 0.0;              // omega(t, x) = mean + amplitude cos(2 pi x)
  double omega_amplitude = 0.0;

  // initial phases
  std::string initial_mode = "quantile";  // quantile | random
  Nu0Spec nu0;
  std::uint64_t seed = 1;

  // run
  std::vector<std::size_t> N;       // finite-N levels
  std::vector<std::size_t> m, n;    // lattice levels, paired
  double T = 0.0;                   // absolute; 0 means T_fraction * T*
  double T_fraction = 1.0;
  double dt = 1e-3;
  double tol = 1e-4;
  std::size_t max_iter = 50;
  std::size_t M_eval = 2048;
  std::vector<double> times{0.5, 1.0};  // report times as fractions of T
  std::size_t ref_m = 64, ref_n = 64;
  std::size_t M_phi = 128;             // Vlasov PDE phase cells

  // output
  std::string output_dir = "out";
  std::size_t output_every = 10;

  bool operator==(const ExperimentConfig&) const = default;
};

// Preset defaults for `example` (levels, initial data).
ExperimentConfig default_config(Example e);

// Fills derived values (T absolute, dt dividing T) and checks consistency.
ExperimentConfig normalized(ExperimentConfig c);

ModelSpec model_of(const ExperimentConfig& c);

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
std::string emit_config(const ExperimentConfig& c);

}  // namespace coevo
