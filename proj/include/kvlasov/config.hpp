#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kvlasov/evolution.hpp"

namespace kvlasov {

// Flat key = value configuration. All lengths and times in units of M.
struct ExperimentConfig {
  double M = 1.0;
  double a_over_m = 0.05;
  WeightConfig weights;
  InitialDatum f0;
  std::size_t particles = 20000;
  std::string proposal = "gaussian";  // uniform | gaussian
  double t_end = 200.0;
  double h_t = 0.1;
  double slice_dt = 1.0;
  double rbar = 0.5;
  double rtol = 1e-10;
  double atol = 1e-12;
  double capture_margin = 1e-2;
  double escape_radius = 1e3;
  std::string strengthen = "symmetry";  // none | symmetry | coordinate
  std::uint64_t seed = 1;
  std::string out_dir = "kvlasov_out";
  unsigned threads = 0;

  // Tolerances and toolkit gates.
  double tol_identity = 1e-12;
  double tol_null = 1e-10;
  double tol_drift_e = 1e-9;
  double tol_drift_q = 1e-8;
  double tol_route = 1e-10;
  double tol_divergence = 0.01;
  double positivity_C = 0.5;
  double gate_model_band = 1.5;
  double gate_prop3 = 100.0;
  double gate_prop4 = 10.0;
  std::size_t identity_points = 2000;
  std::size_t identity_orbits = 32;
  double identity_orbit_t = 200.0;
  std::size_t scan_sigma = 20000;
  std::size_t scan_radii = 200;

  KerrParams params() const;
  EvolutionOptions evolution() const;
  SamplingOptions sampling() const;
  // Throws ConfigError. Returns warnings (regime notes) without failing.
  std::vector<std::string> validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Canonical form: every key, fixed order, shortest round-tripping numbers.
std::string serialize_config(const ExperimentConfig& c);
std::uint64_t fnv1a64(const std::string& s);
std::string config_hash(const ExperimentConfig& c);  // 16 hex digits of the canonical form

// Applies one key = value assignment; throws ConfigError on unknown keys or bad values.
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);

}  // namespace kvlasov
