#pragma once

#include <string>
#include <vector>

#include "kvlasov/config.hpp"
#include "kvlasov/evolution.hpp"
#include "kvlasov/io.hpp"

namespace kvlasov {

inline constexpr const char* kToolkitVersion = "0.3.0";

enum ExitCode : int { kExitPass = 0, kExitViolation = 1, kExitConfig = 2, kExitNumerical = 3 };

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;  // measured quantity (residual, ratio, count)
  double limit = 0.0;  // tolerance or gate it is compared against
  std::string detail;
};
json to_json(const CheckResult& c);

struct RunOptions {
  bool deterministic = false;     // scalar kernels, fixed-order reduction
  double christoffel_fault = 0.0;  // test fixture only
  std::string out_dir;            // overrides the config value when set
};

struct CommandReport {
  std::string command;
  int exit_code = kExitPass;
  std::vector<CheckResult> checks;
  json summary = json::object();
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

// ---- analysis shared with the acceptance suite ----

std::vector<CheckResult> identity_checks(const ExperimentConfig& cfg, const RunOptions& opt);

Ensemble sample_from_config(const ExperimentConfig& cfg, std::size_t N, std::uint64_t seed);

struct EnergySummary {
  double sup_model_literal = 0.0;  // sup_t E(t)/E(0)
  double sup_model_nu = 0.0;
  double sup_model_sym = 0.0;
  double sup_tchi = 0.0, sup_tperp = 0.0;
  double mode_ratio_min = 0.0, mode_ratio_max = 0.0;  // E_model coordinate / symmetry factor, nu measure
};
EnergySummary summarize_energy(const EvolutionResult& r, std::size_t last_slice, int group = -1);

struct MorawetzSummary {
  std::vector<double> T, I, I_cut, I_rtilde;  // cumulative from 0
  double E0 = 0.0;                            // E_model3 (nu form) at t = 0
  bool nondecreasing = true;
};
MorawetzSummary summarize_morawetz(const EvolutionResult& r);

// Spherical photon orbit states near r = 3M at the configured spin.
Ensemble trapped_ensemble(const KerrParams& p, std::size_t n, std::uint64_t seed);

struct CoreEstimates {
  double prop1_min_energy = 0.0;   // min over slices of E^{T_chi}
  double prop1_causal_max = 0.0;   // max over the scan of g(T_chi, T_chi)
  std::size_t prop2_violations = 0;
  std::size_t prop2_evaluations = 0;
  double prop2_min = 0.0;          // min sampled Sigma Pi_A
  double prop3_C = 0.0;            // |slab Pi_Tchi| / ((|a|/M) slab Pi_A)
  double prop4_C = 0.0;            // max_t |E^A| / E^{T_chi}
  bool prop1 = false, prop2 = false, prop3 = false, prop4 = false;
};
CoreEstimates core_estimates(const ExperimentConfig& cfg, const EvolutionResult& r, std::size_t n_states);

// Same fixed-seed pointwise scan as core-estimates prop2.
PositivityScan morawetz_density_scan(const KerrParams& p, const WeightConfig& w, std::size_t n_states,
                                     std::uint64_t seed);
double tchi_causality_max(const KerrParams& p, const WeightConfig& w, std::size_t n_r, std::size_t n_th);

// ---- subcommands ----

CommandReport cmd_check_identities(const ExperimentConfig& cfg, const RunOptions& opt);
CommandReport cmd_energy(const ExperimentConfig& cfg, const RunOptions& opt);
CommandReport cmd_morawetz(const ExperimentConfig& cfg, const RunOptions& opt);
CommandReport cmd_scan_weights(const ExperimentConfig& cfg, const RunOptions& opt);
CommandReport cmd_core_estimates(const ExperimentConfig& cfg, const RunOptions& opt);
CommandReport cmd_sample(const ExperimentConfig& cfg, const RunOptions& opt);

// Writes manifest.json for a finished command; returns its path.
std::string write_manifest(const ExperimentConfig& cfg, const RunOptions& opt, const CommandReport& rep,
                           double seconds);

}  // namespace kvlasov
