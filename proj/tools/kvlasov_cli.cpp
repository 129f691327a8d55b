// kvlasov: numerical experiments for massless Vlasov fields on slowly
// rotating Kerr exteriors.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "kvlasov/experiments.hpp"

using namespace kvlasov;

namespace {

void print_report(const CommandReport& rep, const std::string& manifest) {
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& c : rep.checks)
    std::printf("%-4s %-32s value=%-12.4g limit=%-10.3g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.limit, c.detail.c_str());
  if (rep.summary.contains("first_failure"))
    std::printf("first failing check: %s\n", rep.summary["first_failure"].get<std::string>().c_str());
  std::printf("manifest: %s\n", manifest.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kvlasov: Vlasov energy and Morawetz experiments on Kerr"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> particles;
  std::optional<double> a_over_m, eps;
  std::string out;
  RunOptions opt;

  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed");
  app.add_flag("--deterministic", opt.deterministic, "scalar kernels and fixed-order reduction");
  app.add_option("--out", out, "output directory");
  app.add_option("--particles", particles, "ensemble size");
  app.add_option("--a-over-m", a_over_m, "spin a/M");
  app.add_option("--eps", eps, "weight parameter eps_e2");
  app.add_option("--christoffel-fault", opt.christoffel_fault, "test fixture: corrupt Gamma^theta_phiphi")
      ->group("");

  struct Sub {
    const char* name;
    const char* help;
    CommandReport (*fn)(const ExperimentConfig&, const RunOptions&);
  };
  const Sub subs[] = {
      {"check-identities", "geometry, contraction, measure, conservation and bulk-route checks", cmd_check_identities},
      {"energy", "evolve the ensemble and report energy time series", cmd_energy},
      {"morawetz", "accumulate the Morawetz bulk and saturation curve", cmd_morawetz},
      {"scan-weights", "weight profiles, eps ceiling, causality and boundedness scans", cmd_scan_weights},
      {"core-estimates", "four-line verdict on the core estimates", cmd_core_estimates},
      {"sample", "generate and write an ensemble", cmd_sample},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (particles) cfg.particles = *particles;
    if (a_over_m) cfg.a_over_m = *a_over_m;
    if (eps) cfg.weights.eps_e2 = *eps;
    if (!out.empty()) opt.out_dir = out;
    cfg.validate();

    for (const auto& s : subs) {
      if (!app.got_subcommand(s.name)) continue;
      const auto t0 = std::chrono::steady_clock::now();
      const CommandReport rep = s.fn(cfg, opt);
      const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      print_report(rep, write_manifest(cfg, opt, rep, sec));
      return rep.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
