#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kvlasov/geodesic_flow.hpp"
#include "kvlasov/vlasov_functionals.hpp"

namespace kvlasov {

// Energy series reported on slices.
enum SeriesId : int {
  kE_dt = 0,       // strengthened d_t energy
  kE_Tchi,         // strengthened T_chi energy
  kE_Tperp,        // strengthened T_perp energy
  kE_A,            // Morawetz field energy
  kE_model_lit,    // E_model,3 with coordinate factor, literal measure
  kE_model_nu,     // same integrand, slice measure
  kE_model_sym,    // slice measure, symmetry factor L^2
  kE_dt_plain,     // unstrengthened d_t energy
  kSeriesCount
};

// Slab integrands accumulated per interval between slices.
enum SlabId : int {
  kS_Tchi = 0,   // Pi_{T_chi}
  kS_Tchi_abs,   // |Pi_{T_chi}|
  kS_A,          // Pi_A
  kS_I,          // Theorem-2 integrand, slice measure
  kS_I_rtilde,   // its r^5 (R~'.S)^2 L part
  kS_cut,        // cut-off variant, literal measure
  kSlabCount
};

std::string series_name(int id);
std::string slab_name(int id);

struct EvolutionOptions {
  double t_end = 200.0;
  double h_t = 0.1;       // sample spacing and Simpson step
  double slice_dt = 1.0;  // must be an even multiple of h_t
  double rbar = 0.5;      // cut-off half width around 3M, units of M
  IntegratorOptions integ;
  WeightConfig wcfg;
  FactorMode strengthen = FactorMode::symmetry;
  std::size_t chunk = 1024;
  unsigned threads = 0;      // 0: hardware concurrency
  std::size_t group_split = 0;  // particles below this index form group 0; 0 means N/2

  EvolutionOptions() {
    integ.rtol = 1e-10;
    integ.atol = 1e-12;
  }
  void validate() const;
};

struct Accumulators {
  std::array<std::vector<double>, kSeriesCount> E;     // per slice
  std::array<std::vector<double>, kSlabCount> slab;    // per interval
  std::array<std::vector<double>, kSeriesCount> flux;  // per interval, energy leaving at capture/escape/failure
  std::vector<double> w_sum, w2_sum;                   // per slice, alive particles
  std::vector<std::size_t> alive;                      // per slice

  void resize(std::size_t slices);
  void add(const Accumulators& o);
};

struct FailureRecord {
  std::size_t index = 0;
  std::string diagnostic;
};

struct EvolutionResult {
  std::vector<double> slice_times;
  std::array<Accumulators, 2> groups;
  std::size_t n_particles = 0;
  std::size_t captured = 0, escaped = 0, failed = 0, reached = 0;
  std::vector<FailureRecord> failures;  // first few
  double rho_A_min = 0.0;               // minimum sampled Morawetz integrand
  NullState rho_A_min_state;
  std::size_t samples = 0;
  double seconds = 0.0;
  std::string backend;

  Accumulators total() const;
  // E(t_j+1) - E(t_j) + slab + flux over [t_i, t_k] for the identity of X.
  double identity_residual(int series, int slab, std::size_t i, std::size_t k, int group = -1) const;
  double series_at(int series, std::size_t j, int group = -1) const;
  double slab_over(int slab, std::size_t i, std::size_t k, int group = -1) const;
  double flux_over(int series, std::size_t i, std::size_t k, int group = -1) const;
};

EvolutionResult evolve_ensemble(const Ensemble& ens, const EvolutionOptions& opt);

// Slab integral of an arbitrary density over [t1, t2] by direct integration
// of every particle: sum_p w_p int density(state_p(t))/(Sigma v^t) dt.
double slab_integral(const Ensemble& ens, const std::function<double(const NullState&)>& density, double t1,
                     double t2, double h_t, const IntegratorOptions& opt);

}  // namespace kvlasov
