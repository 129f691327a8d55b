#include "kvlasov/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include "kvlasov/kernels.hpp"
#include "kvlasov/rng.hpp"

namespace kvlasov {

namespace fs = std::filesystem;

json to_json(const CheckResult& c) {
  return json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit}, {"detail", c.detail}};
}

namespace {

std::string out_dir(const ExperimentConfig& cfg, const RunOptions& opt) {
  const std::string d = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
  fs::create_directories(d);
  return d;
}

CheckResult check_le(std::string name, double value, double limit, std::string detail = {}) {
  return CheckResult{std::move(name), value <= limit, value, limit, std::move(detail)};
}

json tolerance_set(const ExperimentConfig& c) {
  return json{{"tol_identity", c.tol_identity},     {"tol_null", c.tol_null},
              {"tol_drift_e", c.tol_drift_e},       {"tol_drift_q", c.tol_drift_q},
              {"tol_route", c.tol_route},           {"tol_divergence", c.tol_divergence},
              {"positivity_C", c.positivity_C},     {"gate_model_band", c.gate_model_band},
              {"gate_prop3", c.gate_prop3},         {"gate_prop4", c.gate_prop4},
              {"rtol", c.rtol},                     {"atol", c.atol}};
}

json header_record(const ExperimentConfig& cfg, const std::string& command) {
  return json{{"record", "header"},
              {"command", command},
              {"version", kToolkitVersion},
              {"config_hash", config_hash(cfg)},
              {"tolerances", tolerance_set(cfg)},
              {"M", cfg.M},
              {"a", cfg.a_over_m * cfg.M},
              {"seed", cfg.seed}};
}

void apply_backend(const RunOptions& opt) {
  kernels::set_backend(opt.deterministic ? kernels::Backend::scalar : kernels::Backend::automatic);
}

void finish(CommandReport& rep) {
  for (const auto& c : rep.checks)
    if (!c.pass) {
      rep.exit_code = std::max<int>(rep.exit_code, kExitViolation);
      break;
    }
}

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Relative closure of E(t_k) - E(t_i) + slab + flux, scaled by the largest term.
double divergence_closure(const EvolutionResult& r, int series, int slab, std::size_t i, std::size_t k, int group = -1) {
  const double eI = r.series_at(series, i, group), eK = r.series_at(series, k, group);
  const double b = slab >= 0 ? r.slab_over(slab, i, k, group) : 0.0;
  const double f = r.flux_over(series, i, k, group);
  const double scale = std::max({std::abs(eI), std::abs(eK), std::abs(b), std::abs(f)});
  return scale == 0.0 ? 0.0 : std::abs(eK - eI + b + f) / scale;
}

EvolutionResult run_evolution(const ExperimentConfig& cfg, const RunOptions& opt, const Ensemble& ens) {
  apply_backend(opt);
  EvolutionOptions eo = cfg.evolution();
  eo.integ.spray.christoffel_fault = opt.christoffel_fault;
  return evolve_ensemble(ens, eo);
}

json census(const EvolutionResult& r) {
  json j{{"particles", r.n_particles}, {"reached_t_end", r.reached}, {"captured", r.captured},
         {"escaped", r.escaped},       {"failed", r.failed},         {"backend", r.backend}};
  json f = json::array();
  for (const auto& x : r.failures) f.push_back({{"index", x.index}, {"diagnostic", x.diagnostic}});
  j["failures"] = f;
  return j;
}

void write_energy_series(const EvolutionResult& r, const ExperimentConfig& cfg, const std::string& dir,
                         CommandReport& rep) {
  const Accumulators tot = r.total();
  std::vector<std::string> cols{"t"};
  for (int s = 0; s < kSeriesCount; ++s) cols.push_back(series_name(s));
  cols.push_back("alive");
  cols.push_back("ess");
  CsvWriter csv(dir + "/energy.csv", cols);
  JsonlWriter jl(dir + "/energy.jsonl");
  jl.write(header_record(cfg, rep.command));
  for (std::size_t j = 0; j < r.slice_times.size(); ++j) {
    const double ess = tot.w2_sum[j] > 0 ? tot.w_sum[j] * tot.w_sum[j] / tot.w2_sum[j] : 0.0;
    std::vector<double> row{r.slice_times[j]};
    json rec{{"record", "energy"}, {"t", r.slice_times[j]}};
    for (int s = 0; s < kSeriesCount; ++s) {
      row.push_back(tot.E[s][j]);
      rec[series_name(s)] = tot.E[s][j];
    }
    row.push_back(static_cast<double>(tot.alive[j]));
    row.push_back(ess);
    rec["alive"] = tot.alive[j];
    rec["ess"] = ess;
    csv.row(row);
    jl.write(rec);
  }
  rep.files.push_back(csv.path());
  rep.files.push_back(jl.path());
}

void write_bulk_series(const EvolutionResult& r, const ExperimentConfig& cfg, const std::string& dir,
                       CommandReport& rep) {
  JsonlWriter jl(dir + "/bulk.jsonl");
  jl.write(header_record(cfg, rep.command));
  const Accumulators tot = r.total();
  for (std::size_t j = 0; j + 1 < r.slice_times.size(); ++j) {
    json rec{{"record", "bulk"}, {"t1", r.slice_times[j]}, {"t2", r.slice_times[j + 1]}};
    for (int s = 0; s < kSlabCount; ++s) rec[slab_name(s)] = tot.slab[s][j];
    json fl = json::object();
    for (int s = 0; s < kSeriesCount; ++s) fl[series_name(s)] = tot.flux[s][j];
    rec["flux"] = fl;
    jl.write(rec);
  }
  rep.files.push_back(jl.path());
}

}  // namespace

// ---------------------------------------------------------------------------
// identities

std::vector<CheckResult> identity_checks(const ExperimentConfig& cfg, const RunOptions& opt) {
  const KerrParams p = cfg.params();
  const WeightConfig& wc = cfg.weights;
  const std::size_t n = cfg.identity_points;
  const std::uint64_t seed = cfg.seed ^ 0x1d3e7f5a2b4c6d8eULL;
  std::vector<CheckResult> out;

  double inv = 0, decomp = 0, contr = 0, rearr = 0, carter = 0, nul = 0, meas = 0, route = 0, tchi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const NullState s = random_null_state(p, seed, i);
    const Mat4 g = metric_lower(p, s.x);
    const Mat4 gi = metric_upper(p, s.x);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double m = 0.0;
        for (int c = 0; c < 4; ++c) m += g[a][c] * gi[c][b];
        inv = std::max(inv, std::abs(m - (a == b ? 1.0 : 0.0)));
      }
    const Mat4 G = conformal_inverse(p, s.x);
    const MetricFunctions f = metric_functions(p, s.x.r, s.x.theta);
    double gmax = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) gmax = std::max(gmax, std::abs(G[a][b]));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) decomp = std::max(decomp, std::abs(f.Sigma * gi[a][b] - G[a][b]) / gmax);

    for (FieldKind X : {FieldKind::d_t, FieldKind::T_perp, FieldKind::T_chi}) {
      const double lit = surface_integrand(p, wc, s, X);
      const double ref = -field_contraction(p, wc, s, X);
      contr = std::max(contr, rel(lit, ref));
    }

    const ConservedSet c = conserved(p, s);
    const SymmetryVector S = symmetry_basis(c);
    const SymmetryVector Lc = curlyL_coefficients(p), Rc = curlyR_coefficients(p, s.x.r);
    double sym = 0.0, mag = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double t = 0.5 * (Lc[a] * Rc[b] + Lc[b] * Rc[a]) * S[a] * S[b];
        sym += t;
        mag += std::abs(t);
      }
    rearr = std::max(rearr, std::abs(sym - sym_dot(Lc, S) * sym_dot(Rc, S)) / std::max(mag, 1e-300));
    const Mat4 Rt = curly_R_tensor(p, s.x);
    double tens = 0.0, tmag = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        tens += Rt[a][b] * s.v_cov[a] * s.v_cov[b];
        tmag += std::abs(Rt[a][b] * s.v_cov[a] * s.v_cov[b]);
      }
    rearr = std::max(rearr, std::abs(tens - sym_dot(Rc, S)) / std::max(tmag, 1e-300));

    const double cot = f.cos_theta / f.sin_theta;
    const double qx = s.v_cov[kTh] * s.v_cov[kTh] + cot * cot * s.v_cov[kPh] * s.v_cov[kPh] +
                      p.a * p.a * f.sin_theta * f.sin_theta * s.v_cov[kT] * s.v_cov[kT];
    carter = std::max(carter, rel(c.q, qx));
    nul = std::max(nul, std::abs(null_residual(p, s)));

    // sqrt|det g| from the (t, phi) block times g_rr g_thth.
    const double det = g[kR][kR] * g[kTh][kTh] * (g[kT][kT] * g[kPh][kPh] - g[kT][kPh] * g[kT][kPh]);
    meas = std::max(meas, rel(cone_measure_weight(p, s), std::sqrt(std::abs(det)) / std::abs(s.v_cov[kT])));

    const double lemma = morawetz_density(p, wc, s);
    const MorawetzRoute lie = morawetz_density_lie(p, wc, s);
    route = std::max(route, std::abs(lemma - lie.total) / std::max(lie.magnitude, 1e-300));
    const double bulk = std::abs(bulk_density(p, wc, s, FieldKind::T_chi)) * f.sin_theta;
    const double cf = tchi_bulk_closed_form(p, wc, s);
    tchi = std::max(tchi, rel(bulk, cf));
  }
  const double tol = cfg.tol_identity;
  out.push_back(check_le("metric_inverse", inv, tol, "max |g_ac g^cb - delta| on random exterior points"));
  out.push_back(check_le("inverse_decomposition", decomp, tol, "Sigma g^ab vs textbook components"));
  out.push_back(check_le("surface_contraction", contr, tol, "literal surface integrand vs -X.v"));
  out.push_back(check_le("rearrangement", rearr, tol, "symmetrized vs unsymmetrized contraction"));
  out.push_back(check_le("carter_expansion", carter, 10 * tol, "Q^ab v_a v_b componentwise"));
  out.push_back(check_le("null_constraint", nul, cfg.tol_null, "normalized states on the cone"));
  out.push_back(check_le("cone_measure", meas, tol, "Sigma sin / |v_t| vs sqrt|g| / |v_t|"));

  // Conservation along a mixed set of orbits from the initial datum.
  {
    const Ensemble ens = sample_from_config(cfg, cfg.identity_orbits, cfg.seed + 11);
    IntegratorOptions io;
    io.rtol = 1e-12;
    io.atol = 1e-14;
    io.spray.christoffel_fault = opt.christoffel_fault;
    double de = 0, dlz = 0, dq = 0, dn = 0, dR = 0;
    for (const auto& part : ens.particles) {
      const ConservedSet c0 = conserved(p, part.state);
      integrate_sampled(p, part.state, cfg.identity_orbit_t * p.M, 1.0 * p.M, io, [&](double, const PhaseVector& y) {
        const NullState s = from_phase(p, y);
        const DriftSample d = drift_relative_to(p, c0, s);
        de = std::max(de, std::abs(d.e));
        dlz = std::max(dlz, std::abs(d.lz));
        dq = std::max(dq, std::abs(d.q));
        dn = std::max(dn, std::abs(d.L));
        const double D = delta_of(p, s.x.r);
        const double Rv = radial_potential(p, c0.e, c0.lz, c0.q, s.x.r);
        const double sc = radial_potential_scale(p, c0.e, c0.lz, c0.q, s.x.r) + D * D * s.v_cov[kR] * s.v_cov[kR];
        dR = std::max(dR, std::abs(Rv + D * D * s.v_cov[kR] * s.v_cov[kR]) / sc);
        return true;
      });
    }
    out.push_back(check_le("conservation_e", de, cfg.tol_drift_e, "relative drift of e"));
    out.push_back(check_le("conservation_lz", dlz, cfg.tol_drift_e, "relative drift of lz"));
    out.push_back(check_le("conservation_q", dq, cfg.tol_drift_q, "relative drift of q"));
    out.push_back(check_le("conservation_null", dn, cfg.tol_null, "g(v,v)/scale^2 along orbits"));
    out.push_back(check_le("radial_potential", dR, 1e-9, "R(r) + Delta^2 v_r^2 along orbits"));
  }

  out.push_back(check_le("bulk_routes", route, cfg.tol_route, "lemma form vs Lie-derivative form"));
  out.push_back(check_le("tchi_closed_form", tchi, tol, "T_chi bulk vs closed form"));

  if (p.a == 0.0) {
    // Outgoing radial ray: t - r_* is constant.
    const double r0 = 6.0 * p.M;
    const NullState s0 = null_normalize(p, BLPoint{0.0, r0, M_PI / 2, 0.0}, 1.0, 0.0, 0.0);
    auto rstar = [&](double r) { return r + 2.0 * p.M * std::log(r / (2.0 * p.M) - 1.0); };
    double worst = 0.0;
    IntegratorOptions io;
    io.spray.christoffel_fault = opt.christoffel_fault;
    integrate_sampled(p, s0, 200.0 * p.M, 10.0 * p.M, io, [&](double t, const PhaseVector& y) {
      worst = std::max(worst, std::abs((t - rstar(y[1])) - (0.0 - rstar(r0))) / std::max(1.0, t));
      return true;
    });
    out.push_back(check_le("schwarzschild_ray", worst, 1e-9, "t - r_* along an outgoing radial ray"));
  }
  return out;
}

CommandReport cmd_check_identities(const ExperimentConfig& cfg, const RunOptions& opt) {
  CommandReport rep;
  rep.command = "check-identities";
  rep.warnings = cfg.validate();
  rep.checks = identity_checks(cfg, opt);
  const std::string dir = out_dir(cfg, opt);
  JsonlWriter jl(dir + "/identities.jsonl");
  jl.write(header_record(cfg, rep.command));
  for (const auto& c : rep.checks) {
    json j = to_json(c);
    j["record"] = "check";
    jl.write(j);
  }
  rep.files.push_back(jl.path());
  finish(rep);
  for (const auto& c : rep.checks)
    if (!c.pass) {
      rep.summary["first_failure"] = c.name;
      break;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// sampling

Ensemble sample_from_config(const ExperimentConfig& cfg, std::size_t N, std::uint64_t seed) {
  return sample_ensemble(cfg.params(), cfg.f0, N, seed, cfg.sampling());
}

CommandReport cmd_sample(const ExperimentConfig& cfg, const RunOptions& opt) {
  CommandReport rep;
  rep.command = "sample";
  rep.warnings = cfg.validate();
  const Ensemble ens = sample_from_config(cfg, cfg.particles, cfg.seed);
  const std::string dir = out_dir(cfg, opt);
  write_ensemble(ens, dir + "/ensemble.txt");
  rep.files.push_back(dir + "/ensemble.txt");
  rep.files.push_back(dir + "/ensemble.txt.json");
  rep.summary = ensemble_metadata(ens);
  rep.summary["total_weight"] = ens.total_weight();
  return rep;
}

// ---------------------------------------------------------------------------
// energy

EnergySummary summarize_energy(const EvolutionResult& r, std::size_t last_slice, int group) {
  EnergySummary s;
  auto sup = [&](int id) {
    const double e0 = r.series_at(id, 0, group);
    double m = 0.0;
    for (std::size_t j = 0; j <= last_slice; ++j) m = std::max(m, r.series_at(id, j, group) / e0);
    return m;
  };
  s.sup_model_literal = sup(kE_model_lit);
  s.sup_model_nu = sup(kE_model_nu);
  s.sup_model_sym = sup(kE_model_sym);
  s.sup_tchi = sup(kE_Tchi);
  s.sup_tperp = sup(kE_Tperp);
  s.mode_ratio_min = std::numeric_limits<double>::infinity();
  s.mode_ratio_max = 0.0;
  for (std::size_t j = 0; j <= last_slice; ++j) {
    const double sym = r.series_at(kE_model_sym, j, group);
    if (sym <= 0.0) continue;
    const double q = r.series_at(kE_model_nu, j, group) / sym;
    s.mode_ratio_min = std::min(s.mode_ratio_min, q);
    s.mode_ratio_max = std::max(s.mode_ratio_max, q);
  }
  return s;
}

CommandReport cmd_energy(const ExperimentConfig& cfg, const RunOptions& opt) {
  CommandReport rep;
  rep.command = "energy";
  rep.warnings = cfg.validate();
  const Ensemble ens = sample_from_config(cfg, cfg.particles, cfg.seed);
  const EvolutionResult r = run_evolution(cfg, opt, ens);
  const std::string dir = out_dir(cfg, opt);
  write_energy_series(r, cfg, dir, rep);

  const std::size_t last = r.slice_times.size() - 1;
  const EnergySummary es = summarize_energy(r, last);
  const bool schw = cfg.a_over_m == 0.0;
  const double band = schw ? 1.0 + 1e-6 : cfg.gate_model_band;
  rep.checks.push_back(check_le("sup_model3_literal", es.sup_model_literal, band));
  rep.checks.push_back(check_le("sup_model3_nu", es.sup_model_nu, band));
  const std::size_t half = last / 2;
  const double sup_half_n = summarize_energy(r, last, 0).sup_model_literal;
  rep.checks.push_back(check_le("sup_stable_in_N", rel(sup_half_n, es.sup_model_literal), 0.01,
                                "group 0 (N/2) vs full ensemble"));
  rep.checks.push_back(check_le("divergence_dt", divergence_closure(r, kE_dt, -1, 0, last), cfg.tol_divergence));
  rep.checks.push_back(
      check_le("divergence_Tchi", divergence_closure(r, kE_Tchi, kS_Tchi, 0, last), cfg.tol_divergence));
  rep.checks.push_back(check_le("divergence_A", divergence_closure(r, kE_A, kS_A, 0, last), cfg.tol_divergence));

  rep.summary = json{{"census", census(r)},
                     {"sup_model3_literal", es.sup_model_literal},
                     {"sup_model3_nu", es.sup_model_nu},
                     {"sup_model3_sym", es.sup_model_sym},
                     {"sup_model3_literal_first_half", summarize_energy(r, half).sup_model_literal},
                     {"sup_Tchi", es.sup_tchi},
                     {"sup_Tperp", es.sup_tperp},
                     {"factor_mode_ratio", {es.mode_ratio_min, es.mode_ratio_max}},
                     {"gate_model_band", band},
                     {"seconds_evolve", r.seconds}};
  if (r.failed > 0) rep.exit_code = kExitNumerical;
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// morawetz

MorawetzSummary summarize_morawetz(const EvolutionResult& r) {
  MorawetzSummary m;
  m.E0 = r.series_at(kE_model_nu, 0);
  double I = 0, Ic = 0, Ir = 0;
  m.T.push_back(0.0);
  m.I.push_back(0.0);
  m.I_cut.push_back(0.0);
  m.I_rtilde.push_back(0.0);
  for (std::size_t j = 0; j + 1 < r.slice_times.size(); ++j) {
    const double dI = r.slab_over(kS_I, j, j + 1);
    if (dI < 0.0) m.nondecreasing = false;
    I += dI;
    Ic += r.slab_over(kS_cut, j, j + 1);
    Ir += r.slab_over(kS_I_rtilde, j, j + 1);
    m.T.push_back(r.slice_times[j + 1]);
    m.I.push_back(I);
    m.I_cut.push_back(Ic);
    m.I_rtilde.push_back(Ir);
  }
  return m;
}

Ensemble trapped_ensemble(const KerrParams& p, std::size_t n, std::uint64_t seed) {
  Ensemble ens;
  ens.params = p;
  ens.seed = seed;
  ens.provenance.proposal = "spherical_photon_orbits";
  const double half = p.a == 0.0 ? 0.0 : 0.5 * std::abs(p.a);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = counter_uniform(seed, i, 0);
    const double r0 = 3.0 * p.M + half * (2.0 * u - 1.0);
    const ConservedSet c = spherical_photon_constants(p, r0, 2.0 * counter_uniform(seed, i, 1) - 1.0);
    if (!(c.q >= 0.0)) continue;
    const double vth_sign = counter_uniform(seed, i, 2) < 0.5 ? -1.0 : 1.0;
    NullState s = state_from_constants(p, c, r0, M_PI / 2, 0.0, vth_sign);
    s.x.phi = 2.0 * M_PI * counter_uniform(seed, i, 3);
    ens.particles.push_back(Particle{s, 1.0});
  }
  for (auto& q : ens.particles) q.w = 1.0 / static_cast<double>(ens.particles.size());
  ens.provenance.requested = n;
  return ens;
}

CommandReport cmd_morawetz(const ExperimentConfig& cfg, const RunOptions& opt) {
  CommandReport rep;
  rep.command = "morawetz";
  rep.warnings = cfg.validate();
  const Ensemble ens = sample_from_config(cfg, cfg.particles, cfg.seed);
  const EvolutionResult r = run_evolution(cfg, opt, ens);
  const std::string dir = out_dir(cfg, opt);
  write_bulk_series(r, cfg, dir, rep);
  const MorawetzSummary m = summarize_morawetz(r);
  CsvWriter csv(dir + "/saturation.csv", {"T", "I", "I_over_E0", "I_cut", "I_cut_over_E0", "I_rtilde"});
  for (std::size_t j = 0; j < m.T.size(); ++j)
    csv.row({m.T[j], m.I[j], m.I[j] / m.E0, m.I_cut[j], m.I_cut[j] / m.E0, m.I_rtilde[j]});
  rep.files.push_back(csv.path());

  const std::size_t last = m.T.size() - 1, half = last / 2;
  const double tail = (m.I[last] - m.I[half]) / m.I[half];
  rep.checks.push_back(CheckResult{"I_nondecreasing", m.nondecreasing, 0.0, 0.0, "per-interval increments >= 0"});
  rep.checks.push_back(check_le("saturation", tail, 0.05, "I(T) - I(T/2) relative to I(T/2)"));

  // Trapped sub-ensemble over a shorter window.
  ExperimentConfig tc = cfg;
  tc.t_end = std::min(cfg.t_end, 100.0);
  const Ensemble tr = trapped_ensemble(cfg.params(), 64, cfg.seed + 101);
  const EvolutionResult rt = run_evolution(tc, opt, tr);
  const std::size_t kt = rt.slice_times.size() - 1;
  const double trapped_per_w = rt.slab_over(kS_I_rtilde, 0, kt) / tr.total_weight();
  const std::size_t km = static_cast<std::size_t>(std::lround(tc.t_end / cfg.slice_dt));
  const double main_per_w = r.slab_over(kS_I_rtilde, 0, km) / ens.total_weight();
  const double trapped_ratio = main_per_w > 0 ? trapped_per_w / main_per_w : 0.0;
  rep.checks.push_back(check_le("trapped_rtilde", trapped_ratio, 1e-6, "per-unit-weight R~' term, trapped vs ensemble"));

  rep.summary = json{{"census", census(r)},
                     {"E0_model3_nu", m.E0},
                     {"I_final", m.I[last]},
                     {"I_over_E0", m.I[last] / m.E0},
                     {"I_cut_over_E0", m.I_cut[last] / m.E0},
                     {"tail_increment", tail},
                     {"rbar", cfg.rbar},
                     {"trapped_particles", tr.particles.size()},
                     {"trapped_ratio", trapped_ratio},
                     {"trapped_census", census(rt)}};
  if (r.failed > 0) rep.exit_code = kExitNumerical;
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// weight scans

double tchi_causality_max(const KerrParams& p, const WeightConfig& w, std::size_t n_r, std::size_t n_th) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : scan_radii(p, n_r, 1e3 * p.M, 1e-6)) {
    for (std::size_t k = 0; k < n_th; ++k) {
      const double th = 1e-3 + (M_PI - 2e-3) * (static_cast<double>(k) + 0.5) / static_cast<double>(n_th);
      const BLPoint x{0.0, r, th, 0.0};
      const BlendedVectors bv = blended_vector(p, w, x);
      const Mat4 g = metric_lower(p, x);
      worst = std::max(worst, quadratic_form(g, bv.T_chi, bv.T_chi));
    }
  }
  return worst;
}

PositivityScan morawetz_density_scan(const KerrParams& p, const WeightConfig& w, std::size_t n_states,
                                     std::uint64_t seed) {
  PositivityScan sc;
  sc.min_ratio = std::numeric_limits<double>::infinity();
  RandomStateBox box;
  box.delta_min = 1e-3;
  for (std::size_t i = 0; i < n_states; ++i) {
    const NullState s = random_null_state(p, seed, i, box);
    const double rho = morawetz_density(p, w, s);
    const ConservedSet c = conserved(p, s);
    const double L = p.M * p.M * c.e * c.e + c.lz * c.lz + c.q;
    const double ms = momentum_scale(p, s);
    const double norm = rho / (L * ms * ms);
    ++sc.evaluations;
    if (rho < 0.0) ++sc.violations;
    if (norm < sc.min_ratio) {
      sc.min_ratio = norm;
      sc.worst_r = s.x.r;
      sc.worst_sigma = symmetry_basis(c);
    }
  }
  return sc;
}

CommandReport cmd_scan_weights(const ExperimentConfig& cfg, const RunOptions& opt) {
  CommandReport rep;
  rep.command = "scan-weights";
  rep.warnings = cfg.validate();
  apply_backend(opt);
  const KerrParams p = cfg.params();
  const std::string dir = out_dir(cfg, opt);

  // Profiles on the configured (a, eps) and on (0, 0).
  {
    CsvWriter csv(dir + "/profiles.csv", {"a", "eps", "r", "component", "value"});
    static const char* comp[4] = {"E2", "ELZ", "LZ2", "Q"};
    for (const auto& pe : {std::pair<KerrParams, double>{p, cfg.weights.eps_e2},
                           std::pair<KerrParams, double>{KerrParams::make(p.M, 0.0), 0.0}}) {
      WeightConfig w = cfg.weights;
      w.eps_e2 = pe.second;
      for (double r : scan_radii(pe.first, cfg.scan_radii, 1e2 * p.M, 1e-3)) {
        const RadialProfile pr = radial_profile(pe.first, w, r);
        for (int c = 0; c < 4; ++c) {
          csv.row_mixed({format_double(pe.first.a), format_double(pe.second), format_double(r),
                         std::string("Rt1.") + comp[c], format_double(pr.Rt1[c])});
          csv.row_mixed({format_double(pe.first.a), format_double(pe.second), format_double(r),
                         std::string("neg_Rt2.") + comp[c], format_double(-pr.Rt2[c])});
        }
      }
    }
    rep.files.push_back(csv.path());
  }

  // R~'[Q] root at a = 0, eps = 0.
  {
    WeightConfig w0 = cfg.weights;
    w0.eps_e2 = 0.0;
    const KerrParams p0 = KerrParams::make(p.M, 0.0);
    const auto roots = rtilde_prime_roots(p0, w0, SymmetryVector{0, 0, 0, 1}, p0.r_plus() + 1e-3, 100.0 * p.M);
    const double err = roots.size() == 1 ? std::abs(roots[0] - 3.0 * p.M) : 1.0;
    rep.checks.push_back(check_le("rtilde_Q_root_at_3M", err, 1e-10));
  }

  // Root drift and simple-root property on cone-realizable sigma.
  const auto sigma = cone_sigma_samples(p, std::min<std::size_t>(cfg.scan_sigma, 2000), cfg.seed + 3);
  double rbar_meas = 0.0;
  std::size_t non_simple = 0;
  for (const auto& s : sigma) {
    if (sym_dot(curlyL_coefficients(p), s) <= 0.0) continue;
    const auto roots = rtilde_prime_roots(p, cfg.weights, s, p.r_plus() + 1e-6, 100.0 * p.M, 1000);
    if (roots.size() != 1) ++non_simple;
    for (double r : roots) rbar_meas = std::max(rbar_meas, std::abs(r - 3.0 * p.M) / p.M);
  }
  rep.checks.push_back(check_le("rtilde_simple_root", static_cast<double>(non_simple), 0.0));
  rep.checks.push_back(check_le("root_drift", rbar_meas, cfg.rbar, "max |r - 3M|/M over roots"));

  // -R~~'' positivity margin: min over sigma of (-R~~''.sigma)/(M s^-1 L_eps) per radius.
  const auto sig_big = cone_sigma_samples(p, cfg.scan_sigma, cfg.seed + 5);
  const auto radii = scan_radii(p, cfg.scan_radii);
  {
    CsvWriter csv(dir + "/positivity_margin.csv", {"r", "min_ratio_L", "min_ratio_L_eps"});
    double worst = std::numeric_limits<double>::infinity();
    for (double r : radii) {
      const PositivityScan a1 = positivity_scan(p, cfg.weights, sig_big, {r}, 0.0, PositivityReference::curly_L);
      const PositivityScan a2 = positivity_scan(p, cfg.weights, sig_big, {r}, 0.0, PositivityReference::curly_L_eps);
      csv.row({r, a1.min_ratio, a2.min_ratio});
      worst = std::min(worst, a1.min_ratio);
    }
    rep.files.push_back(csv.path());
    rep.checks.push_back(CheckResult{"neg_Rt2_positive", worst > 0.0, worst, 0.0, "min ratio against curly_L"});
    rep.summary["positivity_best_constant_L"] = worst;
  }

  // eps ceiling tables: the eps-weighted reference used for the ceiling, and
  // the plain curly_L reference for comparison.
  {
    std::vector<double> a_grid{0.0, 0.01 * p.M, 0.05 * p.M};
    if (std::find(a_grid.begin(), a_grid.end(), p.a) == a_grid.end()) a_grid.push_back(p.a);
    std::vector<double> eps_grid;
    for (int k = 1; k <= 50; ++k) eps_grid.push_back(0.02 * k);
    json doc{{"config_hash", config_hash(cfg)}, {"C", cfg.positivity_C}};
    for (PositivityReference ref : {PositivityReference::curly_L_eps, PositivityReference::curly_L}) {
      EpsCeilingOptions eo;
      eo.sigma_samples = cfg.scan_sigma;
      eo.radii = cfg.scan_radii;
      eo.seed = cfg.seed + 7;
      eo.C = cfg.positivity_C;
      eo.ref = ref;
      const auto rows = eps_ceiling_scan(p.M, a_grid, eps_grid, eo);
      json t = json::array();
      for (const auto& row : rows) {
        json e = json::array();
        for (std::size_t k = 0; k < row.eps.size(); ++k)
          e.push_back({{"eps", row.eps[k]}, {"admissible", static_cast<bool>(row.admissible[k])},
                       {"min_ratio", row.min_ratio[k]}});
        t.push_back({{"a", row.a}, {"eps_bar", row.eps_bar}, {"empty", row.empty}, {"monotone", row.monotone},
                     {"grid", e}});
        if (ref == PositivityReference::curly_L_eps && row.a == p.a) rep.summary["eps_bar"] = row.eps_bar;
      }
      doc[to_string(ref)] = t;
    }
    write_json(dir + "/eps_ceiling.json", doc);
    rep.files.push_back(dir + "/eps_ceiling.json");
  }

  // T_chi causality and A boundedness.
  {
    const double gmax = tchi_causality_max(p, cfg.weights, cfg.scan_radii, 64);
    rep.checks.push_back(check_le("tchi_causal", gmax, 1e-12, "max g(T_chi, T_chi)"));
    CsvWriter csv(dir + "/a_bound.csv", {"r", "sum_abs_A_over_Delta_r-2"});
    double C = 0.0;
    for (double r : scan_radii(p, cfg.scan_radii, 1e3 * p.M, 1e-6)) {
      const double b = morawetz_field_bound_ratio(p, cfg.weights, r);
      C = std::max(C, b);
      csv.row({r, b});
    }
    rep.files.push_back(csv.path());
    rep.summary["A_bound_C"] = C;
    rep.summary["tchi_causal_max"] = gmax;
  }
  rep.summary["rbar_measured"] = rbar_meas;
  rep.summary["config_hash"] = config_hash(cfg);
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// core estimates

CoreEstimates core_estimates(const ExperimentConfig& cfg, const EvolutionResult& r, std::size_t n_states) {
  CoreEstimates c;
  const KerrParams p = cfg.params();
  const std::size_t last = r.slice_times.size() - 1;
  c.prop1_min_energy = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= last; ++j) c.prop1_min_energy = std::min(c.prop1_min_energy, r.series_at(kE_Tchi, j));
  c.prop1_causal_max = tchi_causality_max(p, cfg.weights, 200, 32);
  c.prop1 = c.prop1_min_energy >= 0.0 && c.prop1_causal_max <= 1e-12;

  const PositivityScan ps = morawetz_density_scan(p, cfg.weights, n_states, cfg.seed + 17);
  c.prop2_violations = ps.violations + (r.rho_A_min < 0.0 ? 1 : 0);
  c.prop2_evaluations = ps.evaluations + r.samples;
  c.prop2_min = std::min(ps.min_ratio, r.rho_A_min);
  c.prop2 = c.prop2_violations == 0;

  const double tchi = r.slab_over(kS_Tchi_abs, 0, last);
  const double A = r.slab_over(kS_A, 0, last);
  const double aM = std::abs(p.a) / p.M;
  c.prop3_C = tchi == 0.0 ? 0.0 : tchi / (aM * A);
  c.prop3 = A > 0.0 && c.prop3_C <= cfg.gate_prop3;

  c.prop4_C = 0.0;
  for (std::size_t j = 0; j <= last; ++j) {
    const double et = r.series_at(kE_Tchi, j);
    if (et > 0.0) c.prop4_C = std::max(c.prop4_C, std::abs(r.series_at(kE_A, j)) / et);
  }
  c.prop4 = c.prop4_C <= cfg.gate_prop4;
  return c;
}

CommandReport cmd_core_estimates(const ExperimentConfig& cfg, const RunOptions& opt) {
  CommandReport rep;
  rep.command = "core-estimates";
  rep.warnings = cfg.validate();
  const Ensemble ens = sample_from_config(cfg, cfg.particles, cfg.seed);
  const EvolutionResult r = run_evolution(cfg, opt, ens);
  const CoreEstimates c = core_estimates(cfg, r, cfg.identity_points * 10);
  rep.checks.push_back(CheckResult{"prop1_Tchi_energy_nonnegative", c.prop1, c.prop1_min_energy, 0.0,
                                   "min slice energy; causal max " + format_double(c.prop1_causal_max)});
  rep.checks.push_back(CheckResult{"prop2_PiA_nonnegative", c.prop2, static_cast<double>(c.prop2_violations), 0.0,
                                   std::to_string(c.prop2_evaluations) + " evaluations"});
  rep.checks.push_back(check_le("prop3_Tchi_bulk_bound", c.prop3_C, cfg.gate_prop3, "toolkit gate on C"));
  rep.checks.push_back(check_le("prop4_boundary_control", c.prop4_C, cfg.gate_prop4, "toolkit gate on C"));
  if (!c.prop3) rep.checks[2].pass = false;
  rep.summary = json{{"census", census(r)},
                     {"prop1_min_energy", c.prop1_min_energy},
                     {"prop1_causal_max", c.prop1_causal_max},
                     {"prop2_violations", c.prop2_violations},
                     {"prop2_min_normalized", c.prop2_min},
                     {"prop3_C", c.prop3_C},
                     {"prop4_C", c.prop4_C},
                     {"gates", {{"prop3", cfg.gate_prop3}, {"prop4", cfg.gate_prop4}}}};
  finish(rep);
  if (rep.exit_code != kExitPass) {
    const auto& s = r.rho_A_min_state;
    rep.summary["state_dump"] = {{"r", s.x.r},          {"theta", s.x.theta},      {"v_t", s.v_cov[kT]},
                                 {"v_r", s.v_cov[kR]},  {"v_theta", s.v_cov[kTh]}, {"v_phi", s.v_cov[kPh]},
                                 {"rho_A", r.rho_A_min}};
  }
  const std::string dir = out_dir(cfg, opt);
  json doc = header_record(cfg, rep.command);
  doc["record"] = "core_estimates";
  doc["summary"] = rep.summary;
  doc["summary"].erase("census");
  json checks = json::array();
  for (const auto& ch : rep.checks) checks.push_back(to_json(ch));
  doc["checks"] = checks;
  write_json(dir + "/core_estimates.json", doc);
  rep.files.push_back(dir + "/core_estimates.json");
  return rep;
}

// ---------------------------------------------------------------------------

std::string write_manifest(const ExperimentConfig& cfg, const RunOptions& opt, const CommandReport& rep,
                           double seconds) {
  const std::string dir = out_dir(cfg, opt);
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back(to_json(c));
  json m{{"command", rep.command},
         {"version", kToolkitVersion},
         {"config_hash", config_hash(cfg)},
         {"config", serialize_config(cfg)},
         {"deterministic", opt.deterministic},
         {"backend", kernels::backend_name(kernels::active_backend())},
         {"seconds", seconds},
         {"exit_code", rep.exit_code},
         {"gates",
          {{"label", "toolkit gates, not paper values"},
           {"gate_model_band", cfg.gate_model_band},
           {"gate_prop3", cfg.gate_prop3},
           {"gate_prop4", cfg.gate_prop4},
           {"tol_divergence", cfg.tol_divergence}}},
         {"tolerances", tolerance_set(cfg)},
         {"warnings", rep.warnings},
         {"checks", checks},
         {"summary", rep.summary},
         {"files", rep.files}};
  const std::string path = dir + "/manifest.json";
  write_json(path, m);
  return path;
}

}  // namespace kvlasov
