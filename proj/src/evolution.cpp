#include "kvlasov/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "kvlasov/kernels.hpp"

namespace kvlasov {

std::string series_name(int id) {
  static const char* names[kSeriesCount] = {"E_dt", "E_Tchi", "E_Tperp", "E_A", "E_model3", "E_model3_nu",
                                            "E_model3_sym", "E_dt_plain"};
  return (id >= 0 && id < kSeriesCount) ? names[id] : "unknown";
}

std::string slab_name(int id) {
  static const char* names[kSlabCount] = {"Pi_Tchi", "abs_Pi_Tchi", "Pi_A", "I_morawetz", "I_rtilde", "I_cutoff"};
  return (id >= 0 && id < kSlabCount) ? names[id] : "unknown";
}

void EvolutionOptions::validate() const {
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(h_t > 0.0)) throw ConfigError("h_t must be positive");
  const double m = slice_dt / h_t;
  const long mi = std::lround(m);
  if (mi < 2 || std::abs(m - static_cast<double>(mi)) > 1e-9 || mi % 2 != 0)
    throw ConfigError("slice_dt must be an even multiple of h_t");
  const double ns = t_end / slice_dt;
  if (std::abs(ns - std::round(ns)) > 1e-9) throw ConfigError("t_end must be a multiple of slice_dt");
  wcfg.validate();
}

void Accumulators::resize(std::size_t slices) {
  for (auto& v : E) v.assign(slices, 0.0);
  for (auto& v : slab) v.assign(slices > 0 ? slices - 1 : 0, 0.0);
  for (auto& v : flux) v.assign(slices > 0 ? slices - 1 : 0, 0.0);
  w_sum.assign(slices, 0.0);
  w2_sum.assign(slices, 0.0);
  alive.assign(slices, 0);
}

void Accumulators::add(const Accumulators& o) {
  for (int s = 0; s < kSeriesCount; ++s) {
    for (std::size_t j = 0; j < E[s].size(); ++j) E[s][j] += o.E[s][j];
    for (std::size_t j = 0; j < flux[s].size(); ++j) flux[s][j] += o.flux[s][j];
  }
  for (int s = 0; s < kSlabCount; ++s)
    for (std::size_t j = 0; j < slab[s].size(); ++j) slab[s][j] += o.slab[s][j];
  for (std::size_t j = 0; j < w_sum.size(); ++j) {
    w_sum[j] += o.w_sum[j];
    w2_sum[j] += o.w2_sum[j];
    alive[j] += o.alive[j];
  }
}

Accumulators EvolutionResult::total() const {
  Accumulators t = groups[0];
  t.add(groups[1]);
  return t;
}

double EvolutionResult::series_at(int series, std::size_t j, int group) const {
  if (group >= 0) return groups[static_cast<std::size_t>(group)].E[series][j];
  return groups[0].E[series][j] + groups[1].E[series][j];
}

double EvolutionResult::slab_over(int slab, std::size_t i, std::size_t k, int group) const {
  double s = 0.0;
  for (int g = 0; g < 2; ++g) {
    if (group >= 0 && g != group) continue;
    for (std::size_t j = i; j < k; ++j) s += groups[g].slab[slab][j];
  }
  return s;
}

double EvolutionResult::flux_over(int series, std::size_t i, std::size_t k, int group) const {
  double s = 0.0;
  for (int g = 0; g < 2; ++g) {
    if (group >= 0 && g != group) continue;
    for (std::size_t j = i; j < k; ++j) s += groups[g].flux[series][j];
  }
  return s;
}

double EvolutionResult::identity_residual(int series, int slab, std::size_t i, std::size_t k, int group) const {
  const double bulk = slab >= 0 ? slab_over(slab, i, k, group) : 0.0;
  return series_at(series, k, group) - series_at(series, i, group) + bulk + flux_over(series, i, k, group);
}

namespace {

struct SampleBuffer {
  std::vector<double> r, th, vt_con, v_t, v_r, v_th, v_ph;
  std::vector<double> e, lz, q, f2;
  std::vector<double> rt1, rt2, L, rhoA, eA, rhoI;
  void clear() {
    for (auto* v : {&r, &th, &vt_con, &v_t, &v_r, &v_th, &v_ph, &e, &lz, &q, &f2}) v->clear();
  }
  void size_outputs(std::size_t n) {
    for (auto* v : {&rt1, &rt2, &L, &rhoA, &eA, &rhoI}) v->resize(n);
  }
};

struct ChunkResult {
  std::array<Accumulators, 2> acc;
  std::size_t captured = 0, escaped = 0, failed = 0, reached = 0, samples = 0;
  std::vector<FailureRecord> failures;
  double rho_min = std::numeric_limits<double>::infinity();
  NullState rho_min_state;
};

class Evolver {
 public:
  Evolver(const Ensemble& ens, const EvolutionOptions& opt)
      : ens_(ens), opt_(opt), p_(ens.params), m_(static_cast<std::size_t>(std::lround(opt.slice_dt / opt.h_t))),
        n_slices_(static_cast<std::size_t>(std::lround(opt.t_end / opt.slice_dt)) + 1),
        k_total_(m_ * (n_slices_ - 1) + 1) {
    split_ = opt.group_split ? opt.group_split : (ens.particles.size() + 1) / 2;
  }

  std::size_t slices() const { return n_slices_; }

  void run_chunk(std::size_t begin, std::size_t end, ChunkResult& out) {
    for (auto& a : out.acc) a.resize(n_slices_);
    SampleBuffer buf;
    std::vector<double> rate(k_total_);
    for (std::size_t i = begin; i < end; ++i) process(i, buf, rate, out);
  }

 private:
  void process(std::size_t idx, SampleBuffer& b, std::vector<double>& rate, ChunkResult& out) {
    const Particle& part = ens_.particles[idx];
    Accumulators& acc = out.acc[idx < split_ ? 0 : 1];
    const double w = part.w;
    const ConservedSet c0 = conserved(p_, part.state);
    const double L0 = p_.M * p_.M * c0.e * c0.e + c0.lz * c0.lz + c0.q;
    b.clear();
    NullState s0 = part.state;
    s0.x.t = 0.0;
    RunResult rr;
    try {
      rr = integrate_sampled(p_, s0, opt_.t_end, opt_.h_t, opt_.integ, [&](double, const PhaseVector& y) {
        const NullState s = from_phase(p_, y);
        b.r.push_back(y[1]);
        b.th.push_back(y[2]);
        b.vt_con.push_back(y[4]);
        b.v_t.push_back(s.v_cov[kT]);
        b.v_r.push_back(s.v_cov[kR]);
        b.v_th.push_back(s.v_cov[kTh]);
        b.v_ph.push_back(s.v_cov[kPh]);
        return b.r.size() < k_total_;
      });
    } catch (const Error& e) {
      rr.terminal = Terminal::failed;
      rr.diagnostic = e.what();
    }
    const std::size_t n = b.r.size();
    switch (rr.terminal) {
      case Terminal::reached_t_end: ++out.reached; break;
      case Terminal::captured: ++out.captured; break;
      case Terminal::escaped: ++out.escaped; break;
      case Terminal::failed:
        ++out.failed;
        if (out.failures.size() < 16) out.failures.push_back({idx, rr.diagnostic});
        break;
    }
    if (n == 0) return;
    out.samples += n;
    const bool complete = n == k_total_;

    b.e.assign(n, c0.e);
    b.lz.assign(n, c0.lz);
    b.q.assign(n, c0.q);
    b.f2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double sn = std::sin(b.th[k]);
      const double x = p_.M * p_.M * b.v_t[k] * b.v_t[k] + b.v_th[k] * b.v_th[k] + b.v_ph[k] * b.v_ph[k] / (sn * sn);
      b.f2[k] = x * x;
    }
    b.size_outputs(n);
    kernels::radial_terms(kernels::RadialConsts{p_.M, p_.a, opt_.wcfg.eps_e2},
                          kernels::RadialBatchIn{b.r.data(), b.v_r.data(), b.e.data(), b.lz.data(), b.q.data(),
                                                 b.f2.data(), n},
                          kernels::RadialBatchOut{b.rt1.data(), b.rt2.data(), b.L.data(), b.rhoA.data(), b.eA.data(),
                                                  b.rhoI.data()});

    const double omH = p_.omega_H();
    const double Fs = opt_.strengthen == FactorMode::symmetry ? L0 * L0 : 1.0;

    // Energies per unit weight at sample k.
    auto energies = [&](std::size_t k, std::array<double, kSeriesCount>& E) {
      const double r = b.r[k], th = b.th[k];
      const MetricFunctions f = metric_functions(p_, r, th);
      const double F = opt_.strengthen == FactorMode::coordinate ? b.f2[k] : Fs;
      const double chi_v = chi(p_, opt_.wcfg, r);
      const double om_perp = 2.0 * p_.a * p_.M * r / f.Pi;
      E[kE_dt] = -F * b.v_t[k];
      E[kE_Tchi] = -F * (b.v_t[k] + chi_v * omH * b.v_ph[k]);
      E[kE_Tperp] = -F * (b.v_t[k] + om_perp * b.v_ph[k]);
      E[kE_A] = b.eA[k];
      const double sq = r * r + p_.a * p_.a;
      const double I = sq * sq / f.Delta * b.v_t[k] * b.v_t[k] + f.Delta * b.v_r[k] * b.v_r[k] +
                       b.v_th[k] * b.v_th[k] + b.v_ph[k] * b.v_ph[k] / (f.sin_theta * f.sin_theta);
      const double conv = 1.0 / (f.Sigma * b.vt_con[k]);
      E[kE_model_lit] = I * b.f2[k] * r * r * conv / f.Sigma;
      E[kE_model_nu] = I * b.f2[k] * conv;
      E[kE_model_sym] = I * L0 * L0 * conv;
      E[kE_dt_plain] = -b.v_t[k];
    };

    std::array<double, kSeriesCount> E{};
    for (std::size_t j = 0; j < n_slices_; ++j) {
      const std::size_t k = j * m_;
      if (k >= n) break;
      energies(k, E);
      for (int s = 0; s < kSeriesCount; ++s) acc.E[s][j] += w * E[s];
      acc.w_sum[j] += w;
      acc.w2_sum[j] += w * w;
      ++acc.alive[j];
    }

    for (std::size_t k = 0; k < n; ++k)
      if (b.rhoA[k] < out.rho_min) {
        out.rho_min = b.rhoA[k];
        out.rho_min_state = state_from_covariant(p_, BLPoint{static_cast<double>(k) * opt_.h_t, b.r[k], b.th[k], 0.0},
                                                  Vec4{b.v_t[k], b.v_r[k], b.v_th[k], b.v_ph[k]});
      }

    // Slab rates for every integrand, then interval-wise Simpson.
    for (int sid = 0; sid < kSlabCount; ++sid) {
      for (std::size_t k = 0; k < n; ++k) {
        const double r = b.r[k], th = b.th[k];
        const double sn = std::sin(th), cs = std::cos(th);
        const double Sg = r * r + p_.a * p_.a * cs * cs;
        const double conv = 1.0 / (Sg * b.vt_con[k]);
        const double D = delta_of(p_, r);
        double v = 0.0;
        switch (sid) {
          case kS_Tchi:
          case kS_Tchi_abs: {
            const double dchi = chi_dr(p_, opt_.wcfg, r);
            if (dchi != 0.0) {
              const double F = opt_.strengthen == FactorMode::coordinate ? b.f2[k] : Fs;
              v = F * D * dchi * omH * b.v_r[k] * b.v_ph[k] * conv;
              if (sid == kS_Tchi_abs) v = std::abs(v);
            }
            break;
          }
          case kS_A: v = b.rhoA[k] * conv; break;
          case kS_I: v = b.rhoI[k] * conv; break;
          case kS_I_rtilde: v = std::pow(r, 5) * b.rt1[k] * b.rt1[k] * b.L[k] * conv; break;
          case kS_cut: {
            const double sq = r * r + p_.a * p_.a;
            const double ind = std::abs(r - 3.0 * p_.M) >= opt_.rbar * p_.M ? 1.0 : 0.0;
            const double body = p_.M * D * D / (sq * sq) * b.v_r[k] * b.v_r[k] +
                                ind / r *
                                    (p_.M * p_.M * b.v_t[k] * b.v_t[k] + b.v_th[k] * b.v_th[k] +
                                     b.v_ph[k] * b.v_ph[k] / (sn * sn));
            v = body * b.f2[k] * r * r * conv / Sg;
            break;
          }
        }
        rate[k] = v;
      }
      for (std::size_t j = 0; j + 1 < n_slices_; ++j) {
        const std::size_t k0 = j * m_;
        if (k0 >= n) break;
        const std::size_t k1 = std::min((j + 1) * m_, n - 1);
        if (k1 > k0) acc.slab[sid][j] += w * simpson_uniform(rate.data() + k0, k1 - k0 + 1, opt_.h_t);
      }
    }

    if (!complete) {
      // Energy carried off at the last retained sample.
      const std::size_t last = n - 1;
      const std::size_t j = last / m_;
      if (j + 1 < n_slices_) {
        energies(last, E);
        for (int s = 0; s < kSeriesCount; ++s) acc.flux[s][j] += w * E[s];
      }
    }
  }

  const Ensemble& ens_;
  const EvolutionOptions& opt_;
  const KerrParams p_;
  const std::size_t m_, n_slices_, k_total_;
  std::size_t split_ = 0;
};

}  // namespace

EvolutionResult evolve_ensemble(const Ensemble& ens, const EvolutionOptions& opt) {
  opt.validate();
  const auto t_start = std::chrono::steady_clock::now();
  Evolver ev(ens, opt);
  const std::size_t N = ens.particles.size();
  const std::size_t chunk = std::max<std::size_t>(1, opt.chunk);
  const std::size_t n_chunks = (N + chunk - 1) / chunk;
  std::vector<ChunkResult> chunks(n_chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        ev.run_chunk(c * chunk, std::min(N, (c + 1) * chunk), chunks[c]);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  unsigned nt = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, std::max<std::size_t>(1, n_chunks)));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);

  EvolutionResult res;
  res.n_particles = N;
  res.backend = kernels::backend_name(kernels::active_backend());
  for (std::size_t j = 0; j < ev.slices(); ++j) res.slice_times.push_back(static_cast<double>(j) * opt.slice_dt);
  for (auto& g : res.groups) g.resize(ev.slices());
  res.rho_A_min = std::numeric_limits<double>::infinity();
  // Fixed chunk order keeps the reduction independent of scheduling.
  for (const auto& c : chunks) {
    for (int g = 0; g < 2; ++g)
      if (!c.acc[g].w_sum.empty()) res.groups[g].add(c.acc[g]);
    res.captured += c.captured;
    res.escaped += c.escaped;
    res.failed += c.failed;
    res.reached += c.reached;
    res.samples += c.samples;
    for (const auto& f : c.failures)
      if (res.failures.size() < 16) res.failures.push_back(f);
    if (c.rho_min < res.rho_A_min) {
      res.rho_A_min = c.rho_min;
      res.rho_A_min_state = c.rho_min_state;
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

double slab_integral(const Ensemble& ens, const std::function<double(const NullState&)>& density, double t1,
                     double t2, double h_t, const IntegratorOptions& opt) {
  if (!(t2 > t1)) throw ConfigError("slab_integral: t2 must exceed t1");
  const KerrParams& p = ens.params;
  double total = 0.0;
  std::vector<double> rate;
  for (const auto& part : ens.particles) {
    rate.clear();
    NullState s0 = part.state;
    s0.x.t = 0.0;
    (void)integrate_sampled(p, s0, t2, h_t, opt, [&](double t, const PhaseVector& y) {
      if (t >= t1 - 1e-12) {
        const NullState s = from_phase(p, y);
        rate.push_back(density(s) / (metric_functions(p, y[1], y[2]).Sigma * y[4]));
      }
      return true;
    });
    total += part.w * simpson_uniform(rate.data(), rate.size(), h_t);
  }
  return total;
}

}  // namespace kvlasov
