#include "kvlasov/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace kvlasov {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  return x;
}

std::string fmt_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define KV_DOUBLE(name, member)                                                                        \
  Field {                                                                                              \
    name, [](ExperimentConfig& c, const std::string& v) { c.member = parse_double(name, v); },         \
        [](const ExperimentConfig& c) { return fmt_double(c.member); }                                 \
  }
#define KV_SIZE(name, member)                                                                          \
  Field {                                                                                              \
    name, [](ExperimentConfig& c, const std::string& v) { c.member = parse_u64(name, v); },            \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }                             \
  }
#define KV_STRING(name, member)                                                                        \
  Field {                                                                                              \
    name, [](ExperimentConfig& c, const std::string& v) { c.member = v; },                             \
        [](const ExperimentConfig& c) { return c.member; }                                             \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      KV_DOUBLE("M", M),
      KV_DOUBLE("a_over_m", a_over_m),
      KV_DOUBLE("eps_e2", weights.eps_e2),
      KV_DOUBLE("r_chi", weights.r_chi),
      KV_DOUBLE("chi_width", weights.chi_width),
      KV_DOUBLE("f0.r_min", f0.r_min),
      KV_DOUBLE("f0.r_max", f0.r_max),
      KV_DOUBLE("f0.theta_min", f0.theta_min),
      KV_DOUBLE("f0.theta_max", f0.theta_max),
      KV_DOUBLE("f0.sigma_r", f0.sigma_r),
      KV_DOUBLE("f0.sigma_th", f0.sigma_th),
      KV_DOUBLE("f0.sigma_ph", f0.sigma_ph),
      KV_DOUBLE("f0.mu_r", f0.mu_r),
      KV_DOUBLE("f0.mu_th", f0.mu_th),
      KV_DOUBLE("f0.mu_ph", f0.mu_ph),
      KV_DOUBLE("f0.truncation", f0.truncation),
      KV_DOUBLE("f0.amplitude", f0.amplitude),
      KV_SIZE("particles", particles),
      KV_STRING("proposal", proposal),
      KV_DOUBLE("t_end", t_end),
      KV_DOUBLE("h_t", h_t),
      KV_DOUBLE("slice_dt", slice_dt),
      KV_DOUBLE("rbar", rbar),
      KV_DOUBLE("rtol", rtol),
      KV_DOUBLE("atol", atol),
      KV_DOUBLE("capture_margin", capture_margin),
      KV_DOUBLE("escape_radius", escape_radius),
      KV_STRING("strengthen", strengthen),
      KV_SIZE("seed", seed),
      KV_STRING("out_dir", out_dir),
      KV_SIZE("threads", threads),
      KV_DOUBLE("tol_identity", tol_identity),
      KV_DOUBLE("tol_null", tol_null),
      KV_DOUBLE("tol_drift_e", tol_drift_e),
      KV_DOUBLE("tol_drift_q", tol_drift_q),
      KV_DOUBLE("tol_route", tol_route),
      KV_DOUBLE("tol_divergence", tol_divergence),
      KV_DOUBLE("positivity_C", positivity_C),
      KV_DOUBLE("gate_model_band", gate_model_band),
      KV_DOUBLE("gate_prop3", gate_prop3),
      KV_DOUBLE("gate_prop4", gate_prop4),
      KV_SIZE("identity_points", identity_points),
      KV_SIZE("identity_orbits", identity_orbits),
      KV_DOUBLE("identity_orbit_t", identity_orbit_t),
      KV_SIZE("scan_sigma", scan_sigma),
      KV_SIZE("scan_radii", scan_radii),
  };
  return f;
}

#undef KV_DOUBLE
#undef KV_SIZE
#undef KV_STRING

FactorMode parse_factor(const std::string& s) {
  if (s == "none") return FactorMode::none;
  if (s == "symmetry") return FactorMode::symmetry;
  if (s == "coordinate") return FactorMode::coordinate;
  throw ConfigError("config: strengthen must be none, symmetry or coordinate");
}

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  for (const auto& f : fields())
    if (key == f.key) {
      f.set(c, value);
      return;
    }
  throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(c) + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_config(c))));
  return buf;
}

KerrParams ExperimentConfig::params() const { return KerrParams::make(M, a_over_m * M); }

EvolutionOptions ExperimentConfig::evolution() const {
  EvolutionOptions o;
  o.t_end = t_end * M;
  o.h_t = h_t * M;
  o.slice_dt = slice_dt * M;
  o.rbar = rbar;
  o.integ.rtol = rtol;
  o.integ.atol = atol;
  o.integ.capture_margin = capture_margin;
  o.integ.escape_radius = escape_radius;
  o.wcfg = weights;
  o.strengthen = parse_factor(strengthen);
  o.threads = threads;
  return o;
}

SamplingOptions ExperimentConfig::sampling() const {
  SamplingOptions s;
  if (proposal == "uniform")
    s.proposal = Proposal::uniform;
  else if (proposal == "gaussian")
    s.proposal = Proposal::gaussian;
  else
    throw ConfigError("config: proposal must be uniform or gaussian");
  return s;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> warn;
  if (!(M > 0.0)) throw ConfigError("config: M must be positive");
  if (!(std::abs(a_over_m) < 1.0)) throw ConfigError("config: |a_over_m| must be below 1 (subextremal)");
  if (std::abs(a_over_m) > 0.1)
    warn.push_back("|a|/M = " + fmt_double(std::abs(a_over_m)) + " exceeds 0.1, outside the slowly rotating regime");
  if (particles == 0) throw ConfigError("config: particles must be positive");
  if (!(f0.r_min < f0.r_max) || !(f0.theta_min < f0.theta_max)) throw ConfigError("config: empty f0 support");
  if (!(f0.theta_min > 0.0) || !(f0.theta_max < M_PI)) throw ConfigError("config: f0 theta support must avoid the axis");
  if (!(f0.sigma_r > 0 && f0.sigma_th > 0 && f0.sigma_ph > 0 && f0.truncation > 0 && f0.amplitude >= 0))
    throw ConfigError("config: f0 widths must be positive");
  const double rp = M + std::sqrt(M * M - a_over_m * a_over_m * M * M);
  if (!(f0.r_min * M > rp * (1.0 + 1e-6))) throw ConfigError("config: f0 support reaches the horizon");
  if (!(rtol > 0 && atol > 0 && capture_margin > 0 && escape_radius > f0.r_max))
    throw ConfigError("config: integrator tolerances or radii invalid");
  if (!(rbar >= 0)) throw ConfigError("config: rbar must be non-negative");
  if (!(positivity_C > 0 && gate_prop3 > 0 && gate_prop4 > 0 && gate_model_band >= 1))
    throw ConfigError("config: gates must be positive");
  sampling();
  evolution().validate();
  return warn;
}

}  // namespace kvlasov
