#include "kvlasov/io.hpp"

#include <charconv>
#include <sstream>

namespace kvlasov {

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json to_json(const InitialDatum& f0) {
  return json{{"r_min", f0.r_min},       {"r_max", f0.r_max},         {"theta_min", f0.theta_min},
              {"theta_max", f0.theta_max}, {"sigma_r", f0.sigma_r},   {"sigma_th", f0.sigma_th},
              {"sigma_ph", f0.sigma_ph},   {"mu_r", f0.mu_r},         {"mu_th", f0.mu_th},
              {"mu_ph", f0.mu_ph},         {"truncation", f0.truncation}, {"amplitude", f0.amplitude}};
}

static InitialDatum datum_from_json(const json& j) {
  InitialDatum f;
  f.r_min = j.at("r_min");
  f.r_max = j.at("r_max");
  f.theta_min = j.at("theta_min");
  f.theta_max = j.at("theta_max");
  f.sigma_r = j.at("sigma_r");
  f.sigma_th = j.at("sigma_th");
  f.sigma_ph = j.at("sigma_ph");
  f.mu_r = j.at("mu_r");
  f.mu_th = j.at("mu_th");
  f.mu_ph = j.at("mu_ph");
  f.truncation = j.at("truncation");
  f.amplitude = j.at("amplitude");
  return f;
}

json ensemble_metadata(const Ensemble& ens) {
  return json{{"format", "kvlasov-ensemble-1"},
              {"columns", {"t", "r", "theta", "phi", "v_t", "v_r", "v_theta", "v_phi", "w"}},
              {"params", {{"M", ens.params.M}, {"a", ens.params.a}}},
              {"seed", ens.seed},
              {"N", ens.particles.size()},
              {"f0", to_json(ens.f0)},
              {"provenance",
               {{"proposal", ens.provenance.proposal},
                {"layout", ens.provenance.layout},
                {"requested", ens.provenance.requested},
                {"rejected", ens.provenance.rejected},
                {"positive_vt", ens.provenance.positive_vt},
                {"box_volume", ens.provenance.box_volume}}}};
}

void write_ensemble(const Ensemble& ens, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_ensemble: cannot open " + path);
  out << "# t r theta phi v_t v_r v_theta v_phi w\n";
  for (const auto& p : ens.particles) {
    const auto& s = p.state;
    out << format_double(s.x.t) << ' ' << format_double(s.x.r) << ' ' << format_double(s.x.theta) << ' '
        << format_double(s.x.phi);
    for (int i = 0; i < 4; ++i) out << ' ' << format_double(s.v_cov[i]);
    out << ' ' << format_double(p.w) << '\n';
  }
  write_json(path + ".json", ensemble_metadata(ens));
}

Ensemble read_ensemble(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw Error("read_ensemble: missing sidecar " + path + ".json");
  const json meta = json::parse(side);
  Ensemble ens;
  ens.params = KerrParams::make(meta.at("params").at("M"), meta.at("params").at("a"));
  ens.seed = meta.at("seed");
  ens.f0 = datum_from_json(meta.at("f0"));
  const auto& pv = meta.at("provenance");
  ens.provenance.proposal = pv.at("proposal");
  ens.provenance.layout = pv.at("layout");
  ens.provenance.requested = pv.at("requested");
  ens.provenance.rejected = pv.at("rejected");
  ens.provenance.positive_vt = pv.at("positive_vt");
  ens.provenance.box_volume = pv.at("box_volume");

  std::ifstream in(path);
  if (!in) throw Error("read_ensemble: cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    BLPoint x;
    Vec4 v{};
    double w = 0.0;
    if (!(ls >> x.t >> x.r >> x.theta >> x.phi >> v[0] >> v[1] >> v[2] >> v[3] >> w))
      throw Error("read_ensemble: malformed row in " + path);
    ens.particles.push_back(Particle{state_from_covariant(ens.params, x, v), w});
  }
  if (ens.particles.size() != meta.at("N").get<std::size_t>()) throw Error("read_ensemble: row count mismatch");
  return ens;
}

void write_trajectory(const Trajectory& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_trajectory: cannot open " + path);
  out << "# t r theta phi v_t v_r v_theta v_phi drift_L drift_q terminal=" << to_string(tr.terminal) << "\n";
  for (const auto& s : tr.samples) {
    out << format_double(s.t) << ' ' << format_double(s.state.x.r) << ' ' << format_double(s.state.x.theta) << ' '
        << format_double(s.state.x.phi);
    for (int i = 0; i < 4; ++i) out << ' ' << format_double(s.state.v_cov[i]);
    out << ' ' << format_double(s.drift.L) << ' ' << format_double(s.drift.q) << '\n';
  }
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : path_(path), out_(path), ncol_(columns.size()) {
  if (!out_) throw Error("cannot open " + path);
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncol_) throw Error("CsvWriter: column count mismatch in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (values.size() != ncol_) throw Error("CsvWriter: column count mismatch in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
  out_ << '\n';
}

JsonlWriter::JsonlWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw Error("cannot open " + path);
}

void JsonlWriter::write(const json& record) { out_ << record.dump() << '\n'; }

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace kvlasov
