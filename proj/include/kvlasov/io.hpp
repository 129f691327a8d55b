#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kvlasov/geodesic_flow.hpp"

namespace kvlasov {

using json = nlohmann::ordered_json;

// Columnar ensemble file (t r theta phi v_t v_r v_theta v_phi w) plus a
// JSON sidecar at path + ".json" with params, seed, f0 and provenance.
void write_ensemble(const Ensemble& ens, const std::string& path);
Ensemble read_ensemble(const std::string& path);
json ensemble_metadata(const Ensemble& ens);
json to_json(const InitialDatum& f0);

// Columns: t r theta phi v_t v_r v_theta v_phi drift_L drift_q.
void write_trajectory(const Trajectory& tr, const std::string& path);

// Shortest round-tripping decimal form.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t ncol_;
};

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);
  void write(const json& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

void write_json(const std::string& path, const json& j);

}  // namespace kvlasov
