#pragma once

// Result files: `<prefix>.raw.csv` (one row per sample) and
// `<prefix>.summary.json` (aggregates, prediction, config echo). Timings are
// left out so identical runs give byte-identical files.

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rcm/experiments.hpp"

namespace rcm {

inline nlohmann::json to_json(const PredictedLimit& p) {
  nlohmann::json j;
  j["value"] = p.value;
  j["claim"] = to_string(p.claim);
  j["band"] = p.band ? nlohmann::json::array({p.band->first, p.band->second}) : nlohmann::json(nullptr);
  j["basis"] = p.basis;
  return j;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["statistic"] = to_string(c.statistic);
  j["g"] = c.g.name();
  j["dim"] = c.dim;
  j["n"] = c.n_grid;
  j["reps"] = c.replications;
  j["seed"] = c.seed;
  j["mode"] = c.mode.name();
  j["b"] = c.b;
  j["gamma"] = c.gamma;
  j["beta_prime"] = c.beta_prime;
  j["t"] = c.quantile();
  return j;
}

inline nlohmann::json to_json(const Summary& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["count"] = s.count;
  j["skipped"] = s.skipped;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["std_error"] = s.std_error;
  j["ci95"] = {s.ci_low, s.ci_high};
  j["median"] = s.median;
  j["min"] = s.min;
  j["max"] = s.max;
  j["dispersion"] = s.dispersion ? nlohmann::json(*s.dispersion) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json summary_json(const ExperimentResult& r) {
  nlohmann::json j;
  j["version"] = r.version;
  j["seed"] = r.config.seed;
  j["coupled"] = r.coupled;
  j["config"] = to_json(r.config);
  j["per_n"] = nlohmann::json::array();
  for (const auto& s : r.summaries) j["per_n"].push_back(to_json(s));
  if (r.prediction) {
    j["prediction"] = to_json(*r.prediction);
    j["claim"] = to_string(r.prediction->claim);
  } else {
    j["prediction"] = nullptr;
    j["claim"] = "not_applicable";
    j["not_applicable_reason"] = r.prediction_note;
  }
  return j;
}

inline std::string raw_csv(const ExperimentResult& r) {
  std::string out = "statistic,n,replication,value\n";
  const std::string name = to_string(r.config.statistic);
  char line[160];
  for (const auto& s : r.samples) {
    std::snprintf(line, sizeof line, "%s,%.17g,%zu,%.17g\n", name.c_str(), s.n, s.replication, s.value);
    out += line;
  }
  return out;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.close();
  if (!file) throw IoError("failed writing '" + path + "'");
}

}  // namespace detail

inline void persist(const ExperimentResult& r, const std::string& prefix) {
  detail::write_file(prefix + ".raw.csv", raw_csv(r));
  detail::write_file(prefix + ".summary.json", summary_json(r).dump(2) + "\n");
}

}  // namespace rcm
