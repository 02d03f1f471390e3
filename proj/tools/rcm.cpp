// rcm: theory tables, single graph builds, experiments and the oracle suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "rcm/rcm.hpp"

using nlohmann::json;
using namespace rcm;

namespace {

// Bad flag value; reported with the flag name, exit code 2.
struct UsageError : std::runtime_error {
  UsageError(const std::string& flag, const std::string& what) : std::runtime_error("--" + flag + ": " + what) {}
};

// Flag values layered over an optional JSON config file.
class Settings {
 public:
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config", "cannot read '" + path + "'");
    try {
      json doc = json::parse(in);
      if (!doc.is_object()) throw UsageError("config", "top level must be an object");
      for (auto& [key, value] : doc.items()) values_[normalize(key)] = value;
    } catch (const json::exception& e) {
      throw UsageError("config", e.what());
    }
  }

  void set(const std::string& key, const std::string& text) { values_[key] = text; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = values_.at(key);
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = values_.at(key);
    if (v.is_number()) return v.get<double>();
    return parse_real(key, text(key, ""));
  }

  long long integer(const std::string& key, long long fallback) const {
    const double x = real(key, static_cast<double>(fallback));
    if (x != std::floor(x)) throw UsageError(flag(key), "expected an integer");
    return static_cast<long long>(x);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = values_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const std::string s = text(key, "");
    try {
      std::size_t used = 0;
      const auto value = std::stoull(s, &used);
      if (used == s.size() && s.find('-') == std::string::npos) return value;
    } catch (const std::exception&) {
    }
    throw UsageError(flag(key), "expected a nonnegative integer, got '" + s + "'");
  }

  std::vector<double> grid(const std::string& key) const {
    if (!has(key)) throw UsageError(flag(key), "is required");
    const json& v = values_.at(key);
    std::vector<double> out;
    if (v.is_array()) {
      for (const auto& item : v) {
        if (!item.is_number()) throw UsageError(flag(key), "entries must be numbers");
        out.push_back(item.get<double>());
      }
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      std::stringstream ss(v.get<std::string>());
      for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_real(key, item));
    }
    if (out.empty()) throw UsageError(flag(key), "needs at least one value");
    return out;
  }

  static std::string flag(const std::string& key) {
    std::string f = key;
    for (char& ch : f)
      if (ch == '_') ch = '-';
    return f;
  }

 private:
  static std::string normalize(std::string key) {
    for (char& ch : key)
      if (ch == '-') ch = '_';
    return key;
  }

  static double parse_real(const std::string& key, const std::string& s) {
    try {
      std::size_t used = 0;
      const double x = std::stod(s, &used);
      if (used == s.size()) return x;
    } catch (const std::exception&) {
    }
    throw UsageError(flag(key), "expected a number, got '" + s + "'");
  }

  std::map<std::string, json> values_;
};

template <class T>
T checked(const std::string& key, const std::function<T()>& fn) {
  try {
    return fn();
  } catch (const InvalidInput& e) {
    throw UsageError(Settings::flag(key), e.what());
  } catch (const ModelInvalid& e) {
    throw UsageError(Settings::flag(key), e.what());
  }
}

ConnectionFunction read_g(const Settings& s, const std::string& fallback = "") {
  if (!s.has("g") && fallback.empty()) throw UsageError("g", "is required");
  return checked<ConnectionFunction>("g", [&] { return ConnectionFunction::parse(s.text("g", fallback)); });
}

int read_dim(const Settings& s, const ConnectionFunction& g) {
  const long long dim = s.integer("dim", 2);
  if (dim < 1 || dim > max_dimension) throw UsageError("dim", "must lie in [1, 8], got " + std::to_string(dim));
  checked<int>("g", [&] {
    g.validate(static_cast<int>(dim));
    return 0;
  });
  return static_cast<int>(dim);
}

double read_gamma(const Settings& s) {
  const double gamma = s.real("gamma", 1.0);
  if (!(gamma > 0.0)) throw UsageError("gamma", "must be positive");
  return gamma;
}

void print(const json& doc) { std::cout << doc.dump(2) << std::endl; }

int cmd_theory(const Settings& s) {
  const auto g = read_g(s);
  const int dim = read_dim(s, g);
  const double gamma = read_gamma(s);
  auto params = TheoryParams::make(g, dim);
  params.gamma = gamma;
  params.b = s.real("b", 0.0);
  params.beta_prime = s.real("beta_prime", 0.0);
  params.t = s.real("t", dim);

  json out;
  out["g"] = g.name();
  out["dim"] = dim;
  out["theta"] = params.theta;
  out["alpha"] = params.alpha;
  out["beta"] = params.beta;
  out["gamma"] = gamma;
  const TailClass tail = g.tail_class();
  out["tail"] = tail.kind == TailKind::bounded_support    ? "bounded_support"
                : tail.kind == TailKind::exponential_tail ? "exponential"
                                                          : "polynomial";
  out["table"] = json::array();
  if (s.has("n"))
    for (double n : s.grid("n")) {
      json row;
      row["n"] = n;
      row["r_hat"] = checked<double>("n", [&] { return theory::r_hat(n, gamma, params.alpha, dim); });
      out["table"].push_back(row);
    }
  out["predictions"] = json::object();
  for (auto kind : {StatisticKind::isolated_mean, StatisticKind::isolated_dispersion, StatisticKind::dn_ratio,
                    StatisticKind::connectivity_fraction, StatisticKind::connectivity_gamma_threshold,
                    StatisticKind::typical_longest_edge, StatisticKind::longest_edge_ratio, StatisticKind::degree_tail,
                    StatisticKind::max_degree_ratio, StatisticKind::min_degree_ratio}) {
    try {
      out["predictions"][to_string(kind)] = to_json(theory::predict(kind, params));
    } catch (const NotApplicable& e) {
      out["predictions"][to_string(kind)] = {{"claim", "not_applicable"}, {"reason", e.hypothesis()}};
    }
  }
  print(out);
  return 0;
}

BuildMode read_mode(const Settings& s) {
  return checked<BuildMode>("mode", [&] { return BuildMode::parse(s.text("mode", "exact")); });
}

int cmd_build(const Settings& s) {
  const auto g = read_g(s);
  const int dim = read_dim(s, g);
  const auto grid = s.grid("n");
  if (grid.size() != 1 || !(grid[0] > 0.0)) throw UsageError("n", "build takes a single positive n");
  const double r = s.real("r", NAN);
  if (!(r >= 0.0)) throw UsageError("r", "must be a nonnegative number");
  const BuildMode mode = read_mode(s);
  CoupledEnsemble ens(s.seed("seed", 1), dim, s.text("palm", "false") == "true");
  GraphEngine engine(g, dim);
  const auto graph = checked<GraphSnapshot>("n", [&] { return engine.build(ens, grid[0], r, mode); });
  const auto degrees = degree_stats(graph);
  json out;
  out["n"] = grid[0];
  out["r"] = r;
  out["N"] = graph.vertex_count;
  out["edges"] = graph.edges.size();
  out["isolated"] = isolated_count(graph);
  out["max_degree"] = degrees.max_degree;
  out["min_degree"] = degrees.min_degree;
  out["longest_edge"] = longest_edge(graph);
  out["components"] = component_count(graph);
  out["mode"] = mode.name();
  out["cutoff"] = std::isinf(graph.cutoff) ? json(nullptr) : json(graph.cutoff);
  out["certified_bound"] = graph.certified_bound;
  print(out);
  return 0;
}

void check_writable(const std::string& prefix) {
  const std::filesystem::path path(prefix);
  std::filesystem::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw UsageError("out", "directory '" + dir.string() + "' does not exist");
  if (::access(dir.c_str(), W_OK) != 0) throw UsageError("out", "directory '" + dir.string() + "' is not writable");
}

int cmd_experiment(const Settings& s, bool coupled) {
  ExperimentConfig c;
  if (!s.has("experiment")) throw UsageError("experiment", "is required");
  c.statistic = checked<StatisticKind>("experiment", [&] { return parse_statistic(s.text("experiment", "")); });
  c.g = read_g(s);
  c.dim = read_dim(s, c.g);
  c.n_grid = s.grid("n");
  const long long reps = s.integer("reps", 1);
  if (reps < 1) throw UsageError("reps", "must be at least 1");
  c.replications = static_cast<std::size_t>(reps);
  c.seed = s.seed("seed", 1);
  c.mode = read_mode(s);
  c.b = s.real("b", 0.0);
  c.gamma = read_gamma(s);
  c.beta_prime = s.real("beta_prime", 0.0);
  if (s.has("t")) c.t = s.real("t", 0.0);
  const long long threads = s.integer("threads", 0);
  if (threads < 0) throw UsageError("threads", "must be nonnegative");
  c.threads = static_cast<unsigned>(threads);
  if (!s.has("out")) throw UsageError("out", "is required");
  const std::string out = s.text("out", "");
  check_writable(out);
  checked<int>("experiment", [&] {
    StatisticEvaluator::validate(c);
    return 0;
  });

  const ExperimentResult result = coupled ? sweep_coupled(c) : run(c);
  persist(result, out);
  print(summary_json(result));
  std::fprintf(stderr, "wrote %s.raw.csv and %s.summary.json in %.2fs\n", out.c_str(), out.c_str(),
               result.elapsed_seconds);
  return 0;
}

int cmd_oracle(const Settings& s) {
  std::vector<std::string> names = {"indicator", "scaled_indicator:0.5", "exp:1", "pow:8", "gauss"};
  if (s.has("g")) names = {read_g(s).name()};
  const auto seeds = s.integer("seeds", 100);
  if (seeds < 1) throw UsageError("seeds", "must be at least 1");
  const auto grid = s.has("n") ? s.grid("n") : std::vector<double>{50.0};
  if (grid.size() != 1 || !(grid[0] > 0.0)) throw UsageError("n", "oracle takes a single positive n");
  json out;
  out["seeds"] = seeds;
  out["n"] = grid[0];
  out["results"] = json::array();
  std::size_t checks = 0, failures = 0;
  for (const auto& name : names) {
    const auto g = ConnectionFunction::parse(name);
    const int dim = read_dim(s, g);
    const auto report = oracle::run_suite(g, dim, static_cast<std::size_t>(seeds), grid[0], s.seed("seed", 20261015));
    checks += report.checks;
    failures += report.failures;
    out["results"].push_back({{"g", name},
                              {"dim", dim},
                              {"checks", report.checks},
                              {"failures", report.failures},
                              {"edge_set_failures", report.edge_set_failures},
                              {"isolation_failures", report.isolation_failures},
                              {"connectivity_failures", report.connectivity_failures},
                              {"recount_failures", report.recount_failures},
                              {"messages", report.messages}});
  }
  out["checks"] = checks;
  out["failures"] = failures;
  out["passed"] = failures == 0;
  print(out);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random connection model simulation lab"};
  app.require_subcommand(1);

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> given;
  std::string config_path;

  auto add = [&](CLI::App* cmd, const std::string& name, const std::string& help) {
    std::string key = name;
    for (char& ch : key)
      if (ch == '-') ch = '_';
    given[cmd->get_name() + "/" + key] = cmd->add_option("--" + name, raw[cmd->get_name() + "/" + key], help);
  };
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file with default values for the flags");
    add(cmd, "g", "connection function: indicator, scaled_indicator:p, exp:c, pow:c, gauss");
    add(cmd, "dim", "dimension d in [1, 8] (default 2)");
    add(cmd, "seed", "ensemble seed");
  };

  auto* theory_cmd = app.add_subcommand("theory", "print theta, alpha, beta, r_hat table and predicted limits");
  common(theory_cmd);
  add(theory_cmd, "gamma", "radius scale gamma (default 1)");
  add(theory_cmd, "n", "comma-separated n grid");
  add(theory_cmd, "b", "isolation shift b");
  add(theory_cmd, "beta-prime", "edge-length shift beta'");
  add(theory_cmd, "t", "degree-tail quantile t (default d)");

  auto* build_cmd = app.add_subcommand("build", "build one graph and print its statistics");
  common(build_cmd);
  add(build_cmd, "n", "intensity n");
  add(build_cmd, "r", "radius r");
  add(build_cmd, "mode", "exact or trunc:<epsilon>");
  add(build_cmd, "palm", "true to add a vertex at the origin");

  auto experiment = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    common(cmd);
    add(cmd, "experiment", "statistic: isolated_mean, isolated_dispersion, dn_ratio, connectivity_fraction, "
                           "typical_longest_edge, longest_edge_ratio, degree_tail, max_degree_ratio, min_degree_ratio");
    add(cmd, "n", "comma-separated increasing n grid");
    add(cmd, "reps", "replications per n");
    add(cmd, "mode", "exact or trunc:<epsilon>");
    add(cmd, "b", "isolation shift b");
    add(cmd, "gamma", "radius scale gamma");
    add(cmd, "beta-prime", "edge-length shift beta'");
    add(cmd, "t", "degree-tail quantile t (default d)");
    add(cmd, "threads", "worker threads (0: all cores)");
    add(cmd, "out", "output prefix for <out>.raw.csv and <out>.summary.json");
    return cmd;
  };
  auto* run_cmd = experiment("run", "independent replications of a statistic across an n grid");
  auto* sweep_cmd = experiment("sweep", "coupled trajectories along an n grid (dn_ratio, max/min_degree_ratio)");

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force equivalence suite on small instances");
  common(oracle_cmd);
  add(oracle_cmd, "seeds", "number of seeds (default 100)");
  add(oracle_cmd, "n", "intensity n (default 50)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    Settings settings;
    if (!config_path.empty()) settings.load_file(config_path);
    const std::string prefix = chosen->get_name() + "/";
    for (const auto& [id, option] : given)
      if (id.rfind(prefix, 0) == 0 && option->count() > 0) settings.set(id.substr(prefix.size()), raw[id]);

    if (chosen == theory_cmd) return cmd_theory(settings);
    if (chosen == build_cmd) return cmd_build(settings);
    if (chosen == run_cmd) return cmd_experiment(settings, false);
    if (chosen == sweep_cmd) return cmd_experiment(settings, true);
    if (chosen == oracle_cmd) return cmd_oracle(settings);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
