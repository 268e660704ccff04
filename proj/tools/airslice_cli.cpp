#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "airslice/experiments.hpp"
#include "json.hpp"

namespace {

using airslice::ExperimentConfig;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> replications;
  std::optional<std::string> experiment;
  std::optional<int> jobs;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "master seed (fallback: config file, then AIRSLICE_SEED)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--replications", o.replications, "replications per sweep point");
  app->add_option("--experiment", o.experiment, "experiment name");
  app->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
}

bool file_sets_seed(const std::string& path) {
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  return j.is_object() && j.contains("seed");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : airslice::load_config(o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
  } else if (o.config.empty() || !file_sets_seed(o.config)) {
    if (const char* env = std::getenv("AIRSLICE_SEED")) {
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw airslice::ConfigError(std::string("AIRSLICE_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  if (o.out) cfg.out = *o.out;
  if (o.replications) cfg.replications = *o.replications;
  if (o.experiment) cfg.experiment = *o.experiment;
  if (o.jobs) cfg.jobs = *o.jobs;
  airslice::validate(cfg);
  return cfg;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw airslice::ConfigError("not a number: '" + item + "'");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Airtime slicing for multi-cell EDCA WLANs"};
  app.require_subcommand(1);
  Overrides o;

  auto* validate = app.add_subcommand("validate", "model, simulator and solver batteries");
  auto* simulate = app.add_subcommand("simulate", "slot-level simulation of one BSS");
  auto* optimize = app.add_subcommand("optimize", "GP association for one generated topology");
  auto* experiment = app.add_subcommand("experiment", "replicated experiment family");
  auto* params = app.add_subcommand("params", "EDCA parameters for a table of transmission probabilities");
  for (auto* s : {validate, simulate, optimize, experiment, params}) add_common(s, o);

  std::string stations;
  simulate->add_option("--stations", stations, "CSV: sta,w_min,m,h,a,q,l,rate_mbps")
      ->required()
      ->check(CLI::ExistingFile);
  std::string taus;
  params->add_option("--taus", taus, "comma-separated targets")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(o);
    const std::filesystem::path out = cfg.out;
    int failures = 0;
    if (*validate) {
      failures = airslice::cmd_validate(cfg, out, std::cerr);
    } else if (*simulate) {
      failures = airslice::cmd_simulate(cfg, airslice::read_stations_csv(stations), out, std::cerr);
    } else if (*optimize) {
      failures = airslice::cmd_optimize(cfg, out, std::cerr);
    } else if (*experiment) {
      failures = airslice::cmd_experiment(cfg, out, std::cerr);
    } else if (*params) {
      failures = airslice::cmd_params(cfg, parse_list(taus), out, std::cerr);
    }
    return failures == 0 ? 0 : 1;
  } catch (const airslice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
