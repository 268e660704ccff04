#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "airslice/analytics.hpp"
#include "airslice/assoc.hpp"
#include "airslice/scenario.hpp"
#include "airslice/sim.hpp"

namespace airslice {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioSection {
  Placement kind = Placement::kHomogeneous;
  std::optional<std::vector<double>> lambda_mean;  // experiment default when unset
  std::optional<std::vector<double>> rho;
  int n_aps = 4;
  int n_isps = 2;
  double cell = 5.0;
};

struct OptimizerSection {
  double tol = 1e-10;  // GP solver gap target
  int max_iter = 200;
  double m_scale = 10.0;
  std::vector<double> trust = {10.0, 3.0, 1.5};
  int max_retries = 5;
  double conv_tol = 1e-4;
  double x_init = 0.01;
  double eta_scale = 1.0;  // multiplies n_aps / n_isps
};

struct SimulationSection {
  std::int64_t slots = 2'000'000;
  int batches = 20;
  double warmup = 0.1;
  FreezeMode freeze = FreezeMode::kChainSlots;
};

struct ValidateSection {
  int oracle_combos = 24;
  int oracle_frozen_slots = 10;
  int gp_instances = 10;
  std::vector<double> tau1 = {0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1};
};

struct ExperimentConfig {
  std::string experiment = "fairness-vs-density";
  std::uint64_t seed = 1;
  int replications = 20;
  int jobs = 0;
  std::string out = "out";
  ScenarioSection scenario;
  ChannelModel channel;
  std::string rate_table;  // CSV path; empty selects 802.11a
  RawTiming timing;
  EdcaParams edca;
  OptimizerSection optimizer;
  SimulationSection simulation;
  ValidateSection validate;
};

/// Parses JSON text. Unknown keys anywhere are rejected with their path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON (sorted keys, every field present).
std::string dump_config(const ExperimentConfig& cfg);
/// FNV-1a of the canonical JSON, ignoring `out` and `jobs`.
std::uint64_t config_hash(const ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

AssocOptions assoc_options(const ExperimentConfig& cfg);
RateTable rate_table(const ExperimentConfig& cfg);

const char* to_string(Placement p);
const char* to_string(FreezeMode f);

}  // namespace airslice
