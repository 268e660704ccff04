#include "airslice/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace airslice {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and remembers which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& dst) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      dst = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& dst) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      dst = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Placement parse_placement(const std::string& s) {
  if (s == "homogeneous") return Placement::kHomogeneous;
  if (s == "non-homogeneous") return Placement::kNonHomogeneous;
  throw ConfigError("scenario.kind: expected homogeneous or non-homogeneous, got '" + s + "'");
}

FreezeMode parse_freeze(const std::string& s) {
  if (s == "chain-slots") return FreezeMode::kChainSlots;
  if (s == "busy-event") return FreezeMode::kBusyEvent;
  throw ConfigError("simulation.freeze: expected chain-slots or busy-event, got '" + s + "'");
}

json to_json(const ExperimentConfig& c, bool for_hash) {
  json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["replications"] = c.replications;
  if (!for_hash) {
    j["jobs"] = c.jobs;
    j["out"] = c.out;
  }
  j["scenario"] = {{"kind", to_string(c.scenario.kind)},
                   {"lambda_mean", c.scenario.lambda_mean ? json(*c.scenario.lambda_mean) : json(nullptr)},
                   {"rho", c.scenario.rho ? json(*c.scenario.rho) : json(nullptr)},
                   {"n_aps", c.scenario.n_aps},
                   {"n_isps", c.scenario.n_isps},
                   {"cell", c.scenario.cell}};
  j["channel"] = {{"alpha", c.channel.alpha},
                  {"gain_const", c.channel.gain_const},
                  {"snr_ref_db", c.channel.snr_ref_db},
                  {"min_distance", c.channel.min_distance}};
  j["rate_table"] = c.rate_table;
  j["timing"] = {{"slot", c.timing.slot},   {"propagation", c.timing.propagation}, {"sifs", c.timing.sifs},
                 {"ack", c.timing.ack},     {"txop", c.timing.txop},               {"aifs_ref", c.timing.aifs_ref}};
  j["edca"] = {{"w_min", c.edca.w_min}, {"m", c.edca.m}, {"h", c.edca.h},
               {"a", c.edca.a},         {"q", c.edca.q}, {"l", c.edca.l}};
  j["optimizer"] = {{"tol", c.optimizer.tol},           {"max_iter", c.optimizer.max_iter},
                    {"m_scale", c.optimizer.m_scale},   {"trust", c.optimizer.trust},
                    {"max_retries", c.optimizer.max_retries}, {"conv_tol", c.optimizer.conv_tol},
                    {"x_init", c.optimizer.x_init},     {"eta_scale", c.optimizer.eta_scale}};
  j["simulation"] = {{"slots", c.simulation.slots},
                     {"batches", c.simulation.batches},
                     {"warmup", c.simulation.warmup},
                     {"freeze", to_string(c.simulation.freeze)}};
  j["validate"] = {{"oracle_combos", c.validate.oracle_combos},
                   {"oracle_frozen_slots", c.validate.oracle_frozen_slots},
                   {"gp_instances", c.validate.gp_instances},
                   {"tau1", c.validate.tau1}};
  return j;
}

}  // namespace

const char* to_string(Placement p) { return p == Placement::kHomogeneous ? "homogeneous" : "non-homogeneous"; }
const char* to_string(FreezeMode f) { return f == FreezeMode::kChainSlots ? "chain-slots" : "busy-event"; }

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(j, "config");
  r.get("experiment", c.experiment);
  r.get("seed", c.seed);
  r.get("replications", c.replications);
  r.get("jobs", c.jobs);
  r.get("out", c.out);
  r.get("rate_table", c.rate_table);
  if (const json* s = r.child("scenario")) {
    Reader q(*s, r.path("scenario"));
    std::string kind = to_string(c.scenario.kind);
    q.get("kind", kind);
    c.scenario.kind = parse_placement(kind);
    q.get("lambda_mean", c.scenario.lambda_mean);
    q.get("rho", c.scenario.rho);
    q.get("n_aps", c.scenario.n_aps);
    q.get("n_isps", c.scenario.n_isps);
    q.get("cell", c.scenario.cell);
    q.finish();
  }
  if (const json* s = r.child("channel")) {
    Reader q(*s, r.path("channel"));
    q.get("alpha", c.channel.alpha);
    q.get("gain_const", c.channel.gain_const);
    q.get("snr_ref_db", c.channel.snr_ref_db);
    q.get("min_distance", c.channel.min_distance);
    q.finish();
  }
  if (const json* s = r.child("timing")) {
    Reader q(*s, r.path("timing"));
    q.get("slot", c.timing.slot);
    q.get("propagation", c.timing.propagation);
    q.get("sifs", c.timing.sifs);
    q.get("ack", c.timing.ack);
    q.get("txop", c.timing.txop);
    q.get("aifs_ref", c.timing.aifs_ref);
    q.finish();
  }
  if (const json* s = r.child("edca")) {
    Reader q(*s, r.path("edca"));
    q.get("w_min", c.edca.w_min);
    q.get("m", c.edca.m);
    q.get("h", c.edca.h);
    q.get("a", c.edca.a);
    q.get("q", c.edca.q);
    q.get("l", c.edca.l);
    q.finish();
  }
  if (const json* s = r.child("optimizer")) {
    Reader q(*s, r.path("optimizer"));
    q.get("tol", c.optimizer.tol);
    q.get("max_iter", c.optimizer.max_iter);
    q.get("m_scale", c.optimizer.m_scale);
    q.get("trust", c.optimizer.trust);
    q.get("max_retries", c.optimizer.max_retries);
    q.get("conv_tol", c.optimizer.conv_tol);
    q.get("x_init", c.optimizer.x_init);
    q.get("eta_scale", c.optimizer.eta_scale);
    q.finish();
  }
  if (const json* s = r.child("simulation")) {
    Reader q(*s, r.path("simulation"));
    q.get("slots", c.simulation.slots);
    q.get("batches", c.simulation.batches);
    q.get("warmup", c.simulation.warmup);
    std::string freeze = to_string(c.simulation.freeze);
    q.get("freeze", freeze);
    c.simulation.freeze = parse_freeze(freeze);
    q.finish();
  }
  if (const json* s = r.child("validate")) {
    Reader q(*s, r.path("validate"));
    q.get("oracle_combos", c.validate.oracle_combos);
    q.get("oracle_frozen_slots", c.validate.oracle_frozen_slots);
    q.get("gp_instances", c.validate.gp_instances);
    q.get("tau1", c.validate.tau1);
    q.finish();
  }
  r.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) { return to_json(cfg, false).dump(2); }

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = to_json(cfg, true).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void validate(const ExperimentConfig& c) {
  static const std::set<std::string> kNames = {"throughput-vs-density-homogeneous",
                                               "throughput-vs-density-nonhomogeneous", "throughput-vs-load",
                                               "fairness-vs-density", "iterations"};
  if (!kNames.count(c.experiment)) throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (c.replications < 1) throw ConfigError("replications must be >= 1");
  if (c.jobs < 0) throw ConfigError("jobs must be >= 0");
  auto positive = [](const std::optional<std::vector<double>>& v, const char* name, double hi) {
    if (!v) return;
    if (v->empty()) throw ConfigError(std::string(name) + " must not be empty");
    for (double x : *v) {
      if (!(x > 0.0 && x <= hi)) throw ConfigError(std::string(name) + " values out of range");
    }
  };
  positive(c.scenario.lambda_mean, "scenario.lambda_mean", 500.0);
  if (c.scenario.rho) {
    if (c.scenario.rho->empty()) throw ConfigError("scenario.rho must not be empty");
    for (double x : *c.scenario.rho) {
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("scenario.rho values must lie in [0, 1]");
    }
  }
  TopologyConfig tc;
  tc.n_aps = c.scenario.n_aps;
  tc.n_isps = c.scenario.n_isps;
  tc.cell = c.scenario.cell;
  try {
    airslice::validate(tc);
    airslice::validate(c.edca);
    (void)derive_timing(c.timing);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(c.channel.alpha >= 2.0)) throw ConfigError("channel.alpha must be >= 2");
  if (!(c.channel.gain_const > 0.0) || !(c.channel.min_distance > 0.0)) {
    throw ConfigError("channel gain and minimum distance must be positive");
  }
  if (!(c.optimizer.tol > 0.0) || c.optimizer.max_iter < 1 || !(c.optimizer.m_scale > 1.0) ||
      c.optimizer.trust.empty() || c.optimizer.max_retries < 0 || !(c.optimizer.conv_tol > 0.0) ||
      !(c.optimizer.x_init > 0.0) || !(c.optimizer.eta_scale >= 0.0)) {
    throw ConfigError("optimizer settings out of range");
  }
  for (double s : c.optimizer.trust) {
    if (!(s > 1.0)) throw ConfigError("optimizer.trust factors must exceed 1");
  }
  if (c.simulation.slots < 1000 || c.simulation.batches < 2 ||
      !(c.simulation.warmup >= 0.0 && c.simulation.warmup <= 0.5)) {
    throw ConfigError("simulation settings out of range");
  }
  if (c.validate.oracle_combos < 0 || c.validate.oracle_frozen_slots < 1 || c.validate.gp_instances < 0) {
    throw ConfigError("validate settings out of range");
  }
  for (double t : c.validate.tau1) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("validate.tau1 values must lie in (0, 1)");
  }
}

AssocOptions assoc_options(const ExperimentConfig& c) {
  AssocOptions o;
  o.max_iter = c.optimizer.max_iter;
  o.conv_tol = c.optimizer.conv_tol;
  o.x_init = c.optimizer.x_init;
  o.trust = c.optimizer.trust;
  o.max_retries = c.optimizer.max_retries;
  o.m_scale = c.optimizer.m_scale;
  o.gp.tol = c.optimizer.tol;
  return o;
}

RateTable rate_table(const ExperimentConfig& c) {
  if (c.rate_table.empty()) return RateTable::ieee80211a();
  std::ifstream in(c.rate_table);
  if (!in) throw ConfigError("cannot open rate table " + c.rate_table);
  return RateTable::load_csv(in);
}

}  // namespace airslice
