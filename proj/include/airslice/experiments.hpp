#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "airslice/assoc.hpp"
#include "airslice/chain_oracle.hpp"
#include "airslice/config.hpp"
#include "airslice/control.hpp"
#include "airslice/scenario.hpp"
#include "airslice/sim.hpp"

namespace airslice {

// ---------------------------------------------------------------------------
// Closed form vs. brute-force chain

struct OracleCombo {
  EdcaParams params;
  double p = 0;
};

/// Full grid w_min {0,1,8,16,32} x m,h {0,1,2,6} x a {1,2,6} x q {0.3,0.5,1}
/// x l {0,4,100} x p {1e-9,0.1,0.3,0.6}, restricted to chains of at most
/// `max_states` states, shuffled by `seed` and picked round-robin over p.
std::vector<OracleCombo> oracle_combos(std::size_t count, std::uint64_t seed, int frozen_slots,
                                       std::size_t max_states = 50'000);

struct OracleCase {
  OracleCombo combo;
  std::size_t states = 0;
  double closed_form = 0;
  double power = 0;
  double direct = 0;
  std::int64_t iterations = 0;
  bool converged = false;
  double rel_power = 0;   // |power - closed| / closed
  double rel_direct = 0;
  double seconds = 0;
};

OracleCase run_oracle_case(const OracleCombo& combo, int frozen_slots, const PowerIterationOptions& opts);
std::vector<OracleCase> oracle_battery(const std::vector<OracleCombo>& combos, int frozen_slots,
                                       Execution exec, int jobs = 0);

// ---------------------------------------------------------------------------
// Six-STA control sweep

enum class ControlMode { kCascade, kWMin, kL, kA, kM, kH };
const char* to_string(ControlMode m);
std::vector<ControlMode> all_control_modes();

struct SimSettings {
  std::int64_t slots = 2'000'000;
  int batches = 20;
  double warmup = 0.1;
  FreezeMode freeze = FreezeMode::kChainSlots;
};
SimSettings sim_settings(const ExperimentConfig& cfg);

struct ControlPoint {
  ControlMode mode = ControlMode::kCascade;
  double tau1 = 0;
  EdcaParams params1;
  bool unreachable = false;
  double achieved_tau = 0;          // closed form at the target busy probability
  double analytic_throughput = 0;   // Mbps, throughput at the target taus
  double measured_throughput = 0;   // Mbps
  double measured_ci = 0;
  double measured_tau = 0;
  double measured_tau_ci = 0;
  double rel_error = 0;             // measured vs analytic throughput
  bool pass = false;                // within max(3 CI, 5%)
};

/// STA 1 targets tau1 through `mode`; STAs 2..6 target 0.005 through the
/// cascade. All STAs use `rate_mbps`.
std::vector<ControlPoint> control_sweep(const std::vector<double>& tau1, const std::vector<ControlMode>& modes,
                                        const TimingConstants& timing, const SimSettings& sim, std::uint64_t seed,
                                        Execution exec, int jobs = 0, double rate_mbps = 54.0);

/// Largest tau1 in the sweep for which a mode tracks the target within 10%
/// (closed form), per mode.
struct FeasibleRange {
  ControlMode mode;
  double analytic_max = 0;
  double measured_max = 0;
};
std::vector<FeasibleRange> feasible_ranges(const std::vector<ControlPoint>& pts);

// ---------------------------------------------------------------------------
// Cascade round trip

struct RoundTripPoint {
  double p = 0;
  double target = 0;
  EdcaParams params;
  bool unreachable = false;
  double achieved = 0;
  double rel_error = 0;
  double measured_tau = 0;
  double measured_ci = 0;
  bool sim_pass = false;  // within max(3 CI, 10%)
};

/// `count` targets log-spaced in [1e-4, 0.9 * ceiling(p)] per p. The
/// simulated STA sees an independent external contender that keeps the
/// channel busy with probability p; skipped when sim.slots == 0.
std::vector<RoundTripPoint> round_trip(const std::vector<double>& ps, int count, int frozen_slots,
                                       const TimingConstants& timing, const SimSettings& sim, std::uint64_t seed,
                                       Execution exec, int jobs = 0);

// ---------------------------------------------------------------------------
// GP batteries

struct GpInstance {
  double rate1 = 0;
  double rate2 = 0;
  double eta = 0;
  AssociationSolution solution;
  GridOptimum grid;
  double gap = 0;  // (grid - gp) / grid
  bool pass = false;
};

/// Random 1-AP, 2-STA, 2-ISP instances with rates drawn from the 802.11a
/// table and eta alternating over {0.3, 0.45}.
std::vector<GpInstance> gp_vs_grid(int count, std::uint64_t seed, const TimingConstants& timing,
                                   const AssocOptions& opts, int resolution = 400);

struct AmGmReport {
  int posynomials = 0;
  int samples = 0;
  double worst_tangency = 0;     // max |g_hat(x0)/g(x0) - 1|
  double worst_dominance = 0;    // max (g_hat(x)/g(x) - 1), <= 0 expected
};
AmGmReport amgm_battery(int count, std::uint64_t seed, int samples_per = 20);

struct KnownGp {
  std::string name;
  double expected = 0;
  double objective = 0;
  double rel_error = 0;
  std::string status;
};
std::vector<KnownGp> known_gp_battery();

// ---------------------------------------------------------------------------
// Replications

struct SchemeMetrics {
  double total = 0;  // Mbps
  std::vector<double> isp_throughput;
  std::vector<double> isp_airtime;
  double jain = 0;   // NaN when undefined
};

struct ReplicationResult {
  std::string sweep;
  int replication = 0;
  std::uint64_t seed = 0;
  std::size_t n_sta = 0;
  std::size_t unserved = 0;
  bool ok = false;             // GP produced a converged, feasible solution
  std::string status;
  std::string flag;
  SchemeMetrics gp;
  SchemeMetrics max_snr;
  int iterations = 0;
  bool trace_monotone = true;
  double worst_trace_drop = 0;  // largest relative decrease in phase 2
  double max_residual = 0;
  double wall_seconds = 0;
};

ReplicationResult run_replication(const ExperimentConfig& cfg, const TopologyConfig& tc, const std::string& sweep,
                                  int replication, std::uint64_t seed);

struct SweepPoint {
  std::string label;
  TopologyConfig topology;
};
std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

std::vector<ReplicationResult> run_replications(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points,
                                                Execution exec);

struct Summary {
  std::string sweep, scheme, isp, metric;
  double mean = 0;
  double ci95 = 0;
};
std::vector<Summary> summarize(const std::vector<ReplicationResult>& reps, const std::vector<SweepPoint>& points,
                               int n_isps);

// ---------------------------------------------------------------------------
// Commands: each writes its CSVs into `out` and returns the number of failed
// checks (0 on success).

int cmd_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_validate(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);

struct StationSpec {
  EdcaParams params;
  double rate_mbps = 54.0;
};
/// Reads sta,w_min,m,h,a,q,l,rate_mbps rows (comment lines allowed).
std::vector<StationSpec> read_stations_csv(const std::filesystem::path& path);
int cmd_simulate(const ExperimentConfig& cfg, const std::vector<StationSpec>& stations,
                 const std::filesystem::path& out, std::ostream& log);
/// Cascade inversion for every target of one BSS.
int cmd_params(const ExperimentConfig& cfg, const std::vector<double>& taus, const std::filesystem::path& out,
               std::ostream& log);

}  // namespace airslice
