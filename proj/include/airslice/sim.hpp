#pragma once

#include <cstdint>
#include <vector>

#include "airslice/analytics.hpp"

namespace airslice {

/// How a STA that senses the medium busy waits before resuming its AIFS.
enum class FreezeMode {
  /// Counts N general slots down from N + a, as the chain transitions do.
  kChainSlots,
  /// Waits out the busy event itself (one general slot lasting T_s or T_c),
  /// then re-runs the a + 1 idle-slot AIFS.
  kBusyEvent,
};

struct SimConfig {
  std::vector<EdcaParams> params;
  std::vector<double> rate_bps;
  TimingConstants timing;
  std::int64_t slots = 2'000'000;  // general slots, warmup included
  std::uint64_t seed = 1;
  double warmup = 0.1;
  int batches = 20;
  FreezeMode freeze = FreezeMode::kChainSlots;
  /// Probability that a contender outside the simulated set transmits in a
  /// general slot, independently of everything else. 0 disables it.
  double external_busy = 0.0;
};

void validate(const SimConfig& config);

struct StaReport {
  double tau = 0;            // attempts per general slot
  double tau_ci = 0;         // 95% half-width from batch means
  double throughput = 0;     // bits/s
  double throughput_ci = 0;
  double airtime = 0;        // fraction of time in own successes and collisions
  double airtime_ci = 0;
  double collision_prob = 0; // collided attempts / attempts
  std::int64_t attempts = 0;
  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  bool no_success = false;
};

struct SimReport {
  std::vector<StaReport> sta;
  std::int64_t general_slots = 0;  // measured (post-warmup)
  std::int64_t idle_slots = 0;
  std::int64_t success_slots = 0;
  std::int64_t collision_slots = 0;
  double elapsed = 0;  // simulated seconds over the measured window
};

SimReport run_sim(const SimConfig& config);

/// Attempt-per-general-slot estimator for every STA.
std::vector<double> measure_tau(const SimReport& report);

/// Student-t 0.975 quantile for the given degrees of freedom.
double t_quantile_975(int dof);

}  // namespace airslice
