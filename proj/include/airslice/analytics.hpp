#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace airslice {

/// Thrown when a fixed-point or iterative solve fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Raw MAC/PHY durations in seconds.
struct RawTiming {
  double slot = 9e-6;
  double propagation = 1e-6;
  double sifs = 10e-6;
  double ack = 40e-6;
  double txop = 1e-3;
  /// AIFS used inside the busy-period duration. Defaults to two slots.
  double aifs_ref = 18e-6;
};

/// Durations of a general time-slot and the dimensionless ratios the
/// throughput/airtime formulas are written in.
struct TimingConstants {
  double slot = 0;         // idle slot length
  double propagation = 0;
  double sifs = 0;
  double ack = 0;
  double txop = 0;
  double aifs_ref = 0;
  double busy = 0;         // unified success/collision duration T (= T_s)
  double collision = 0;    // T_c, used only by the simulator's clock
  double payload_ratio = 0;  // txop / busy
  double busy_excess = 0;    // (busy - slot) / busy
  int frozen_slots = 1;      // N = round(busy / slot), in idle-slot units
};

/// Table II defaults of the 802.11e deployment.
RawTiming default_raw_timing();

/// Builds the derived timing. Slot and TXOP must be positive, the remaining
/// overheads non-negative, and slot <= txop.
TimingConstants derive_timing(const RawTiming& raw);

/// Per-(STA, AP) EDCA knobs.
struct EdcaParams {
  int w_min = 15;  // minimum contention window
  int m = 6;       // maximum backoff stage
  int h = 6;       // retries at the maximum stage
  int a = 6;       // AIFS - 1, in slots (>= 1)
  double q = 0.5;  // post-transmission coin
  int l = 100;     // long inter-frame space on a failed coin, in slots

  bool operator==(const EdcaParams&) const = default;
};

void validate(const EdcaParams& params);

/// Backoff draw range at each stage. kInclusive draws uniformly from
/// [0, W_j] (W_j + 1 values), matching the chain's transition rules.
/// kExclusive draws from [0, W_j - 1]; its closed form carries the extra
/// "- sum p^j" inside the window term and needs w_min >= 1.
enum class WindowConvention { kInclusive, kExclusive };

/// W_j for stage j: w_min * 2^min(j, m).
std::int64_t contention_window(const EdcaParams& params, int stage);

/// Attempt probability of one STA given the busy probability p it observes.
/// Evaluated from the chain's normalization condition; the removable
/// singularity at p = 0 is replaced by its limit below 1e-9.
double tau_from_params(const EdcaParams& params, double p, int frozen_slots,
                       WindowConvention convention = WindowConvention::kInclusive);
double tau_from_params(const EdcaParams& params, double p, const TimingConstants& timing);

/// The four additive pieces of the normalization denominator (per b_{0,0,0}),
/// plus the numerator sum_j p^j. tau = stage_sum / total().
struct NormalizationTerms {
  double tail = 0;     // long inter-frame-space chain
  double aifs = 0;     // pre-backoff AIFS chain including its frozen states
  double stages = 0;   // transmit states, sum_j p^j
  double backoff = 0;  // countdown and frozen-countdown states
  double total() const { return tail + aifs + stages + backoff; }
};
NormalizationTerms normalization_terms(const EdcaParams& params, double p, int frozen_slots,
                                       WindowConvention convention = WindowConvention::kInclusive);

/// Stationary probabilities b_{j,b,d} of the per-STA chain.
///
/// Stage -2 holds the long-IFS wait (d in [0, l-1]), stage -1 the pre-backoff
/// AIFS chain (d in [0, N+a]), stages 0..m+h the backoff process with
/// b in [0, W_j] and d in [0, N+a] (d > 0 only for b >= 1).
class StationaryDistribution {
 public:
  StationaryDistribution(EdcaParams params, int frozen_slots, double p);

  double prob(int stage, std::int64_t counter, int frozen) const;
  double tau() const;
  double total() const;
  int max_stage() const { return params_.m + params_.h; }
  int frozen_depth() const { return frozen_slots_ + params_.a; }
  const EdcaParams& params() const { return params_; }

  /// Visits every state (stage, counter, frozen, probability).
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (int d = 0; d < params_.l; ++d) fn(-2, std::int64_t{0}, d, prob(-2, 0, d));
    for (int d = 0; d <= frozen_depth(); ++d) fn(-1, std::int64_t{0}, d, prob(-1, 0, d));
    for (int j = 0; j <= max_stage(); ++j) {
      const std::int64_t w = contention_window(params_, j);
      for (std::int64_t b = 0; b <= w; ++b) {
        const int dmax = b == 0 ? 0 : frozen_depth();
        for (int d = 0; d <= dmax; ++d) fn(j, b, d, prob(j, b, d));
      }
    }
  }

 private:
  EdcaParams params_;
  int frozen_slots_;
  double p_;
  double b000_;
};

StationaryDistribution stationary_distribution(const EdcaParams& params, double p,
                                               const TimingConstants& timing);

/// Coupled (tau, p) state of the STAs sharing one BSS.
struct BssState {
  std::vector<double> tau;
  std::vector<double> p;
  std::vector<double> x;
  int iterations = 0;
  double residual = 0;
};

/// Busy probability seen by STA i: 1 - prod_{i' != i}(1 - tau_{i'}).
double busy_probability(std::span<const double> tau, std::size_t i);

/// Damped fixed point tau_i = f_i(p_i(tau)).
BssState solve_bss_fixed_point(std::span<const EdcaParams> params, int frozen_slots);
BssState solve_bss_fixed_point(std::span<const EdcaParams> params, const TimingConstants& timing);

inline double x_from_tau(double tau) { return tau / (1.0 - tau); }
inline double tau_from_x(double x) { return x / (1.0 + x); }

double p_idle(std::span<const double> x);
double p_succ(std::size_t i, std::span<const double> x);

/// Per-STA saturation throughput in bits/s (x-form).
double throughput(std::size_t i, std::span<const double> x, double rate_bps,
                  const TimingConstants& timing);
/// Same quantity from attempt probabilities: E[I_g] / E[T_g].
double throughput_tau_form(std::size_t i, std::span<const double> tau, double rate_bps,
                           const TimingConstants& timing);

/// Fraction of channel time STA i occupies (successes and collisions), x-form.
double airtime(std::size_t i, std::span<const double> x, const TimingConstants& timing);
/// (P_coll + P_succ) * T / E[T_g].
double airtime_tau_form(std::size_t i, std::span<const double> tau, const TimingConstants& timing);

/// Ceiling on tau reachable by any EDCA parameters at busy probability p.
double tau_upper_bound(double p, int frozen_slots);

}  // namespace airslice
