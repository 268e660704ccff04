#include "airslice/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace airslice {

namespace {

constexpr double kSmallP = 1e-9;

void require_x(std::span<const double> x) {
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error("x must be finite and >= 0");
  }
}

double product_one_plus(std::span<const double> x) {
  double prod = 1.0;
  for (double v : x) prod *= 1.0 + v;
  return prod;
}

double product_one_plus_except(std::span<const double> x, std::size_t skip) {
  double prod = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k != skip) prod *= 1.0 + x[k];
  }
  return prod;
}

// (1 - (1 - p)^(n)) / p with its p -> 0 limit n.
double aifs_escape_factor(double p, int n) {
  if (p < kSmallP) return n - 0.5 * n * (n - 1) * p;
  return -std::expm1(n * std::log1p(-p)) / p;
}

}  // namespace

RawTiming default_raw_timing() { return RawTiming{}; }

TimingConstants derive_timing(const RawTiming& raw) {
  if (!(raw.slot > 0) || !(raw.txop > 0)) {
    throw std::invalid_argument("slot and txop durations must be positive");
  }
  if (raw.propagation < 0 || raw.sifs < 0 || raw.ack < 0 || raw.aifs_ref < 0) {
    throw std::invalid_argument("overhead durations must be non-negative");
  }
  if (raw.slot > raw.txop) throw std::invalid_argument("slot must not exceed txop");

  TimingConstants tc;
  tc.slot = raw.slot;
  tc.propagation = raw.propagation;
  tc.sifs = raw.sifs;
  tc.ack = raw.ack;
  tc.txop = raw.txop;
  tc.aifs_ref = raw.aifs_ref;
  tc.busy = raw.txop + raw.sifs + 2.0 * raw.propagation + raw.ack + raw.aifs_ref;
  tc.collision = raw.txop + raw.propagation + raw.aifs_ref;
  tc.payload_ratio = raw.txop / tc.busy;
  tc.busy_excess = (tc.busy - raw.slot) / tc.busy;
  tc.frozen_slots = std::max(1, static_cast<int>(std::lround(tc.busy / raw.slot)));
  return tc;
}

void validate(const EdcaParams& p) {
  if (p.w_min < 0) throw std::invalid_argument("w_min must be >= 0");
  if (p.m < 0 || p.h < 0) throw std::invalid_argument("m and h must be >= 0");
  if (p.m > 40 || p.m + p.h > 200) throw std::invalid_argument("backoff stages out of range");
  if (p.a < 1) throw std::invalid_argument("a (AIFS - 1) must be >= 1");
  if (!(p.q >= 0.0 && p.q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
  if (p.l < 0) throw std::invalid_argument("l must be >= 0");
}

std::int64_t contention_window(const EdcaParams& params, int stage) {
  const int doublings = std::min(stage, params.m);
  return static_cast<std::int64_t>(params.w_min) << doublings;
}

NormalizationTerms normalization_terms(const EdcaParams& params, double p, int frozen_slots,
                                       WindowConvention convention) {
  validate(params);
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("busy probability must lie in [0, 1)");
  if (frozen_slots < 0) throw std::invalid_argument("frozen_slots must be >= 0");
  if (convention == WindowConvention::kExclusive && params.w_min < 1) {
    throw std::invalid_argument("exclusive window convention needs w_min >= 1");
  }

  const double n = frozen_slots;
  const double freeze = 1.0 + n * p;
  const int stages = params.m + params.h + 1;

  NormalizationTerms terms;
  double stage_sum = 0.0;
  double window_sum = 0.0;
  double pj = 1.0;
  for (int j = 0; j < stages; ++j) {
    stage_sum += pj;
    double w = static_cast<double>(contention_window(params, j));
    if (convention == WindowConvention::kExclusive) w -= 1.0;
    window_sum += w * pj;
    pj *= p;
  }
  terms.stages = stage_sum;

  terms.tail = params.q > 0.0 ? params.l * (1.0 - params.q) / params.q : 0.0;
  const double survive = std::pow(1.0 - p, params.a + 1);
  terms.aifs = freeze * aifs_escape_factor(p, params.a + 1) / survive;
  terms.backoff = freeze / (2.0 * std::pow(1.0 - p, params.a)) * window_sum;
  return terms;
}

double tau_from_params(const EdcaParams& params, double p, int frozen_slots,
                       WindowConvention convention) {
  validate(params);
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("busy probability must lie in [0, 1)");
  // A STA whose coin never comes up heads never enters backoff.
  if (params.q == 0.0) return 0.0;
  const NormalizationTerms terms = normalization_terms(params, p, frozen_slots, convention);
  return terms.stages / terms.total();
}

double tau_from_params(const EdcaParams& params, double p, const TimingConstants& timing) {
  return tau_from_params(params, p, timing.frozen_slots);
}

StationaryDistribution::StationaryDistribution(EdcaParams params, int frozen_slots, double p)
    : params_(params), frozen_slots_(frozen_slots), p_(p), b000_(0.0) {
  validate(params_);
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("busy probability must lie in (0, 1)");
  if (params_.q == 0.0 && params_.l < 1) {
    throw std::invalid_argument("q = 0 needs l >= 1 for a proper chain");
  }
  if (params_.q > 0.0) {
    b000_ = 1.0 / normalization_terms(params_, p_, frozen_slots_).total();
  }
}

double StationaryDistribution::prob(int stage, std::int64_t counter, int frozen) const {
  const int a = params_.a;
  const int depth = frozen_depth();
  if (stage == -2) {
    if (counter != 0 || frozen < 0 || frozen >= params_.l) return 0.0;
    if (params_.q == 0.0) return 1.0 / params_.l;
    return (1.0 - params_.q) / params_.q * b000_;
  }
  if (stage == -1) {
    if (counter != 0 || frozen < 0 || frozen > depth) return 0.0;
    if (frozen <= a) return b000_ / std::pow(1.0 - p_, frozen + 1);
    return (1.0 / std::pow(1.0 - p_, a + 1) - 1.0) * b000_;
  }
  if (stage < 0 || stage > max_stage()) return 0.0;
  const std::int64_t w = contention_window(params_, stage);
  if (counter < 0 || counter > w || frozen < 0 || frozen > depth) return 0.0;
  const double head = std::pow(p_, stage) * b000_;
  if (counter == 0) return frozen == 0 ? head : 0.0;
  const double base = static_cast<double>(w + 1 - counter) / static_cast<double>(w + 1) * head;
  if (frozen == 0) return base;
  if (frozen < a) return p_ / std::pow(1.0 - p_, frozen) * base;
  return p_ / std::pow(1.0 - p_, a) * base;
}

double StationaryDistribution::tau() const {
  double sum = 0.0;
  for (int j = 0; j <= max_stage(); ++j) sum += prob(j, 0, 0);
  return sum;
}

double StationaryDistribution::total() const {
  double sum = 0.0;
  for_each([&](int, std::int64_t, int, double v) { sum += v; });
  return sum;
}

StationaryDistribution stationary_distribution(const EdcaParams& params, double p,
                                               const TimingConstants& timing) {
  return StationaryDistribution(params, timing.frozen_slots, p);
}

double busy_probability(std::span<const double> tau, std::size_t i) {
  double idle = 1.0;
  for (std::size_t k = 0; k < tau.size(); ++k) {
    if (k != i) idle *= 1.0 - tau[k];
  }
  return 1.0 - idle;
}

BssState solve_bss_fixed_point(std::span<const EdcaParams> params, int frozen_slots) {
  if (params.empty()) throw std::invalid_argument("a BSS needs at least one STA");
  constexpr double kDamping = 0.5;
  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 10000;

  const std::size_t n = params.size();
  BssState state;
  state.tau.assign(n, 0.01);
  state.p.assign(n, 0.0);
  std::vector<double> mapped(n);

  for (int it = 0; it <= kMaxIterations; ++it) {
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      state.p[i] = busy_probability(state.tau, i);
      mapped[i] = tau_from_params(params[i], state.p[i], frozen_slots);
      residual = std::max(residual, std::abs(mapped[i] - state.tau[i]));
    }
    state.iterations = it;
    state.residual = residual;
    if (residual < kTolerance) {
      // Finish on the map's image so a lone STA gets the closed form exactly.
      state.tau = mapped;
      for (std::size_t i = 0; i < n; ++i) state.p[i] = busy_probability(state.tau, i);
      break;
    }
    if (it == kMaxIterations) {
      throw ConvergenceError(
          fmt::format("BSS fixed point did not converge, residual {:.3e}", residual), residual);
    }
    for (std::size_t i = 0; i < n; ++i) {
      state.tau[i] = (1.0 - kDamping) * state.tau[i] + kDamping * mapped[i];
    }
  }
  state.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) state.x[i] = x_from_tau(state.tau[i]);
  return state;
}

BssState solve_bss_fixed_point(std::span<const EdcaParams> params, const TimingConstants& timing) {
  return solve_bss_fixed_point(params, timing.frozen_slots);
}

double p_idle(std::span<const double> x) {
  require_x(x);
  return 1.0 / product_one_plus(x);
}

double p_succ(std::size_t i, std::span<const double> x) {
  require_x(x);
  if (i >= x.size()) throw std::out_of_range("STA index out of range");
  return x[i] / product_one_plus(x);
}

double throughput(std::size_t i, std::span<const double> x, double rate_bps,
                  const TimingConstants& timing) {
  require_x(x);
  if (i >= x.size()) throw std::out_of_range("STA index out of range");
  if (!(rate_bps >= 0.0)) throw std::domain_error("rate must be >= 0");
  if (x[i] == 0.0) return 0.0;
  return x[i] * rate_bps * timing.payload_ratio / (product_one_plus(x) - timing.busy_excess);
}

double throughput_tau_form(std::size_t i, std::span<const double> tau, double rate_bps,
                           const TimingConstants& timing) {
  if (i >= tau.size()) throw std::out_of_range("STA index out of range");
  double idle = 1.0;
  for (double t : tau) idle *= 1.0 - t;
  const double succ = tau[i] * (1.0 - busy_probability(tau, i));
  const double info = succ * rate_bps * timing.txop;
  const double slot_len = idle * timing.slot + (1.0 - idle) * timing.busy;
  return info / slot_len;
}

double airtime(std::size_t i, std::span<const double> x, const TimingConstants& timing) {
  require_x(x);
  if (i >= x.size()) throw std::out_of_range("STA index out of range");
  if (x[i] == 0.0) return 0.0;
  return x[i] * product_one_plus_except(x, i) / (product_one_plus(x) - timing.busy_excess);
}

double airtime_tau_form(std::size_t i, std::span<const double> tau, const TimingConstants& timing) {
  if (i >= tau.size()) throw std::out_of_range("STA index out of range");
  double idle = 1.0;
  for (double t : tau) idle *= 1.0 - t;
  const double others_idle = 1.0 - busy_probability(tau, i);
  const double coll = tau[i] * (1.0 - others_idle);
  const double succ = tau[i] * others_idle;
  const double slot_len = idle * timing.slot + (1.0 - idle) * timing.busy;
  return (coll * timing.busy + succ * timing.busy) / slot_len;
}

double tau_upper_bound(double p, int frozen_slots) {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("busy probability must lie in [0, 1)");
  const double n = frozen_slots;
  return 1.0 / (1.0 + (1.0 + p * n) * (2.0 - p) / (1.0 - p));
}

}  // namespace airslice
