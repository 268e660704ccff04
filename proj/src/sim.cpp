#include "airslice/sim.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

#include "airslice/rng.hpp"

namespace airslice {

namespace {

struct Sta {
  int stage = -1;
  std::int64_t counter = 0;
  int frozen = 0;
};

struct BatchTotals {
  std::vector<std::int64_t> attempts;
  std::vector<std::int64_t> successes;
  std::vector<std::int64_t> collisions;
  std::int64_t slots = 0;
  double time = 0;
};

struct MeanCi {
  double mean;
  double half;
};

MeanCi batch_ci(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, t_quantile_975(static_cast<int>(v.size()) - 1) * sd / std::sqrt(n)};
}

}  // namespace

double t_quantile_975(int dof) {
  if (dof < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

void validate(const SimConfig& c) {
  if (c.params.empty()) throw std::invalid_argument("simulation needs at least one STA");
  if (c.rate_bps.size() != c.params.size()) {
    throw std::invalid_argument("one rate per STA is required");
  }
  for (const auto& p : c.params) {
    validate(p);
    if (p.q == 0.0 && p.l == 0) throw std::invalid_argument("q = 0 with l = 0 never terminates");
  }
  for (double r : c.rate_bps) {
    if (!(r >= 0.0)) throw std::invalid_argument("rates must be >= 0");
  }
  if (!(c.external_busy >= 0.0 && c.external_busy < 1.0)) {
    throw std::invalid_argument("external busy probability must lie in [0, 1)");
  }
  if (c.batches < 2) throw std::invalid_argument("need at least two batches");
  if (!(c.warmup >= 0.0 && c.warmup <= 0.5)) throw std::invalid_argument("warmup must lie in [0, 0.5]");
  const auto measured = static_cast<std::int64_t>(std::floor(c.slots * (1.0 - c.warmup)));
  if (c.slots <= 0 || measured < c.batches) {
    throw std::invalid_argument("slot budget too small for the batch count");
  }
  if (!(c.timing.slot > 0) || !(c.timing.busy > 0) || !(c.timing.collision > 0)) {
    throw std::invalid_argument("timing durations must be positive");
  }
}

SimReport run_sim(const SimConfig& c) {
  validate(c);
  const std::size_t n = c.params.size();
  const std::uint64_t base = derive_seed(c.seed, "edca-sim");
  std::vector<Philox> rng;
  rng.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rng.emplace_back(base, i);
  Philox ext_rng(base, n);

  std::vector<Sta> sta(n);
  std::vector<int> depth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = c.params[i];
    depth[i] = c.freeze == FreezeMode::kChainSlots ? c.timing.frozen_slots + p.a : p.a;
    sta[i] = {-1, 0, p.a};
  }

  auto coin = [&](std::size_t i) {
    const auto& p = c.params[i];
    if (p.l == 0 || rng[i].bernoulli(p.q)) {
      sta[i] = {-1, 0, p.a};
    } else {
      sta[i] = {-2, 0, p.l - 1};
    }
  };
  auto enter_stage = [&](std::size_t i, int j) {
    const std::int64_t w = contention_window(c.params[i], j);
    sta[i] = {j, static_cast<std::int64_t>(rng[i].below(static_cast<std::uint64_t>(w) + 1)), 0};
  };

  const auto warm = static_cast<std::int64_t>(std::floor(c.slots * c.warmup));
  const std::int64_t measured = c.slots - warm;
  const std::int64_t batch_len = measured / c.batches;

  std::vector<BatchTotals> batches(static_cast<std::size_t>(c.batches));
  for (auto& b : batches) {
    b.attempts.assign(n, 0);
    b.successes.assign(n, 0);
    b.collisions.assign(n, 0);
  }
  SimReport report;
  report.sta.resize(n);

  std::vector<std::size_t> tx;
  tx.reserve(n);
  for (std::int64_t slot = 0; slot < c.slots; ++slot) {
    tx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (sta[i].stage >= 0 && sta[i].counter == 0 && sta[i].frozen == 0) tx.push_back(i);
    }

    const bool ext = c.external_busy > 0.0 && ext_rng.bernoulli(c.external_busy);
    const std::size_t senders = tx.size() + (ext ? 1 : 0);

    if (slot >= warm) {
      const std::int64_t k = std::min<std::int64_t>((slot - warm) / batch_len, c.batches - 1);
      BatchTotals& b = batches[static_cast<std::size_t>(k)];
      ++b.slots;
      if (senders == 0) {
        b.time += c.timing.slot;
        ++report.idle_slots;
      } else if (senders == 1) {
        b.time += c.timing.busy;
        if (!tx.empty()) {
          ++b.attempts[tx[0]];
          ++b.successes[tx[0]];
        }
        ++report.success_slots;
      } else {
        b.time += c.timing.collision;
        for (std::size_t i : tx) {
          ++b.attempts[i];
          ++b.collisions[i];
        }
        ++report.collision_slots;
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      Sta& s = sta[i];
      const auto& p = c.params[i];
      const bool self_tx = s.stage >= 0 && s.counter == 0 && s.frozen == 0;
      const std::size_t others = senders - (self_tx ? 1 : 0);
      const bool busy = others > 0;

      if (s.stage == -2) {
        if (s.frozen >= 1) {
          --s.frozen;
        } else if (rng[i].bernoulli(p.q)) {
          s = {-1, 0, p.a};
        } else {
          s = {-2, 0, p.l - 1};
        }
      } else if (s.stage == -1) {
        if (s.frozen > p.a) {
          --s.frozen;
        } else if (busy) {
          s.frozen = depth[i];
        } else if (s.frozen >= 1) {
          --s.frozen;
        } else {
          enter_stage(i, 0);
        }
      } else if (self_tx) {
        if (!busy) {
          coin(i);
        } else if (s.stage < p.m + p.h) {
          enter_stage(i, s.stage + 1);
        } else {
          coin(i);
        }
      } else if (s.frozen > p.a) {
        --s.frozen;
      } else if (busy) {
        s.frozen = depth[i];
      } else if (s.frozen >= 2) {
        --s.frozen;
      } else {
        s.frozen = 0;
        --s.counter;
      }
    }
  }

  // Aggregate.
  std::int64_t slots_total = 0;
  double time_total = 0.0;
  for (const auto& b : batches) {
    slots_total += b.slots;
    time_total += b.time;
  }
  report.general_slots = slots_total;
  report.elapsed = time_total;
  const double payload = c.timing.txop;
  std::vector<double> tau_b(batches.size()), thr_b(batches.size()), air_b(batches.size());
  for (std::size_t i = 0; i < n; ++i) {
    StaReport& r = report.sta[i];
    for (std::size_t k = 0; k < batches.size(); ++k) {
      const auto& b = batches[k];
      r.attempts += b.attempts[i];
      r.successes += b.successes[i];
      r.collisions += b.collisions[i];
      tau_b[k] = static_cast<double>(b.attempts[i]) / static_cast<double>(b.slots);
      thr_b[k] = static_cast<double>(b.successes[i]) * c.rate_bps[i] * payload / b.time;
      air_b[k] = (static_cast<double>(b.successes[i]) * c.timing.busy +
                  static_cast<double>(b.collisions[i]) * c.timing.collision) /
                 b.time;
    }
    r.tau = static_cast<double>(r.attempts) / static_cast<double>(slots_total);
    r.throughput = static_cast<double>(r.successes) * c.rate_bps[i] * payload / time_total;
    r.airtime = (static_cast<double>(r.successes) * c.timing.busy +
                 static_cast<double>(r.collisions) * c.timing.collision) /
                time_total;
    r.tau_ci = batch_ci(tau_b).half;
    r.throughput_ci = batch_ci(thr_b).half;
    r.airtime_ci = batch_ci(air_b).half;
    r.collision_prob =
        r.attempts > 0 ? static_cast<double>(r.collisions) / static_cast<double>(r.attempts) : 0.0;
    r.no_success = r.successes == 0;
  }
  return report;
}

std::vector<double> measure_tau(const SimReport& report) {
  std::vector<double> tau;
  tau.reserve(report.sta.size());
  for (const auto& s : report.sta) {
    tau.push_back(report.general_slots > 0
                      ? static_cast<double>(s.attempts) / static_cast<double>(report.general_slots)
                      : 0.0);
  }
  return tau;
}

}  // namespace airslice
