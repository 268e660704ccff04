#include <cmath>
#include <vector>

#include "airslice/analytics.hpp"
#include "airslice/chain_oracle.hpp"
#include "airslice/rng.hpp"
#include "doctest.h"

using namespace airslice;
using doctest::Approx;

TEST_CASE("timing derived from the default MAC constants") {
  const TimingConstants t = derive_timing(default_raw_timing());
  CHECK(t.busy == Approx(1070e-6).epsilon(1e-12));
  CHECK(t.payload_ratio == Approx(1000.0 / 1070.0).epsilon(1e-12));
  CHECK(t.busy_excess == Approx(1061.0 / 1070.0).epsilon(1e-12));
  CHECK(t.frozen_slots == 119);
}

TEST_CASE("timing degenerate cases") {
  RawTiming r{1e-3, 0, 0, 0, 1e-3, 0};
  TimingConstants t = derive_timing(r);
  CHECK(t.payload_ratio == Approx(1.0));
  CHECK(t.busy_excess == Approx(0.0));
  CHECK(t.frozen_slots == 1);
  r = RawTiming{9e-6, 0, 0, 0, 1e-3, 0};
  t = derive_timing(r);
  CHECK(t.frozen_slots == 111);
  CHECK_THROWS(derive_timing(RawTiming{0, 0, 0, 0, 1e-3, 0}));
}

TEST_CASE("closed form matches the renewal oracle") {
  // Frozen from tests/oracles/edca_renewal.py (50-digit renewal-reward walk).
  struct Case {
    EdcaParams e;
    double p;
    int n;
    double expected;
  };
  const std::vector<Case> cases = {
      {{16, 2, 1, 1, 1.0, 0}, 0.1, 119, 0.0063844853409262384396},
      {{0, 0, 0, 1, 1.0, 0}, 1e-9, 119, 0.33333330655555766659},
      {{0, 0, 0, 1, 1.0, 0}, 0.0, 119, 1.0 / 3.0},
      {{8, 1, 1, 1, 0.5, 4}, 0.2, 10, 0.034562051424987804132},
      {{15, 6, 6, 6, 0.5, 100}, 0.3, 119, 0.00019850844088849206367},
      {{32, 6, 6, 6, 0.3, 100}, 0.6, 10, 5.2312604906671021756e-6},
      {{1, 0, 2, 2, 0.5, 4}, 0.6, 10, 0.0089310124851909244457},
  };
  for (const auto& c : cases) {
    CHECK(tau_from_params(c.e, c.p, c.n) == Approx(c.expected).epsilon(1e-12));
  }
}

TEST_CASE("p -> 0 limit is continuous") {
  const EdcaParams e{0, 0, 0, 1, 1.0, 0};
  const double at0 = tau_from_params(e, 0.0, 119);
  CHECK(std::isfinite(at0));
  CHECK(at0 > 0.0);
  CHECK(tau_from_params(e, 1e-9, 119) == Approx(at0).epsilon(1e-6));
}

TEST_CASE("attempt probability vanishes as q, l or a grow extreme") {
  EdcaParams e{15, 6, 6, 2, 1e-9, 100};
  CHECK(tau_from_params(e, 0.1, 119) < 1e-9);
  e = EdcaParams{15, 6, 6, 2, 0.5, 1 << 28};
  CHECK(tau_from_params(e, 0.1, 119) < 1e-8);
  e = EdcaParams{15, 6, 6, 1 << 20, 0.5, 0};
  CHECK(tau_from_params(e, 0.1, 119) < 1e-12);
}

TEST_CASE("stationary distribution identities") {
  for (double p : {1e-9, 0.1, 0.4}) {
    const StationaryDistribution sd(EdcaParams{8, 2, 1, 2, 0.5, 4}, 10, p);
    CHECK(sd.total() == Approx(1.0).epsilon(1e-9));
    const double b000 = sd.prob(0, 0, 0);
    for (int j = 0; j <= sd.max_stage(); ++j) {
      CHECK(sd.prob(j, 0, 0) == Approx(std::pow(p, j) * b000).epsilon(1e-12));
    }
    CHECK(sd.tau() == Approx(tau_from_params(sd.params(), p, 10)).epsilon(1e-12));
  }
}

TEST_CASE("stationary distribution matches the chain state by state") {
  const EdcaParams e{8, 1, 1, 1, 0.5, 4};
  const StationaryDistribution sd(e, 10, 0.2);
  const ChainModel chain(e, 10, 0.2);
  const auto res = power_iterate(chain.matrix());
  REQUIRE(res.converged);
  double worst = 0.0;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto& s = chain.states()[k];
    worst = std::max(worst, std::abs(sd.prob(s.stage, s.counter, s.frozen) - res.pi[k]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("fixed point") {
  const TimingConstants t = derive_timing(default_raw_timing());
  const EdcaParams e{16, 2, 1, 1, 1.0, 0};
  SUBCASE("single STA sees an idle channel") {
    const std::vector<EdcaParams> one{e};
    const BssState s = solve_bss_fixed_point(one, t);
    CHECK(s.p[0] == 0.0);
    CHECK(s.tau[0] == Approx(tau_from_params(e, 0.0, t.frozen_slots)).epsilon(1e-12));
  }
  SUBCASE("three identical STAs") {
    // Frozen from tests/oracles/fixed_point.py (bisection on the scalar equation).
    const std::vector<EdcaParams> three(3, e);
    const BssState s = solve_bss_fixed_point(three, t);
    for (double v : s.tau) CHECK(v == Approx(0.017774920741738088174).epsilon(1e-9));
    CHECK(s.p[1] == Approx(0.035233893676101105441).epsilon(1e-9));
  }
  SUBCASE("identical STAs are symmetric") {
    const std::vector<EdcaParams> many(7, EdcaParams{15, 6, 6, 6, 0.5, 100});
    const BssState s = solve_bss_fixed_point(many, t);
    for (double v : s.tau) CHECK(v == Approx(s.tau[0]).epsilon(1e-12));
  }
}

TEST_CASE("success and idle probabilities") {
  const std::vector<double> ones{1.0, 1.0};
  CHECK(p_idle(ones) == Approx(0.25));
  CHECK(p_succ(0, ones) == Approx(0.25));
  const std::vector<double> zeros(4, 0.0);
  CHECK(p_idle(zeros) == 1.0);
  CHECK(p_succ(2, zeros) == 0.0);
  Philox rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> tau(5), x(5);
    for (std::size_t i = 0; i < 5; ++i) {
      tau[i] = 0.3 * rng.uniform();
      x[i] = x_from_tau(tau[i]);
    }
    for (std::size_t i = 0; i < 5; ++i) {
      double other = 1.0;
      for (std::size_t k = 0; k < 5; ++k) {
        if (k != i) other *= 1.0 - tau[k];
      }
      CHECK(p_succ(i, x) == Approx(tau[i] * other).epsilon(1e-12));
    }
  }
}

TEST_CASE("throughput and airtime") {
  const TimingConstants t = derive_timing(default_raw_timing());
  const std::vector<double> one{1.0};
  // 6e6 * t / (2 - t') with t = 1000/1070, t' = 1061/1070.
  CHECK(throughput(0, one, 6e6, t) == Approx(5560704.3558850787766).epsilon(1e-12));
  CHECK(airtime(0, one, t) == Approx(0.99165894346617238184).epsilon(1e-12));
  const std::vector<double> silent{0.0, 0.4};
  CHECK(throughput(0, silent, 6e6, t) == 0.0);
  CHECK(airtime(0, silent, t) == 0.0);
  Philox rng(12, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> tau(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
      tau[i] = 0.33 * rng.uniform();
      x[i] = x_from_tau(tau[i]);
    }
    const std::size_t i = rng.below(n);
    CHECK(throughput(i, x, 54e6, t) == Approx(throughput_tau_form(i, tau, 54e6, t)).epsilon(1e-12));
    CHECK(airtime(i, x, t) == Approx(airtime_tau_form(i, tau, t)).epsilon(1e-12));
  }
}

TEST_CASE("attempt ceiling") {
  CHECK(tau_upper_bound(0.0, 119) == Approx(1.0 / 3.0));
  CHECK(tau_upper_bound(0.5, 111) == Approx(1.0 / 170.5).epsilon(1e-12));
  double prev = tau_upper_bound(0.0, 119);
  for (int k = 1; k < 100; ++k) {
    const double b = tau_upper_bound(k / 100.0, 119);
    CHECK(b < prev);
    prev = b;
  }
  // The ceiling is the cascade's all-clamped corner.
  const EdcaParams corner{0, 30, 30, 1, 1.0, 0};
  CHECK(tau_from_params(corner, 0.3, 119) == Approx(tau_upper_bound(0.3, 119)).epsilon(1e-9));
}
