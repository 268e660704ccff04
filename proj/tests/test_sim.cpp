#include <cmath>

#include "airslice/analytics.hpp"
#include "airslice/sim.hpp"
#include "doctest.h"

using namespace airslice;
using doctest::Approx;

namespace {

SimConfig base(std::vector<EdcaParams> params, std::int64_t slots) {
  SimConfig c;
  c.rate_bps.assign(params.size(), 54e6);
  c.params = std::move(params);
  c.timing = derive_timing(default_raw_timing());
  c.slots = slots;
  return c;
}

}  // namespace

TEST_CASE("single STA runs a deterministic cycle") {
  for (FreezeMode f : {FreezeMode::kChainSlots, FreezeMode::kBusyEvent}) {
    SimConfig c = base({EdcaParams{0, 0, 0, 1, 1.0, 0}}, 30000);
    c.freeze = f;
    const SimReport r = run_sim(c);
    CHECK(r.sta[0].tau == Approx(1.0 / 3.0).epsilon(1e-3));
    CHECK(r.sta[0].collision_prob == 0.0);
    CHECK(r.collision_slots == 0);
  }
}

TEST_CASE("an STA that never transmits measures zero") {
  SimConfig c = base({EdcaParams{15, 6, 6, 6, 0.0, 50}, EdcaParams{15, 6, 6, 2, 1.0, 0}}, 20000);
  const SimReport r = run_sim(c);
  CHECK(r.sta[0].tau == 0.0);
  CHECK(r.sta[0].attempts == 0);
  CHECK(measure_tau(r)[0] == 0.0);
}

TEST_CASE("symmetric BSS agrees with the fixed point") {
  const std::vector<EdcaParams> p(4, EdcaParams{15, 6, 6, 6, 0.5, 100});
  SimConfig c = base(p, 2'000'000);
  c.seed = 9;
  const SimReport r = run_sim(c);
  const BssState fp = solve_bss_fixed_point(p, c.timing);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(r.sta[i].tau - fp.tau[i]) <= r.sta[i].tau_ci);
  }
}

TEST_CASE("confidence interval shrinks with run length") {
  const std::vector<EdcaParams> p(3, EdcaParams{8, 2, 2, 2, 1.0, 0});
  SimConfig s = base(p, 100'000);
  SimConfig l = base(p, 1'600'000);
  const double short_ci = run_sim(s).sta[0].tau_ci;
  const double long_ci = run_sim(l).sta[0].tau_ci;
  CHECK(long_ci < 0.5 * short_ci);
}

TEST_CASE("external contender sets the busy probability") {
  SimConfig c = base({EdcaParams{8, 2, 2, 1, 1.0, 0}}, 600'000);
  c.external_busy = 0.3;
  const SimReport r = run_sim(c);
  CHECK(r.sta[0].collision_prob == Approx(0.3).epsilon(0.03));
  CHECK(r.sta[0].tau == Approx(tau_from_params(c.params[0], 0.3, c.timing.frozen_slots)).epsilon(0.03));
}

TEST_CASE("simulation is reproducible") {
  const std::vector<EdcaParams> p(3, EdcaParams{8, 2, 2, 2, 0.5, 4});
  SimConfig c = base(p, 50000);
  c.seed = 77;
  const SimReport a = run_sim(c);
  const SimReport b = run_sim(c);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(a.sta[i].attempts == b.sta[i].attempts);
    CHECK(a.sta[i].throughput == b.sta[i].throughput);
  }
}

TEST_CASE("bad configurations are rejected") {
  SimConfig c = base({EdcaParams{}}, 1000);
  c.rate_bps.clear();
  CHECK_THROWS(run_sim(c));
  c = base({EdcaParams{}}, 1000);
  c.external_busy = 1.0;
  CHECK_THROWS(run_sim(c));
}
