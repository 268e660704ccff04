#include <cmath>

#include "airslice/analytics.hpp"
#include "airslice/control.hpp"
#include "doctest.h"

using namespace airslice;
using doctest::Approx;

TEST_CASE("tiny target is met by the window alone") {
  const ControlResult r = params_for_tau(0.001, 0.1, 119);
  const EdcaParams d = control_defaults();
  CHECK_FALSE(r.unreachable);
  CHECK(r.params.w_min > d.w_min);
  CHECK(r.params.m == d.m);
  CHECK(r.params.h == d.h);
  CHECK(r.params.a == d.a);
  CHECK(r.params.l == d.l);
  CHECK(r.params.q == d.q);
  CHECK(tau_from_params(r.params, 0.1, 119) == Approx(0.001).epsilon(0.02));
}

TEST_CASE("cascade round trip") {
  for (double p : {0.05, 0.2, 0.5}) {
    const double hi = 0.9 * tau_upper_bound(p, 119);
    for (int k = 0; k < 50; ++k) {
      const double target = std::exp(std::log(1e-4) + (std::log(hi) - std::log(1e-4)) * k / 49.0);
      const ControlResult r = params_for_tau(target, p, 119);
      CHECK_FALSE(r.unreachable);
      CHECK(std::abs(tau_from_params(r.params, p, 119) - target) / target < 0.1);
    }
  }
}

TEST_CASE("targets above the ceiling are flagged") {
  const double p = 0.2;
  const ControlResult r = params_for_tau(1.5 * tau_upper_bound(p, 119), p, 119);
  CHECK(r.unreachable);
  CHECK(r.achieved_tau <= tau_upper_bound(p, 119) * (1 + 1e-12));
}

TEST_CASE("single knobs respect their ceilings") {
  for (Knob k : {Knob::kWMin, Knob::kL, Knob::kA, Knob::kM, Knob::kH}) {
    const double ceiling = single_knob_ceiling(k, 0.1, 119);
    CHECK(ceiling <= tau_upper_bound(0.1, 119) * (1 + 1e-12));
    const ControlResult low = control_single_knob(k, 0.5 * ceiling, 0.1, 119);
    CHECK(low.achieved_tau <= ceiling * (1 + 1e-12));
    const ControlResult high = control_single_knob(k, 2.0 * ceiling, 0.1, 119);
    CHECK(high.unreachable);
  }
}

TEST_CASE("target busy probability") {
  const std::vector<double> taus{0.1, 0.2, 0.5};
  CHECK(target_busy_probability(taus, 0) == Approx(1 - 0.8 * 0.5));
  CHECK(target_busy_probability({0.3}, 0) == 0.0);
}
