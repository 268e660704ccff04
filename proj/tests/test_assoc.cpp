#include <cmath>

#include "airslice/analytics.hpp"
#include "airslice/assoc.hpp"
#include "airslice/rng.hpp"
#include "doctest.h"

using namespace airslice;
using doctest::Approx;

namespace {

TimingConstants timing() { return derive_timing(default_raw_timing()); }

RateMatrix two_sta(double r1, double r2) {
  RateMatrix r(2, 1);
  r.at(0, 0) = r1;
  r.at(1, 0) = r2;
  return r;
}

std::vector<IspSpec> one_each(double eta) { return {{0, {0}, eta}, {1, {1}, eta}}; }

}  // namespace

TEST_CASE("constraint families for one AP and two STAs") {
  const Cgp c = build_cgp(two_sta(6, 54), one_each(0.45), timing());
  CHECK(c.count("bigm") == 1);
  CHECK(c.count("slot") == 1);
  CHECK(c.count("airtime") == 2);
  CHECK(c.count("attempt") == 2);
  CHECK(c.count("busy") == 2);
  CHECK(c.count("link") == 2);
}

TEST_CASE("default targets sum to the AP count") {
  const auto isps = default_isps({0, 1, 1, 0, 1}, 2, 4);
  double sum = 0;
  for (const auto& k : isps) sum += k.eta;
  CHECK(sum == Approx(4.0));
}

TEST_CASE("an ISP without usable STAs is rejected before solving") {
  RateMatrix r(2, 1);
  r.at(0, 0) = 6;
  CHECK_THROWS_AS(build_cgp(r, one_each(0.3), timing()), std::invalid_argument);
}

TEST_CASE("ceiling constraint is the attempt ceiling in disguise") {
  Philox rng(8, 0);
  for (int k = 0; k < 200; ++k) {
    const double u = 0.01 + 0.99 * rng.uniform();
    const double x = 2.0 * rng.uniform();
    const int n = 1 + static_cast<int>(rng.below(200));
    const double ratio = (u * x + (1 + n) * x) / (u + n * u * u * x);
    const double tau = tau_from_x(x);
    const bool below = tau <= tau_upper_bound(1 - u, n);
    CHECK((ratio <= 1.0 + 1e-12) == below);
    if (std::abs(ratio - 1.0) > 1e-9) CHECK((ratio < 1.0) == (tau < tau_upper_bound(1 - u, n)));
  }
}

TEST_CASE("consistent point satisfies the equality families") {
  const RateMatrix r = two_sta(12, 36);
  const Cgp c = build_cgp(r, one_each(0.3), timing());
  const auto pt = consistent_point(c, r, timing(), {{0.05}, {0.2}});
  CHECK(max_residual(c, pt, {"slot", "busy", "link"}) < 1e-12);
}

TEST_CASE("6 and 54 Mbps against the grid oracle") {
  const auto sol = solve_association(two_sta(6, 54), one_each(0.45), timing());
  REQUIRE(sol.status == AssocStatus::kConverged);
  const GridOptimum g = grid_search_two_sta(6, 54, 0.45, 0.45, timing());
  REQUIRE(g.total > 0);
  CHECK(sol.total_throughput >= g.total * (1 - 0.005));
  CHECK(sol.max_residual <= 1e-6);
  for (double a : sol.isp_airtime) CHECK(a >= 0.45 - 1e-6);
  for (std::size_t i = 1; i < sol.trace.size(); ++i) {
    if (sol.trace[i].phase == 2 && sol.trace[i - 1].phase == 2) {
      CHECK(sol.trace[i].objective >= sol.trace[i - 1].objective * (1 - 1e-8));
    }
  }
}

TEST_CASE("equal rates give a symmetric operating point") {
  const auto sol = solve_association(two_sta(24, 24), one_each(0.3), timing());
  REQUIRE(sol.status == AssocStatus::kConverged);
  CHECK(sol.x[0][0] == Approx(sol.x[1][0]).epsilon(1e-6));
  CHECK(sol.isp_airtime[0] == Approx(sol.isp_airtime[1]).epsilon(1e-6));
}

TEST_CASE("big-M sensitivity") {
  AssocOptions a;
  AssocOptions b;
  b.m_scale = 2 * a.m_scale;
  const auto s1 = solve_association(two_sta(9, 48), one_each(0.3), timing(), a);
  const auto s2 = solve_association(two_sta(9, 48), one_each(0.3), timing(), b);
  REQUIRE(s1.status == AssocStatus::kConverged);
  REQUIRE(s2.status == AssocStatus::kConverged);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(s1.tau[i][0] - s2.tau[i][0]) < 1e-6);
}

TEST_CASE("single STA closed form") {
  RateMatrix r(1, 2);
  r.at(0, 0) = 6;
  r.at(0, 1) = 54;
  const auto sol = solve_association(r, {{0, {0}, 0.0}}, timing());
  CHECK(sol.status == AssocStatus::kConverged);
  CHECK(sol.tau[0][1] == Approx(tau_upper_bound(0.0, timing().frozen_slots)));
}

TEST_CASE("repeated solves are identical") {
  const auto s1 = solve_association(two_sta(18, 54), one_each(0.45), timing());
  const auto s2 = solve_association(two_sta(18, 54), one_each(0.45), timing());
  CHECK(s1.iterations == s2.iterations);
  CHECK(s1.total_throughput == s2.total_throughput);
}
