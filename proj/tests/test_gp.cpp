#include <cmath>

#include "airslice/experiments.hpp"
#include "airslice/gp.hpp"
#include "airslice/rng.hpp"
#include "doctest.h"

using namespace airslice;
using namespace airslice::gp;
using doctest::Approx;

TEST_CASE("monomial condensation") {
  const Posynomial g = Posynomial(Monomial::var(0)) + Monomial::var(0, 2.0);
  const Monomial h = monomial_approx(g, {1.0});
  CHECK(h.coef() == Approx(2.0));
  CHECK(h.exponent(0) == Approx(1.5));
  const Monomial single(3.0, {{0, 2.0}, {1, -1.0}});
  const Monomial same = monomial_approx(Posynomial(single), {0.7, 2.5});
  CHECK(same.coef() == Approx(3.0));
  CHECK(same.exponent(0) == Approx(2.0));
  CHECK(same.exponent(1) == Approx(-1.0));
}

TEST_CASE("condensation dominance on random five-term posynomials") {
  Philox rng(21, 0);
  auto unif = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  std::vector<Monomial> terms;
  for (int t = 0; t < 5; ++t) {
    terms.emplace_back(std::exp(unif(-1, 1)), std::vector<std::pair<int, double>>{{0, unif(-2, 2)}, {1, unif(-2, 2)}, {2, unif(-2, 2)}});
  }
  const Posynomial g(terms);
  const std::vector<double> x0{1.3, 0.4, 2.2};
  const Monomial h = monomial_approx(g, x0);
  CHECK(h.eval(x0) == Approx(g.eval(x0)).epsilon(1e-14));
  double worst = -1.0;
  for (int s = 0; s < 1000; ++s) {
    const std::vector<double> x{std::exp(unif(-3, 3)), std::exp(unif(-3, 3)), std::exp(unif(-3, 3))};
    worst = std::max(worst, h.eval(x) / g.eval(x) - 1.0);
  }
  CHECK(worst <= 1e-12);
  const AmGmReport rep = amgm_battery(200, 3);
  CHECK(rep.worst_tangency <= 1e-12);
  CHECK(rep.worst_dominance <= 1e-12);
}

TEST_CASE("known optima") {
  for (const auto& k : known_gp_battery()) {
    INFO(k.name);
    CHECK(k.status == "optimal");
    CHECK(k.rel_error <= 1e-6);
  }
}

TEST_CASE("x + y under xy >= 1 agrees with a grid search") {
  Problem p;
  const int x = p.add_variable("x");
  const int y = p.add_variable("y");
  p.set_objective(Posynomial(Monomial::var(x)) + Monomial::var(y));
  p.add_inequality(Monomial(1.0, {{x, -1.0}, {y, -1.0}}));
  const Result r = solve(p, {3.0, 3.0});
  double grid = 1e300;
  for (int i = 1; i <= 2000; ++i) {
    const double gx = i * 0.0025;
    grid = std::min(grid, gx + 1.0 / gx);  // y at its bound 1/x
  }
  CHECK(r.objective == Approx(grid).epsilon(1e-6));
  CHECK(r.x[0] == Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("objective scaling leaves the minimizer in place") {
  for (double c : {1e-3, 1.0, 1e3}) {
    Problem p;
    const int x = p.add_variable("x");
    const int y = p.add_variable("y");
    p.set_objective(Posynomial(Monomial(c, {{x, 1.0}})) + Monomial(2.0 * c, {{y, 1.0}}));
    p.add_inequality(Monomial(1.0, {{x, -1.0}, {y, -1.0}}));
    const Result r = solve(p, {1.0, 1.0});
    CHECK(r.status == Status::kOptimal);
    CHECK(r.objective == Approx(c * 2.0 * std::sqrt(2.0)).epsilon(1e-6));
    CHECK(r.x[0] == Approx(std::sqrt(2.0)).epsilon(1e-5));
  }
}

TEST_CASE("infeasible problems are reported") {
  Problem p;
  const int x = p.add_variable("x", {1e-3, 1e3});
  p.set_objective(Monomial::var(x));
  p.add_inequality(Monomial(2.0, {{x, 1.0}}));
  p.add_inequality(Monomial(1.0, {{x, -1.0}}));
  CHECK(solve(p, {1.0}).status == Status::kInfeasible);
}

TEST_CASE("malformed problems are rejected") {
  Problem p;
  p.add_variable("x", {2.0, 1.0});
  p.set_objective(Monomial::var(0));
  CHECK_THROWS(p.validate());
  CHECK_THROWS(Monomial(-1.0));
}
