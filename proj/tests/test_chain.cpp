#include <cmath>

#include "airslice/analytics.hpp"
#include "airslice/chain_oracle.hpp"
#include "airslice/rng.hpp"
#include "doctest.h"

using namespace airslice;
using doctest::Approx;

TEST_CASE("transition matrix is stochastic") {
  const ChainModel chain(EdcaParams{8, 2, 2, 2, 0.3, 4}, 10, 0.3);
  CHECK(chain.size() == ChainModel::count_states(EdcaParams{8, 2, 2, 2, 0.3, 4}, 10));
  for (double m : chain.matrix().out_mass()) CHECK(m == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("serial and parallel products agree bit for bit") {
  const ChainModel chain(EdcaParams{16, 2, 1, 3, 0.5, 4}, 10, 0.2);
  Philox rng(3, 0);
  std::vector<double> x(chain.size());
  for (double& v : x) v = rng.uniform();
  std::vector<double> a(chain.size()), b(chain.size());
  spmv(chain.matrix(), x, a, Execution::kSerial);
  spmv(chain.matrix(), x, b, Execution::kParallel);
  CHECK(a == b);
}

TEST_CASE("power iteration, direct solve and closed form agree") {
  for (double p : {1e-9, 0.1, 0.3, 0.6}) {
    const EdcaParams e{1, 1, 2, 2, 0.5, 4};
    const ChainModel chain(e, 10, p);
    const auto pr = power_iterate(chain.matrix());
    REQUIRE(pr.converged);
    const auto direct = direct_stationary(chain.matrix(), chain.anchor());
    const double closed = tau_from_params(e, p, 10);
    CHECK(chain.tau(pr.pi) == Approx(closed).epsilon(1e-8));
    CHECK(chain.tau(direct) == Approx(closed).epsilon(1e-10));
    CHECK(stationary_residual(chain.matrix(), direct) < 1e-12);
  }
}

TEST_CASE("q = 0 keeps the walk in the long wait") {
  const EdcaParams e{4, 1, 1, 1, 0.0, 3};
  const ChainModel chain(e, 5, 0.2);
  const auto direct = direct_stationary(chain.matrix(), chain.anchor());
  CHECK(chain.tau(direct) == Approx(0.0));
  CHECK(tau_from_params(e, 0.2, 5) == 0.0);
}
