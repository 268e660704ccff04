#pragma once

#include <string>
#include <vector>

#include "airslice/analytics.hpp"
#include "airslice/chain_oracle.hpp"
#include "airslice/gp.hpp"
#include "airslice/network.hpp"

namespace airslice {

/// A posynomial ratio num/den compared against 1.
struct RatioConstraint {
  enum class Kind { kLessEq, kEqual };
  std::string family;  // "bigm", "slot", "airtime", "attempt", "busy", "link"
  Kind kind = Kind::kLessEq;
  gp::Posynomial num;
  gp::Posynomial den;
  std::size_t ap = 0;   // owning AP where meaningful
  std::size_t sta = 0;  // owning STA where meaningful
};

/// Complementary GP over x, t, u (per usable link), y (per AP) and x0.
struct Cgp {
  gp::Problem vars;  // variables and bounds only
  std::vector<RatioConstraint> constraints;
  std::vector<std::vector<int>> x, t, u;  // [sta][ap], -1 for excluded links
  std::vector<int> y;                     // per AP
  int x0 = -1;
  double big_m = 0;
  std::vector<std::size_t> excluded_stas;  // no usable link at all

  std::size_t count(const std::string& family) const;
};

/// Builds every constraint family. Rates are in Mbps. Throws std::invalid_argument when an
/// ISP with a positive target has no usable STA.
Cgp build_cgp(const RateMatrix& rates, const std::vector<IspSpec>& isps, const TimingConstants& timing,
              double m_scale = 10.0);

/// Full variable vector with t, u, y, x0 made consistent with x ([sta][ap]).
std::vector<double> consistent_point(const Cgp& cgp, const RateMatrix& rates, const TimingConstants& timing,
                                     const std::vector<std::vector<double>>& x);

/// Largest |num/den - 1| over equalities and max(0, num/den - 1) over
/// inequalities of the given families (all when empty).
double max_residual(const Cgp& cgp, const std::vector<double>& point,
                    const std::vector<std::string>& families = {});

struct AssocOptions {
  int max_iter = 200;
  double conv_tol = 1e-4;
  double x_init = 0.01;
  std::vector<double> trust = {10.0, 3.0, 1.5};
  int max_retries = 5;
  double m_scale = 10.0;
  /// Floor on the airtime slack in the feasibility phase; below 1 means strictly
  /// feasible airtime targets.
  double slack_floor = 0.9;
  gp::Options gp{.tol = 1e-10};
};

enum class AssocStatus { kConverged, kMaxIter, kInfeasible, kFailed };
const char* to_string(AssocStatus s);

struct TraceRow {
  int iteration = 0;
  int phase = 2;            // 1: reaching airtime feasibility, 2: maximizing throughput
  double objective = 0;     // total throughput (Mbps) at the iterate
  double max_dx = 0;        // relative change of x
  double slack = 0;         // airtime slack in phase 1, 0 otherwise
  double trust = 0;         // trust-region factor used
};

struct AssociationSolution {
  AssocStatus status = AssocStatus::kFailed;
  std::string diagnostics;
  std::vector<std::vector<double>> x, tau, p;   // [sta][ap]
  std::vector<std::vector<double>> throughput;  // Mbps, [sta][ap]
  std::vector<double> isp_airtime;
  std::vector<double> isp_throughput;           // Mbps
  double total_throughput = 0;                  // Mbps
  std::vector<TraceRow> trace;
  int iterations = 0;                           // SCA iterations across both phases
  std::vector<std::size_t> excluded_stas;
  double max_residual = 0;                      // equality and attempt families at the reported point
};

/// Successive monomial condensation of the complementary GP.
AssociationSolution solve_association(const RateMatrix& rates, const std::vector<IspSpec>& isps,
                                      const TimingConstants& timing, const AssocOptions& opts = {});

/// Per-AP airtime/throughput evaluation of a given x ([sta][ap]).
struct NetworkMetrics {
  std::vector<std::vector<double>> throughput;  // Mbps
  std::vector<std::vector<double>> airtime;
  std::vector<double> isp_airtime;
  std::vector<double> isp_throughput;
  double total_throughput = 0;
};
NetworkMetrics evaluate_network(const RateMatrix& rates, const std::vector<IspSpec>& isps,
                                const TimingConstants& timing, const std::vector<std::vector<double>>& x);

/// Exhaustive search over (tau1, tau2) for one AP with two STAs, one per ISP:
/// maximize total throughput subject to each airtime >= eta_k and
/// tau_i <= tau_upper_bound(tau_other, N).
struct GridOptimum {
  double total = -1;  // Mbps; negative when no grid point is feasible
  double tau1 = 0;
  double tau2 = 0;
  int feasible_points = 0;
};
GridOptimum grid_search_two_sta(double rate1_mbps, double rate2_mbps, double eta1, double eta2,
                                const TimingConstants& timing, int resolution = 400,
                                double tau_lo = 1e-4, Execution exec = Execution::kParallel);

}  // namespace airslice
