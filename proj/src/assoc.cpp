#include "airslice/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace airslice {

using gp::Monomial;
using gp::Posynomial;

std::size_t Cgp::count(const std::string& family) const {
  return static_cast<std::size_t>(std::count_if(constraints.begin(), constraints.end(),
                                                [&](const RatioConstraint& c) { return c.family == family; }));
}

const char* to_string(AssocStatus s) {
  switch (s) {
    case AssocStatus::kConverged: return "converged";
    case AssocStatus::kMaxIter: return "max_iter";
    case AssocStatus::kInfeasible: return "infeasible";
    case AssocStatus::kFailed: return "failed";
  }
  return "?";
}

namespace {

// Links of AP a that carry a variable.
std::vector<std::size_t> members_of(const Cgp& c, std::size_t a) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    if (c.x[i][a] >= 0) out.push_back(i);
  }
  return out;
}

// prod_{i' != i} t_{i'}^a as a monomial.
Monomial others_t(const Cgp& c, std::size_t a, std::size_t i) {
  std::vector<std::pair<int, double>> ex;
  for (std::size_t j : members_of(c, a)) {
    if (j != i) ex.emplace_back(c.t[j][a], 1.0);
  }
  return Monomial(1.0, std::move(ex));
}

}  // namespace

Cgp build_cgp(const RateMatrix& rates, const std::vector<IspSpec>& isps, const TimingConstants& timing,
              double m_scale) {
  const std::size_t ns = rates.n_sta();
  const std::size_t na = rates.n_ap();
  if (!(m_scale > 1.0)) throw std::invalid_argument("M scale must exceed 1");
  Cgp c;
  c.x.assign(ns, std::vector<int>(na, -1));
  c.t = c.x;
  c.u = c.x;
  c.y.assign(na, -1);

  std::vector<int> isp_of(ns, -1);
  for (std::size_t k = 0; k < isps.size(); ++k) {
    if (!(isps[k].eta >= 0.0)) throw std::invalid_argument("airtime targets must be >= 0");
    for (std::size_t i : isps[k].members) {
      if (i >= ns) throw std::out_of_range("ISP member out of range");
      if (isp_of[i] >= 0) throw std::invalid_argument("ISP memberships must partition the STAs");
      isp_of[i] = static_cast<int>(k);
    }
  }
  for (std::size_t i = 0; i < ns; ++i) {
    if (isp_of[i] < 0) throw std::invalid_argument("STA without an ISP");
    if (!rates.usable(i)) c.excluded_stas.push_back(i);
  }
  for (const auto& isp : isps) {
    bool any = false;
    for (std::size_t i : isp.members) any = any || rates.usable(i);
    if (isp.eta > 0.0 && !any) {
      throw std::invalid_argument(fmt::format("ISP {} has a positive airtime target but no usable STA", isp.id));
    }
  }

  double rate_sum = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t a = 0; a < na; ++a) {
      if (!(rates.at(i, a) > 0.0)) continue;
      rate_sum += rates.at(i, a) * timing.payload_ratio;
      c.x[i][a] = c.vars.add_variable(fmt::format("x_{}_{}", i, a), {1e-9, 1e3});
      c.t[i][a] = c.vars.add_variable(fmt::format("t_{}_{}", i, a), {1.0, 1e3});
      c.u[i][a] = c.vars.add_variable(fmt::format("u_{}_{}", i, a), {1e-9, 1.0});
    }
  }
  for (std::size_t a = 0; a < na; ++a) {
    if (!members_of(c, a).empty()) c.y[a] = c.vars.add_variable(fmt::format("y_{}", a), {1e-6, 1e6});
  }
  c.big_m = m_scale * std::max(rate_sum, 1.0);
  c.x0 = c.vars.add_variable("x0", {1e-9, 1e9});

  using K = RatioConstraint::Kind;
  // bigm: M / (x0 + sum x r t / y) <= 1
  {
    Posynomial den(Monomial::var(c.x0));
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t a = 0; a < na; ++a) {
        if (c.x[i][a] < 0) continue;
        den += Monomial(rates.at(i, a) * timing.payload_ratio, {{c.x[i][a], 1.0}, {c.y[a], -1.0}});
      }
    }
    c.constraints.push_back({"bigm", K::kLessEq, Monomial(c.big_m), den});
  }
  // slot: prod t / (t' + y) = 1
  for (std::size_t a = 0; a < na; ++a) {
    if (c.y[a] < 0) continue;
    std::vector<std::pair<int, double>> ex;
    for (std::size_t i : members_of(c, a)) ex.emplace_back(c.t[i][a], 1.0);
    Posynomial den = timing.busy_excess > 0.0 ? Posynomial(Monomial(timing.busy_excess)) : Posynomial();
    den += Monomial::var(c.y[a]);
    c.constraints.push_back({"slot", K::kEqual, Monomial(1.0, std::move(ex)), den, a, 0});
  }
  // airtime: (eta + 1) / (1 + sum_{i in S_k, a} x prod_{i' != i} t / y) <= 1
  for (const auto& isp : isps) {
    Posynomial den(Monomial(1.0));
    for (std::size_t i : isp.members) {
      for (std::size_t a = 0; a < na; ++a) {
        if (c.x[i][a] < 0) continue;
        den += others_t(c, a, i) * Monomial(1.0, {{c.x[i][a], 1.0}, {c.y[a], -1.0}});
      }
    }
    c.constraints.push_back({"airtime", K::kLessEq, Monomial(isp.eta + 1.0), den, 0, 0});
  }
  const double n = timing.frozen_slots;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t a = 0; a < na; ++a) {
      if (c.x[i][a] < 0) continue;
      const Monomial x = Monomial::var(c.x[i][a]);
      const Monomial u = Monomial::var(c.u[i][a]);
      // attempt: (u x + (1 + N) x) / (u + N u^2 x) <= 1
      c.constraints.push_back({"attempt", K::kLessEq, Posynomial(u * x) + (1.0 + n) * x,
                               Posynomial(u) + n * (u * u * x), a, i});
      // busy: u prod_{i' != i} t = 1
      c.constraints.push_back({"busy", K::kEqual, u * others_t(c, a, i), Monomial(1.0), a, i});
      // link: t / (1 + x) = 1
      c.constraints.push_back({"link", K::kEqual, Monomial::var(c.t[i][a]), Posynomial(Monomial(1.0)) + x, a, i});
    }
  }
  return c;
}

NetworkMetrics evaluate_network(const RateMatrix& rates, const std::vector<IspSpec>& isps,
                                const TimingConstants& timing, const std::vector<std::vector<double>>& x) {
  const std::size_t ns = rates.n_sta();
  const std::size_t na = rates.n_ap();
  NetworkMetrics m;
  m.throughput.assign(ns, std::vector<double>(na, 0.0));
  m.airtime = m.throughput;
  for (std::size_t a = 0; a < na; ++a) {
    double prod = 1.0;
    for (std::size_t i = 0; i < ns; ++i) prod *= 1.0 + x[i][a];
    const double denom = prod - timing.busy_excess;
    for (std::size_t i = 0; i < ns; ++i) {
      if (x[i][a] <= 0.0) continue;
      m.throughput[i][a] = x[i][a] * rates.at(i, a) * timing.payload_ratio / denom;
      m.airtime[i][a] = x[i][a] * (prod / (1.0 + x[i][a])) / denom;
    }
  }
  m.isp_airtime.assign(isps.size(), 0.0);
  m.isp_throughput.assign(isps.size(), 0.0);
  for (std::size_t k = 0; k < isps.size(); ++k) {
    for (std::size_t i : isps[k].members) {
      for (std::size_t a = 0; a < na; ++a) {
        m.isp_airtime[k] += m.airtime[i][a];
        m.isp_throughput[k] += m.throughput[i][a];
      }
    }
  }
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t a = 0; a < na; ++a) m.total_throughput += m.throughput[i][a];
  }
  return m;
}

std::vector<double> consistent_point(const Cgp& c, const RateMatrix& rates, const TimingConstants& timing,
                                     const std::vector<std::vector<double>>& x) {
  std::vector<double> z(c.vars.num_variables(), 1.0);
  const std::size_t ns = c.x.size();
  const std::size_t na = c.y.size();
  double thr = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    if (c.y[a] < 0) continue;
    double prod = 1.0;
    for (std::size_t i = 0; i < ns; ++i) {
      if (c.x[i][a] < 0) continue;
      prod *= 1.0 + x[i][a];
    }
    for (std::size_t i = 0; i < ns; ++i) {
      if (c.x[i][a] < 0) continue;
      const double t = 1.0 + x[i][a];
      z[static_cast<std::size_t>(c.x[i][a])] = x[i][a];
      z[static_cast<std::size_t>(c.t[i][a])] = t;
      z[static_cast<std::size_t>(c.u[i][a])] = t / prod;
    }
    const double y = prod - timing.busy_excess;
    z[static_cast<std::size_t>(c.y[a])] = y;
    for (std::size_t i = 0; i < ns; ++i) {
      if (c.x[i][a] >= 0) thr += x[i][a] * rates.at(i, a) * timing.payload_ratio / y;
    }
  }
  z[static_cast<std::size_t>(c.x0)] = std::max(c.big_m - thr, 1e-9);
  return z;
}

double max_residual(const Cgp& c, const std::vector<double>& z, const std::vector<std::string>& families) {
  double r = 0.0;
  for (const auto& con : c.constraints) {
    if (!families.empty() && std::find(families.begin(), families.end(), con.family) == families.end()) continue;
    const double v = con.num.eval(z) / con.den.eval(z);
    r = std::max(r, con.kind == RatioConstraint::Kind::kEqual ? std::abs(v - 1.0) : std::max(0.0, v - 1.0));
  }
  return r;
}

namespace {

struct Condensed {
  gp::Problem prob;
  int slack = -1;
};

// Standard GP approximating the complementary GP around z. slot and link are
// relaxed to the inequality direction every other constraint favors; busy
// stays an exact monomial equality.
Condensed condense(const Cgp& c, const std::vector<double>& z, double sigma, bool phase1, double slack_floor) {
  Condensed out{c.vars, -1};
  gp::Problem& p = out.prob;
  for (const auto& row : c.x) {
    for (int id : row) {
      if (id < 0) continue;
      gp::Bounds& b = p.bounds(id);
      const double xv = z[static_cast<std::size_t>(id)];
      b.lo = std::max(b.lo, xv / sigma);
      b.hi = std::min(b.hi, xv * sigma);
    }
  }
  if (phase1) {
    out.slack = p.add_variable("slack", {slack_floor, 1e9});
    p.set_objective(Monomial::var(out.slack));
  } else {
    p.set_objective(Monomial::var(c.x0));
  }
  std::vector<double> zz = z;
  if (phase1) zz.push_back(1.0);
  for (const auto& con : c.constraints) {
    if (con.family == "busy") {
      p.add_equality(con.num.terms().front(), con.family);
    } else if (con.family == "link") {
      p.add_inequality(con.den / con.num.terms().front(), con.family);
    } else {
      Monomial den = gp::monomial_approx(con.den, zz);
      Posynomial num = con.num;
      if (phase1 && con.family == "airtime") num = num * Monomial::var(out.slack, -1.0);
      p.add_inequality(num / den, con.family);
    }
  }
  return out;
}

std::vector<std::vector<double>> extract_x(const Cgp& c, const std::vector<double>& z) {
  std::vector<std::vector<double>> x(c.x.size(), std::vector<double>(c.y.size(), 0.0));
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    for (std::size_t a = 0; a < c.y.size(); ++a) {
      if (c.x[i][a] >= 0) x[i][a] = z[static_cast<std::size_t>(c.x[i][a])];
    }
  }
  return x;
}

double airtime_ratio(const Cgp& c, const std::vector<double>& z) {
  double s = 0.0;
  for (const auto& con : c.constraints) {
    if (con.family == "airtime") s = std::max(s, con.num.eval(z) / con.den.eval(z));
  }
  return s;
}

void fill_solution(AssociationSolution& sol, const Cgp& c, const RateMatrix& rates, const std::vector<IspSpec>& isps,
                   const TimingConstants& timing, const std::vector<std::vector<double>>& x) {
  const std::size_t ns = rates.n_sta();
  const std::size_t na = rates.n_ap();
  sol.x = x;
  sol.tau.assign(ns, std::vector<double>(na, 0.0));
  sol.p = sol.tau;
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<double> tau_a(ns);
    for (std::size_t i = 0; i < ns; ++i) tau_a[i] = tau_from_x(x[i][a]);
    for (std::size_t i = 0; i < ns; ++i) {
      sol.tau[i][a] = tau_a[i];
      sol.p[i][a] = busy_probability(tau_a, i);
    }
  }
  const NetworkMetrics m = evaluate_network(rates, isps, timing, x);
  sol.throughput = m.throughput;
  sol.isp_airtime = m.isp_airtime;
  sol.isp_throughput = m.isp_throughput;
  sol.total_throughput = m.total_throughput;
  sol.excluded_stas = c.excluded_stas;
  sol.max_residual = max_residual(c, consistent_point(c, rates, timing, x), {"slot", "airtime", "attempt", "busy", "link"});
}

}  // namespace

AssociationSolution solve_association(const RateMatrix& rates, const std::vector<IspSpec>& isps,
                                      const TimingConstants& timing, const AssocOptions& opts) {
  if (opts.trust.empty()) throw std::invalid_argument("trust-region schedule is empty");
  const Cgp c = build_cgp(rates, isps, timing, opts.m_scale);
  AssociationSolution sol;
  const std::size_t ns = rates.n_sta();
  const std::size_t na = rates.n_ap();

  std::size_t links = 0;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < ns; ++i) {
    if (rates.usable(i)) active.push_back(i);
    for (std::size_t a = 0; a < na; ++a) links += c.x[i][a] >= 0 ? 1 : 0;
  }
  if (links == 0) {
    fill_solution(sol, c, rates, isps, timing, std::vector<std::vector<double>>(ns, std::vector<double>(na, 0.0)));
    sol.status = AssocStatus::kInfeasible;
    sol.diagnostics = "no usable link";
    return sol;
  }

  // One STA: every usable AP is its own BSS with p = 0, throughput grows with
  // x, so x sits at the bound tau = 1/3.
  if (active.size() == 1) {
    std::vector<std::vector<double>> x(ns, std::vector<double>(na, 0.0));
    for (std::size_t a = 0; a < na; ++a) {
      if (c.x[active[0]][a] >= 0) x[active[0]][a] = x_from_tau(tau_upper_bound(0.0, timing.frozen_slots));
    }
    fill_solution(sol, c, rates, isps, timing, x);
    bool ok = true;
    for (std::size_t k = 0; k < isps.size(); ++k) ok = ok && sol.isp_airtime[k] >= isps[k].eta - 1e-9;
    sol.status = ok ? AssocStatus::kConverged : AssocStatus::kInfeasible;
    sol.diagnostics = ok ? "closed form" : "airtime targets exceed the single-STA airtime";
    sol.trace.push_back({0, 2, sol.total_throughput, 0.0, 0.0, 0.0});
    return sol;
  }

  std::vector<std::vector<double>> x(ns, std::vector<double>(na, 0.0));
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t a = 0; a < na; ++a) {
      if (c.x[i][a] >= 0) x[i][a] = opts.x_init;
    }
  }
  std::vector<double> z = consistent_point(c, rates, timing, x);
  bool phase1 = airtime_ratio(c, z) >= 1.0;
  std::size_t trust_idx = 0;
  int retries = 0;
  sol.status = AssocStatus::kMaxIter;

  for (int it = 1; it <= opts.max_iter; ++it) {
    const double sigma = opts.trust[std::min(trust_idx, opts.trust.size() - 1)];
    Condensed cp = condense(c, z, sigma, phase1, opts.slack_floor);
    std::vector<double> start = z;
    if (phase1) start.push_back(std::max(2.0 * airtime_ratio(c, z), 2.0 * opts.slack_floor));
    const gp::Result r = gp::solve(cp.prob, start, opts.gp);
    const bool usable = r.status == gp::Status::kOptimal ||
                        (r.status == gp::Status::kMaxIter && r.max_violation < 1e-6);
    if (!usable) {
      ++retries;
      if (retries > opts.max_retries) {
        sol.status = AssocStatus::kFailed;
        sol.diagnostics = fmt::format("GP subproblem {} after {} trust-region retries at iteration {}: {}",
                                      gp::to_string(r.status), opts.max_retries, it, r.diagnostics);
        break;
      }
      ++trust_idx;
      --it;
      continue;
    }
    trust_idx = 0;

    std::vector<std::vector<double>> xn = extract_x(c, r.x);
    double dx = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t a = 0; a < na; ++a) dx = std::max(dx, std::abs(xn[i][a] - x[i][a]) / std::max(1.0, xn[i][a]));
    }
    x = std::move(xn);
    z = consistent_point(c, rates, timing, x);
    sol.iterations = it;
    const double slack = phase1 ? r.x[static_cast<std::size_t>(cp.slack)] : 0.0;
    sol.trace.push_back({it, phase1 ? 1 : 2, evaluate_network(rates, isps, timing, x).total_throughput, dx, slack,
                         sigma});
    if (phase1) {
      if (airtime_ratio(c, z) < 1.0) {
        phase1 = false;
        continue;
      }
      if (dx < opts.conv_tol) {
        sol.status = AssocStatus::kInfeasible;
        sol.diagnostics = fmt::format("airtime targets unreachable: best airtime ratio {:.6f}", airtime_ratio(c, z));
        break;
      }
      continue;
    }
    if (dx < opts.conv_tol) {
      sol.status = AssocStatus::kConverged;
      break;
    }
  }
  if (phase1 && sol.status == AssocStatus::kMaxIter) {
    sol.status = AssocStatus::kInfeasible;
    sol.diagnostics = fmt::format("airtime targets not reached in {} iterations", opts.max_iter);
  }
  fill_solution(sol, c, rates, isps, timing, x);
  return sol;
}

GridOptimum grid_search_two_sta(double rate1, double rate2, double eta1, double eta2, const TimingConstants& timing,
                                int resolution, double tau_lo, Execution exec) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  const int n = timing.frozen_slots;
  const double tau_hi = tau_upper_bound(0.0, n);
  if (!(tau_lo > 0.0 && tau_lo < tau_hi)) throw std::invalid_argument("grid lower end out of range");
  const double step = (tau_hi - tau_lo) / (resolution - 1);
  std::vector<GridOptimum> rows(static_cast<std::size_t>(resolution));

  auto row = [&](int r) {
    GridOptimum best;
    const double t1 = tau_lo + step * r;
    const double x1 = x_from_tau(t1);
    for (int s = 0; s < resolution; ++s) {
      const double t2 = tau_lo + step * s;
      if (t1 > tau_upper_bound(t2, n) || t2 > tau_upper_bound(t1, n)) continue;
      const double x2 = x_from_tau(t2);
      const double denom = (1.0 + x1) * (1.0 + x2) - timing.busy_excess;
      const double air1 = x1 * (1.0 + x2) / denom;
      const double air2 = x2 * (1.0 + x1) / denom;
      if (air1 < eta1 || air2 < eta2) continue;
      ++best.feasible_points;
      const double total = (x1 * rate1 + x2 * rate2) * timing.payload_ratio / denom;
      if (total > best.total) {
        best.total = total;
        best.tau1 = t1;
        best.tau2 = t2;
      }
    }
    rows[static_cast<std::size_t>(r)] = best;
  };
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (int r = 0; r < resolution; ++r) row(r);
  } else {
    for (int r = 0; r < resolution; ++r) row(r);
  }
  GridOptimum out;
  for (const auto& g : rows) {
    out.feasible_points += g.feasible_points;
    if (g.total > out.total) {
      out.total = g.total;
      out.tau1 = g.tau1;
      out.tau2 = g.tau2;
    }
  }
  return out;
}

}  // namespace airslice
