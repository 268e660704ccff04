#include "airslice/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "airslice/csv.hpp"
#include "airslice/parallel.hpp"
#include "airslice/rng.hpp"

namespace airslice {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

std::string num(double v) { return csv_num(v); }
std::string integer(long long v) { return std::to_string(v); }
std::string boolean(bool b) { return b ? "1" : "0"; }

struct MeanCi {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double ci = std::numeric_limits<double>::quiet_NaN();
};

MeanCi mean_ci(const std::vector<double>& v) {
  MeanCi r;
  if (v.empty()) return r;
  const double n = static_cast<double>(v.size());
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) {
    r.ci = 0.0;
    return r;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.ci = t_quantile_975(static_cast<int>(v.size()) - 1) * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return r;
}

double jain_or_nan(const std::vector<double>& v) {
  try {
    return jain_index(v);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::string params_text(const EdcaParams& p) {
  return fmt::format("w_min={} m={} h={} a={} q={:g} l={}", p.w_min, p.m, p.h, p.a, p.q, p.l);
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed form vs. brute-force chain

std::vector<OracleCombo> oracle_combos(std::size_t count, std::uint64_t seed, int frozen_slots,
                                       std::size_t max_states) {
  static constexpr std::array<int, 5> kW = {0, 1, 8, 16, 32};
  static constexpr std::array<int, 4> kMh = {0, 1, 2, 6};
  static constexpr std::array<int, 3> kA = {1, 2, 6};
  static constexpr std::array<double, 3> kQ = {0.3, 0.5, 1.0};
  static constexpr std::array<int, 3> kL = {0, 4, 100};
  static constexpr std::array<double, 4> kP = {1e-9, 0.1, 0.3, 0.6};
  std::vector<std::vector<OracleCombo>> by_p(kP.size());
  for (int w : kW) {
    for (int m : kMh) {
      for (int h : kMh) {
        for (int a : kA) {
          for (double q : kQ) {
            for (int l : kL) {
              const EdcaParams e{w, m, h, a, q, l};
              if (ChainModel::count_states(e, frozen_slots) > max_states) continue;
              for (std::size_t k = 0; k < kP.size(); ++k) by_p[k].push_back({e, kP[k]});
            }
          }
        }
      }
    }
  }
  Philox rng(derive_seed(seed, "oracle-combos"), 0);
  for (auto& bucket : by_p) {
    for (std::size_t i = bucket.size(); i > 1; --i) {
      std::swap(bucket[i - 1], bucket[static_cast<std::size_t>(rng.below(i))]);
    }
  }
  std::vector<OracleCombo> out;
  for (std::size_t k = 0; out.size() < count; ++k) {
    bool any = false;
    for (auto& bucket : by_p) {
      if (k < bucket.size() && out.size() < count) {
        out.push_back(bucket[k]);
        any = true;
      }
    }
    if (!any) break;
  }
  return out;
}

OracleCase run_oracle_case(const OracleCombo& combo, int frozen_slots, const PowerIterationOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleCase c;
  c.combo = combo;
  const ChainModel model(combo.params, frozen_slots, combo.p);
  c.states = model.size();
  c.closed_form = tau_from_params(combo.params, combo.p, frozen_slots);
  const PowerIterationResult pr = power_iterate(model.matrix(), opts);
  c.power = model.tau(pr.pi);
  c.iterations = pr.iterations;
  c.converged = pr.converged;
  c.direct = model.tau(direct_stationary(model.matrix(), model.anchor()));
  c.rel_power = std::abs(c.power - c.closed_form) / c.closed_form;
  c.rel_direct = std::abs(c.direct - c.closed_form) / c.closed_form;
  c.seconds = seconds_since(t0);
  return c;
}

std::vector<OracleCase> oracle_battery(const std::vector<OracleCombo>& combos, int frozen_slots, Execution exec,
                                       int jobs) {
  PowerIterationOptions opts;
  return map_indexed<OracleCase>(
      combos.size(), [&](std::size_t i) { return run_oracle_case(combos[i], frozen_slots, opts); }, exec, jobs);
}

// ---------------------------------------------------------------------------
// Six-STA control sweep

const char* to_string(ControlMode m) {
  switch (m) {
    case ControlMode::kCascade: return "cascade";
    case ControlMode::kWMin: return "w_min";
    case ControlMode::kL: return "l";
    case ControlMode::kA: return "a";
    case ControlMode::kM: return "m";
    case ControlMode::kH: return "h";
  }
  return "?";
}

std::vector<ControlMode> all_control_modes() {
  return {ControlMode::kCascade, ControlMode::kWMin, ControlMode::kL,
          ControlMode::kA,          ControlMode::kM,    ControlMode::kH};
}

SimSettings sim_settings(const ExperimentConfig& cfg) {
  return {cfg.simulation.slots, cfg.simulation.batches, cfg.simulation.warmup, cfg.simulation.freeze};
}

namespace {

Knob knob_of(ControlMode m) {
  switch (m) {
    case ControlMode::kWMin: return Knob::kWMin;
    case ControlMode::kL: return Knob::kL;
    case ControlMode::kA: return Knob::kA;
    case ControlMode::kM: return Knob::kM;
    case ControlMode::kH: return Knob::kH;
    case ControlMode::kCascade: break;
  }
  throw std::logic_error("cascade has no single knob");
}

}  // namespace

std::vector<ControlPoint> control_sweep(const std::vector<double>& tau1, const std::vector<ControlMode>& modes,
                                        const TimingConstants& timing, const SimSettings& sim, std::uint64_t seed,
                                        Execution exec, int jobs, double rate_mbps) {
  constexpr std::size_t kStas = 6;
  constexpr double kOthers = 0.005;
  const std::size_t n_items = tau1.size() * modes.size();
  const int n = timing.frozen_slots;
  return map_indexed<ControlPoint>(
      n_items,
      [&](std::size_t idx) {
        ControlPoint pt;
        pt.mode = modes[idx / tau1.size()];
        pt.tau1 = tau1[idx % tau1.size()];
        std::vector<double> targets(kStas, kOthers);
        targets[0] = pt.tau1;
        std::vector<EdcaParams> params(kStas);
        for (std::size_t i = 0; i < kStas; ++i) {
          const double p = busy_probability(targets, i);
          ControlResult cr = (i == 0 && pt.mode != ControlMode::kCascade)
                                 ? control_single_knob(knob_of(pt.mode), targets[i], p, n)
                                 : params_for_tau(targets[i], p, n);
          params[i] = cr.params;
          if (i == 0) {
            pt.params1 = cr.params;
            pt.unreachable = cr.unreachable;
            pt.achieved_tau = cr.achieved_tau;
          }
        }
        pt.analytic_throughput = throughput_tau_form(0, targets, rate_mbps * 1e6, timing) / 1e6;
        if (sim.slots > 0) {
          SimConfig sc;
          sc.params = params;
          sc.rate_bps.assign(kStas, rate_mbps * 1e6);
          sc.timing = timing;
          sc.slots = sim.slots;
          sc.batches = sim.batches;
          sc.warmup = sim.warmup;
          sc.freeze = sim.freeze;
          sc.seed = derive_seed(seed, static_cast<std::uint64_t>(idx));
          const SimReport rep = run_sim(sc);
          pt.measured_throughput = rep.sta[0].throughput / 1e6;
          pt.measured_ci = rep.sta[0].throughput_ci / 1e6;
          pt.measured_tau = rep.sta[0].tau;
          pt.measured_tau_ci = rep.sta[0].tau_ci;
          pt.rel_error = (pt.measured_throughput - pt.analytic_throughput) / pt.analytic_throughput;
          pt.pass = std::abs(pt.measured_throughput - pt.analytic_throughput) <=
                    std::max(3.0 * pt.measured_ci, 0.05 * pt.analytic_throughput);
        }
        return pt;
      },
      exec, jobs);
}

std::vector<FeasibleRange> feasible_ranges(const std::vector<ControlPoint>& pts) {
  std::vector<FeasibleRange> out;
  for (ControlMode m : all_control_modes()) {
    FeasibleRange r{m, 0.0, 0.0};
    bool seen = false;
    for (const auto& p : pts) {
      if (p.mode != m) continue;
      seen = true;
      if (!p.unreachable && std::abs(p.achieved_tau - p.tau1) <= 0.1 * p.tau1) r.analytic_max = std::max(r.analytic_max, p.tau1);
      if (std::abs(p.measured_tau - p.tau1) <= std::max(3.0 * p.measured_tau_ci, 0.1 * p.tau1)) {
        r.measured_max = std::max(r.measured_max, p.tau1);
      }
    }
    if (seen) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cascade round trip

std::vector<RoundTripPoint> round_trip(const std::vector<double>& ps, int count, int frozen_slots,
                                       const TimingConstants& timing, const SimSettings& sim, std::uint64_t seed,
                                       Execution exec, int jobs) {
  if (count < 2) throw std::invalid_argument("round trip needs at least two targets");
  const std::size_t n_items = ps.size() * static_cast<std::size_t>(count);
  return map_indexed<RoundTripPoint>(
      n_items,
      [&](std::size_t idx) {
        RoundTripPoint r;
        r.p = ps[idx / static_cast<std::size_t>(count)];
        const auto k = static_cast<double>(idx % static_cast<std::size_t>(count));
        const double lo = std::log(1e-4);
        const double hi = std::log(0.9 * tau_upper_bound(r.p, frozen_slots));
        r.target = std::exp(lo + (hi - lo) * k / (count - 1));
        const ControlResult cr = params_for_tau(r.target, r.p, frozen_slots);
        r.params = cr.params;
        r.unreachable = cr.unreachable;
        r.achieved = cr.achieved_tau;
        r.rel_error = std::abs(r.achieved - r.target) / r.target;
        if (sim.slots > 0) {
          SimConfig sc;
          sc.params = {cr.params};
          sc.rate_bps = {54e6};
          sc.timing = timing;
          sc.timing.frozen_slots = frozen_slots;
          sc.slots = sim.slots;
          sc.batches = sim.batches;
          sc.warmup = sim.warmup;
          sc.freeze = FreezeMode::kChainSlots;
          sc.external_busy = r.p;
          sc.seed = derive_seed(seed, static_cast<std::uint64_t>(idx));
          const SimReport rep = run_sim(sc);
          r.measured_tau = rep.sta[0].tau;
          r.measured_ci = rep.sta[0].tau_ci;
          r.sim_pass = std::abs(r.measured_tau - r.target) <= std::max(3.0 * r.measured_ci, 0.1 * r.target);
        }
        return r;
      },
      exec, jobs);
}

// ---------------------------------------------------------------------------
// GP batteries

std::vector<GpInstance> gp_vs_grid(int count, std::uint64_t seed, const TimingConstants& timing,
                                   const AssocOptions& opts, int resolution) {
  const std::vector<double> table = {6, 9, 12, 18, 24, 36, 48, 54};
  Philox rng(derive_seed(seed, "gp-grid"), 0);
  std::vector<GpInstance> out;
  for (int k = 0; k < count; ++k) {
    GpInstance g;
    g.rate1 = table[rng.below(table.size())];
    g.rate2 = table[rng.below(table.size())];
    g.eta = k % 2 == 0 ? 0.3 : 0.45;
    RateMatrix r(2, 1);
    r.at(0, 0) = g.rate1;
    r.at(1, 0) = g.rate2;
    const std::vector<IspSpec> isps = {{0, {0}, g.eta}, {1, {1}, g.eta}};
    g.solution = solve_association(r, isps, timing, opts);
    g.grid = grid_search_two_sta(g.rate1, g.rate2, g.eta, g.eta, timing, resolution);
    g.gap = (g.grid.total - g.solution.total_throughput) / g.grid.total;
    bool airtime_ok = true;
    for (double a : g.solution.isp_airtime) airtime_ok = airtime_ok && a >= g.eta - 1e-6;
    g.pass = g.solution.status == AssocStatus::kConverged && g.grid.total > 0 && g.gap <= 0.005 &&
             g.solution.max_residual <= 1e-6 && airtime_ok;
    out.push_back(std::move(g));
  }
  return out;
}

AmGmReport amgm_battery(int count, std::uint64_t seed, int samples_per) {
  AmGmReport rep;
  for (int c = 0; c < count; ++c) {
    Philox rng(derive_seed(seed, "amgm"), static_cast<std::uint64_t>(c));
    auto unif = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    const int nv = 1 + static_cast<int>(rng.below(4));
    const int nt = 1 + static_cast<int>(rng.below(5));
    std::vector<gp::Monomial> terms;
    for (int t = 0; t < nt; ++t) {
      std::vector<std::pair<int, double>> ex;
      for (int v = 0; v < nv; ++v) ex.emplace_back(v, unif(-2.0, 2.0));
      terms.emplace_back(std::exp(unif(-2.0, 2.0)), std::move(ex));
    }
    const gp::Posynomial g(std::move(terms));
    std::vector<double> x0(static_cast<std::size_t>(nv));
    for (double& v : x0) v = std::exp(unif(-2.0, 2.0));
    const gp::Monomial gh = gp::monomial_approx(g, x0);
    rep.worst_tangency = std::max(rep.worst_tangency, std::abs(gh.eval(x0) / g.eval(x0) - 1.0));
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples_per; ++s) {
      std::vector<double> x(static_cast<std::size_t>(nv));
      for (double& v : x) v = std::exp(unif(-3.0, 3.0));
      worst = std::max(worst, gh.eval(x) / g.eval(x) - 1.0);
      ++rep.samples;
    }
    rep.worst_dominance = c == 0 ? worst : std::max(rep.worst_dominance, worst);
    ++rep.posynomials;
  }
  return rep;
}

std::vector<KnownGp> known_gp_battery() {
  using gp::Monomial;
  using gp::Posynomial;
  std::vector<KnownGp> out;
  auto run = [&](const std::string& name, const gp::Problem& p, std::vector<double> start, double expected) {
    const gp::Result r = gp::solve(p, start);
    out.push_back({name, expected, r.objective, std::abs(r.objective - expected) / expected, gp::to_string(r.status)});
  };
  {
    gp::Problem p;
    const int x = p.add_variable("x");
    p.set_objective(Monomial::var(x));
    p.add_inequality(Monomial::var(x, -1.0));
    run("min x, 1/x <= 1", p, {5.0}, 1.0);
  }
  {
    gp::Problem p;
    const int x = p.add_variable("x");
    const int y = p.add_variable("y");
    p.set_objective(Monomial(1.0, {{x, -1.0}, {y, -1.0}}));
    p.add_inequality(Monomial(0.5, {{x, 1.0}}));
    p.add_inequality(Monomial(1.0 / 3.0, {{y, 1.0}}));
    run("min 1/(xy), x <= 2, y <= 3", p, {1.0, 1.0}, 1.0 / 6.0);
  }
  {
    gp::Problem p;
    const int x = p.add_variable("x");
    const int y = p.add_variable("y");
    p.set_objective(Posynomial(Monomial::var(x)) + Monomial::var(y));
    p.add_inequality(Monomial(1.0, {{x, -1.0}, {y, -1.0}}));
    run("min x + y, xy >= 1", p, {0.1, 0.2}, 2.0);
  }
  {
    gp::Problem p;
    const int x = p.add_variable("x");
    const int y = p.add_variable("y");
    const int z = p.add_variable("z");
    p.set_objective(Posynomial(Monomial::var(x)) + Monomial::var(y) + Monomial::var(z));
    p.add_equality(Monomial(0.125, {{x, 1.0}, {y, 1.0}, {z, 1.0}}));
    run("min x + y + z, xyz = 8", p, {1.0, 1.0, 1.0}, 6.0);
  }
  {
    gp::Problem p;
    const int x = p.add_variable("x");
    const int y = p.add_variable("y");
    p.set_objective(Posynomial(Monomial::var(x)) + Monomial::var(y));
    p.add_equality(Monomial(0.25, {{x, 2.0}, {y, 2.0}}));
    run("min x + y, x^2 y^2 = 4", p, {1.0, 5.0}, 2.0 * std::sqrt(2.0));
  }
  {
    gp::Problem p;
    const int x = p.add_variable("x");
    p.set_objective(Posynomial(Monomial::var(x, 2.0)) + Monomial(4.0, {{x, -1.0}}));
    run("min x^2 + 4/x", p, {3.0}, 3.0 * std::cbrt(4.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Replications

ReplicationResult run_replication(const ExperimentConfig& cfg, const TopologyConfig& tc, const std::string& sweep,
                                  int replication, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ReplicationResult r;
  r.sweep = sweep;
  r.replication = replication;
  r.seed = seed;
  const TimingConstants timing = derive_timing(cfg.timing);
  const Topology topo = generate_topology(tc, derive_seed(seed, "topology"));
  const LinkTable links = link_rates(topo, cfg.channel, rate_table(cfg), derive_seed(seed, "links"));
  const std::vector<IspSpec> isps =
      default_isps(topo.isp, tc.n_isps, static_cast<std::size_t>(tc.n_aps), cfg.optimizer.eta_scale);
  r.n_sta = topo.stas.size();
  r.unserved = links.unserved.size();

  const std::vector<int> choice = max_snr_association(links);
  const NetworkMetrics mb =
      evaluate_network(links.rates, isps, timing, max_snr_operating_point(links, choice, cfg.edca, timing));
  r.max_snr = {mb.total_throughput, mb.isp_throughput, mb.isp_airtime, jain_or_nan(mb.isp_throughput)};

  try {
    const AssociationSolution sol = solve_association(links.rates, isps, timing, assoc_options(cfg));
    r.status = to_string(sol.status);
    r.ok = sol.status == AssocStatus::kConverged;
    r.flag = sol.diagnostics;
    r.gp = {sol.total_throughput, sol.isp_throughput, sol.isp_airtime, jain_or_nan(sol.isp_throughput)};
    r.iterations = sol.iterations;
    r.max_residual = sol.max_residual;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : sol.trace) {
      if (row.phase != 2) continue;
      if (!std::isnan(prev)) {
        const double drop = (prev - row.objective) / std::max(std::abs(prev), 1e-300);
        r.worst_trace_drop = std::max(r.worst_trace_drop, drop);
      }
      prev = row.objective;
    }
    r.trace_monotone = r.worst_trace_drop <= 1e-8;
  } catch (const std::invalid_argument& e) {
    r.status = "infeasible";
    r.flag = e.what();
    r.gp.isp_throughput.assign(isps.size(), 0.0);
    r.gp.isp_airtime.assign(isps.size(), 0.0);
    r.gp.jain = std::numeric_limits<double>::quiet_NaN();
  }
  r.wall_seconds = seconds_since(t0);
  return r;
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  const auto& s = cfg.scenario;
  auto lambdas = [&](std::vector<double> def) { return s.lambda_mean.value_or(std::move(def)); };
  auto rhos = [&](std::vector<double> def) { return s.rho.value_or(std::move(def)); };
  TopologyConfig base;
  base.kind = s.kind;
  base.n_aps = s.n_aps;
  base.n_isps = s.n_isps;
  base.cell = s.cell;
  std::vector<SweepPoint> out;
  auto add = [&](const std::string& label, double lam, double rho, Placement kind) {
    TopologyConfig t = base;
    t.lambda_mean = lam;
    t.rho = rho;
    t.kind = kind;
    out.push_back({label, t});
  };
  const std::string& e = cfg.experiment;
  if (e == "throughput-vs-density-homogeneous" || e == "throughput-vs-density-nonhomogeneous" || e == "iterations") {
    const Placement kind = e == "throughput-vs-density-homogeneous"      ? Placement::kHomogeneous
                           : e == "throughput-vs-density-nonhomogeneous" ? Placement::kNonHomogeneous
                                                                         : s.kind;
    const double rho = rhos({0.5}).front();
    for (double lam : lambdas({1, 2, 3, 4, 5, 6})) add(fmt::format("lambda_mean={:g}", lam), lam, rho, kind);
  } else if (e == "throughput-vs-load") {
    const double lam = lambdas({3}).front();
    for (double rho : rhos({0.1, 0.3, 0.5, 0.7, 0.9})) add(fmt::format("rho={:g}", rho), lam, rho, s.kind);
  } else if (e == "fairness-vs-density") {
    for (double lam : lambdas({1, 2, 3, 4})) {
      for (double rho : rhos({0.1, 0.3, 0.5, 0.7, 0.9})) {
        add(fmt::format("lambda_mean={:g};rho={:g}", lam, rho), lam, rho, s.kind);
      }
    }
  } else {
    throw ConfigError("unknown experiment '" + e + "'");
  }
  return out;
}

std::vector<ReplicationResult> run_replications(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points,
                                                Execution exec) {
  const auto reps = static_cast<std::size_t>(cfg.replications);
  return map_indexed<ReplicationResult>(
      points.size() * reps,
      [&](std::size_t idx) {
        const SweepPoint& pt = points[idx / reps];
        const auto r = static_cast<int>(idx % reps);
        const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, pt.label), static_cast<std::uint64_t>(r));
        return run_replication(cfg, pt.topology, pt.label, r, seed);
      },
      exec, cfg.jobs);
}

std::vector<Summary> summarize(const std::vector<ReplicationResult>& reps, const std::vector<SweepPoint>& points,
                               int n_isps) {
  std::vector<Summary> out;
  for (const auto& pt : points) {
    std::vector<const ReplicationResult*> used;
    int excluded = 0;
    for (const auto& r : reps) {
      if (r.sweep != pt.label) continue;
      if (r.ok) {
        used.push_back(&r);
      } else {
        ++excluded;
      }
    }
    auto emit = [&](const std::string& scheme, const std::string& isp, const std::string& metric, auto get) {
      std::vector<double> v;
      for (const auto* r : used) {
        const double x = get(*r);
        if (std::isfinite(x)) v.push_back(x);
      }
      const MeanCi m = mean_ci(v);
      out.push_back({pt.label, scheme, isp, metric, m.mean, m.ci});
    };
    for (const std::string scheme : {"gp", "max-snr"}) {
      auto pick = [scheme](const ReplicationResult& r) -> const SchemeMetrics& {
        return scheme == "gp" ? r.gp : r.max_snr;
      };
      emit(scheme, "all", "total_throughput_mbps", [&](const ReplicationResult& r) { return pick(r).total; });
      emit(scheme, "all", "jain", [&](const ReplicationResult& r) { return pick(r).jain; });
      for (int k = 0; k < n_isps; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        emit(scheme, std::to_string(k), "isp_throughput_mbps",
             [&](const ReplicationResult& r) { return pick(r).isp_throughput.at(ku); });
        emit(scheme, std::to_string(k), "isp_airtime",
             [&](const ReplicationResult& r) { return pick(r).isp_airtime.at(ku); });
      }
    }
    emit("gp", "all", "iterations", [](const ReplicationResult& r) { return static_cast<double>(r.iterations); });
    out.push_back({pt.label, "all", "all", "replications_used", static_cast<double>(used.size()), 0.0});
    out.push_back({pt.label, "all", "all", "replications_excluded", static_cast<double>(excluded), 0.0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_experiment(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  validate(cfg);
  const std::uint64_t hash = config_hash(cfg);
  const std::vector<SweepPoint> points = sweep_points(cfg);
  const std::vector<ReplicationResult> reps = run_replications(cfg, points, Execution::kParallel);
  const std::vector<Summary> sum = summarize(reps, points, cfg.scenario.n_isps);
  {
    std::ofstream os = open_out(out, cfg.experiment + ".csv");
    CsvWriter w(os, hash, cfg.seed, {"sweep", "scheme", "isp", "metric", "mean", "ci95"});
    for (const auto& s : sum) w.row({s.sweep, s.scheme, s.isp, s.metric, num(s.mean), num(s.ci95)});
  }
  {
    std::ofstream os = open_out(out, cfg.experiment + "_replications.csv");
    CsvWriter w(os, hash, cfg.seed,
                {"sweep", "replication", "seed", "n_sta", "unserved", "gp_status", "flag", "gp_total_mbps",
                 "max_snr_total_mbps", "gp_jain", "max_snr_jain", "iterations", "trace_monotone", "max_residual"});
    for (const auto& r : reps) {
      w.row({r.sweep, integer(r.replication), std::to_string(r.seed), integer(static_cast<long long>(r.n_sta)),
             integer(static_cast<long long>(r.unserved)), r.status, r.flag, num(r.gp.total), num(r.max_snr.total),
             num(r.gp.jain), num(r.max_snr.jain), integer(r.iterations), boolean(r.trace_monotone),
             num(r.max_residual)});
    }
  }
  if (cfg.experiment == "iterations") {
    // Wall time varies run to run, so it lives apart from the reproducible tables.
    std::ofstream os = open_out(out, "iterations_walltime.csv");
    CsvWriter w(os, hash, cfg.seed, {"sweep", "replication", "iterations", "wall_seconds"});
    for (const auto& r : reps) w.row({r.sweep, integer(r.replication), integer(r.iterations), num(r.wall_seconds)});
  }
  for (const auto& pt : points) {
    int excluded = 0;
    for (const auto& r : reps) excluded += (r.sweep == pt.label && !r.ok) ? 1 : 0;
    log << fmt::format("{}: {} of {} replications excluded\n", pt.label, excluded, cfg.replications);
  }
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  validate(cfg);
  const std::uint64_t hash = config_hash(cfg);
  const TimingConstants timing = derive_timing(cfg.timing);
  int failures = 0;
  std::ofstream vs = open_out(out, "validate.csv");
  CsvWriter v(vs, hash, cfg.seed, {"battery", "case", "value", "reference", "tolerance", "pass"});
  auto record = [&](const std::string& battery, const std::string& name, double value, double ref, double tol,
                    bool pass) {
    v.row({battery, name, num(value), num(ref), num(tol), boolean(pass)});
    if (!pass) {
      ++failures;
      log << fmt::format("FAIL {} / {}: value {} reference {} tolerance {}\n", battery, name, num(value), num(ref),
                         num(tol));
    }
  };

  // (a) closed form vs. chain
  const int n_oracle = cfg.validate.oracle_frozen_slots;
  const auto combos = oracle_combos(static_cast<std::size_t>(cfg.validate.oracle_combos), cfg.seed, n_oracle);
  for (const auto& c : oracle_battery(combos, n_oracle, Execution::kParallel, cfg.jobs)) {
    const std::string name = fmt::format("{} p={:g} N={}", params_text(c.combo.params), c.combo.p, n_oracle);
    record("analytics-vs-chain", name + " power", c.power, c.closed_form, 1e-8, c.converged && c.rel_power <= 1e-8);
    record("analytics-vs-chain", name + " direct", c.direct, c.closed_form, 1e-8, c.rel_direct <= 1e-8);
  }

  // (b) simulator vs. analytics
  const auto pts = control_sweep(cfg.validate.tau1, all_control_modes(), timing, sim_settings(cfg),
                                 derive_seed(cfg.seed, "control-sweep"), Execution::kParallel, cfg.jobs);
  {
    std::ofstream os = open_out(out, "control_sweep.csv");
    CsvWriter w(os, hash, cfg.seed,
                {"mode", "tau1", "w_min", "m", "h", "a", "q", "l", "unreachable", "achieved_tau",
                 "analytic_throughput_mbps", "measured_throughput_mbps", "measured_ci95", "measured_tau",
                 "measured_tau_ci95", "rel_error"});
    for (const auto& p : pts) {
      const auto& e = p.params1;
      w.row({to_string(p.mode), num(p.tau1), integer(e.w_min), integer(e.m), integer(e.h), integer(e.a), num(e.q),
             integer(e.l), boolean(p.unreachable), num(p.achieved_tau), num(p.analytic_throughput),
             num(p.measured_throughput), num(p.measured_ci), num(p.measured_tau), num(p.measured_tau_ci),
             num(p.rel_error)});
    }
  }
  for (const auto& p : pts) {
    if (p.mode != ControlMode::kCascade) continue;
    record("sim-vs-analytics", fmt::format("cascade tau1={:g} throughput", p.tau1), p.measured_throughput,
           p.analytic_throughput, std::max(3.0 * p.measured_ci, 0.05 * p.analytic_throughput), p.pass);
  }
  {
    std::ofstream os = open_out(out, "feasible_ranges.csv");
    CsvWriter w(os, hash, cfg.seed, {"mode", "analytic_max_tau1", "measured_max_tau1"});
    for (const auto& r : feasible_ranges(pts)) w.row({to_string(r.mode), num(r.analytic_max), num(r.measured_max)});
  }

  // (c) GP solver
  for (const auto& k : known_gp_battery()) {
    record("gp-known", k.name, k.objective, k.expected, 1e-6, k.status == "optimal" && k.rel_error <= 1e-6);
  }
  const AmGmReport am = amgm_battery(1000, cfg.seed);
  record("gp-amgm", "tangency", am.worst_tangency, 0.0, 1e-12, am.worst_tangency <= 1e-12);
  record("gp-amgm", "dominance", am.worst_dominance, 0.0, 1e-12, am.worst_dominance <= 1e-12);
  for (const auto& g : gp_vs_grid(cfg.validate.gp_instances, cfg.seed, timing, assoc_options(cfg))) {
    record("gp-vs-grid", fmt::format("r=({:g},{:g}) eta={:g}", g.rate1, g.rate2, g.eta), g.solution.total_throughput,
           g.grid.total, 0.005, g.pass);
  }
  log << fmt::format("validate: {} failing checks\n", failures);
  return failures;
}

int cmd_optimize(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  validate(cfg);
  const std::uint64_t hash = config_hash(cfg);
  const TimingConstants timing = derive_timing(cfg.timing);
  TopologyConfig tc;
  tc.kind = cfg.scenario.kind;
  tc.lambda_mean = cfg.scenario.lambda_mean ? cfg.scenario.lambda_mean->front() : 3.0;
  tc.rho = cfg.scenario.rho ? cfg.scenario.rho->front() : 0.5;
  tc.n_aps = cfg.scenario.n_aps;
  tc.n_isps = cfg.scenario.n_isps;
  tc.cell = cfg.scenario.cell;
  const std::uint64_t seed = derive_seed(cfg.seed, "optimize");
  const Topology topo = generate_topology(tc, derive_seed(seed, "topology"));
  const LinkTable links = link_rates(topo, cfg.channel, rate_table(cfg), derive_seed(seed, "links"));
  const auto isps = default_isps(topo.isp, tc.n_isps, static_cast<std::size_t>(tc.n_aps), cfg.optimizer.eta_scale);
  {
    std::ofstream os = open_out(out, "topology.csv");
    os << fmt::format("# config_hash: {:016x}\n# seed: {}\n", hash, cfg.seed);
    write_topology_header(os, topo);
  }
  {
    std::ofstream os = open_out(out, "links.csv");
    os << fmt::format("# config_hash: {:016x}\n# seed: {}\n", hash, cfg.seed);
    write_links_csv(os, links);
  }
  const std::vector<int> choice = max_snr_association(links);
  const auto xb = max_snr_operating_point(links, choice, cfg.edca, timing);
  const NetworkMetrics mb = evaluate_network(links.rates, isps, timing, xb);

  AssociationSolution sol;
  std::string failure;
  try {
    sol = solve_association(links.rates, isps, timing, assoc_options(cfg));
  } catch (const std::invalid_argument& e) {
    failure = e.what();
  }
  const bool have_gp = failure.empty();
  {
    std::ofstream os = open_out(out, "association.csv");
    CsvWriter w(os, hash, cfg.seed,
                {"scheme", "sta_id", "ap_id", "isp", "rate_mbps", "x", "tau", "p", "throughput_mbps"});
    for (std::size_t i = 0; i < links.rates.n_sta(); ++i) {
      for (std::size_t a = 0; a < links.rates.n_ap(); ++a) {
        if (!(links.rates.at(i, a) > 0.0)) continue;
        const std::string isp = std::to_string(topo.isp[i]);
        if (have_gp) {
          w.row({"gp", integer(static_cast<long long>(i)), integer(static_cast<long long>(a)), isp,
                 num(links.rates.at(i, a)), num(sol.x[i][a]), num(sol.tau[i][a]), num(sol.p[i][a]),
                 num(sol.throughput[i][a])});
        }
        std::vector<double> tau_a(links.rates.n_sta());
        for (std::size_t j = 0; j < tau_a.size(); ++j) tau_a[j] = tau_from_x(xb[j][a]);
        w.row({"max-snr", integer(static_cast<long long>(i)), integer(static_cast<long long>(a)), isp,
               num(links.rates.at(i, a)), num(xb[i][a]), num(tau_a[i]), num(busy_probability(tau_a, i)),
               num(mb.throughput[i][a])});
      }
    }
  }
  {
    std::ofstream os = open_out(out, "isp_summary.csv");
    CsvWriter w(os, hash, cfg.seed, {"scheme", "isp", "eta", "airtime", "throughput_mbps"});
    for (std::size_t k = 0; k < isps.size(); ++k) {
      if (have_gp) {
        w.row({"gp", integer(static_cast<long long>(k)), num(isps[k].eta), num(sol.isp_airtime[k]),
               num(sol.isp_throughput[k])});
      }
      w.row({"max-snr", integer(static_cast<long long>(k)), num(isps[k].eta), num(mb.isp_airtime[k]),
             num(mb.isp_throughput[k])});
    }
  }
  {
    std::ofstream os = open_out(out, "trace.csv");
    CsvWriter w(os, hash, cfg.seed, {"iteration", "phase", "objective_mbps", "max_dx", "slack", "trust"});
    for (const auto& t : sol.trace) {
      w.row({integer(t.iteration), integer(t.phase), num(t.objective), num(t.max_dx), num(t.slack), num(t.trust)});
    }
  }
  {
    std::ofstream os = open_out(out, "params.csv");
    CsvWriter w(os, hash, cfg.seed,
                {"sta_id", "ap_id", "tau_target", "p", "w_min", "m", "h", "a", "q", "l", "achieved_tau",
                 "unreachable"});
    if (have_gp) {
      for (std::size_t i = 0; i < links.rates.n_sta(); ++i) {
        for (std::size_t a = 0; a < links.rates.n_ap(); ++a) {
          const double tau = sol.tau[i][a];
          if (!(tau > 0.0)) continue;
          const double p = sol.p[i][a];
          const double target = std::min(tau, tau_upper_bound(p, timing.frozen_slots));
          const ControlResult cr = params_for_tau(target, p, timing.frozen_slots);
          const auto& e = cr.params;
          w.row({integer(static_cast<long long>(i)), integer(static_cast<long long>(a)), num(tau), num(p),
                 integer(e.w_min), integer(e.m), integer(e.h), integer(e.a), num(e.q), integer(e.l),
                 num(cr.achieved_tau), boolean(cr.unreachable)});
        }
      }
    }
  }
  if (!have_gp) {
    log << "optimize: " << failure << '\n';
    return 1;
  }
  log << fmt::format("optimize: {} after {} iterations, GP total {:.4f} Mbps, Max-SNR total {:.4f} Mbps{}\n",
                     to_string(sol.status), sol.iterations, sol.total_throughput, mb.total_throughput,
                     sol.diagnostics.empty() ? "" : " (" + sol.diagnostics + ")");
  return sol.status == AssocStatus::kConverged ? 0 : 1;
}

std::vector<StationSpec> read_stations_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stations file " + path.string());
  std::vector<StationSpec> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw ConfigError("stations file rows need 8 columns: " + line);
    StationSpec s;
    try {
      s.params = {std::stoi(f[1]), std::stoi(f[2]), std::stoi(f[3]), std::stoi(f[4]), std::stod(f[5]),
                  std::stoi(f[6])};
      s.rate_mbps = std::stod(f[7]);
    } catch (const std::exception&) {
      throw ConfigError("malformed stations row: " + line);
    }
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError("stations file has no rows");
  return out;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::vector<StationSpec>& stations, const fs::path& out,
                 std::ostream& log) {
  validate(cfg);
  const TimingConstants timing = derive_timing(cfg.timing);
  SimConfig sc;
  for (const auto& s : stations) {
    sc.params.push_back(s.params);
    sc.rate_bps.push_back(s.rate_mbps * 1e6);
  }
  sc.timing = timing;
  sc.slots = cfg.simulation.slots;
  sc.batches = cfg.simulation.batches;
  sc.warmup = cfg.simulation.warmup;
  sc.freeze = cfg.simulation.freeze;
  sc.seed = derive_seed(cfg.seed, "simulate");
  const SimReport rep = run_sim(sc);
  const BssState fp = solve_bss_fixed_point(sc.params, timing);
  std::ofstream os = open_out(out, "sim.csv");
  CsvWriter w(os, config_hash(cfg), cfg.seed,
              {"sta_id", "tau", "tau_ci95", "analytic_tau", "throughput_mbps", "throughput_ci95",
               "analytic_throughput_mbps", "airtime", "airtime_ci95", "analytic_airtime", "collision_prob"});
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const auto& s = rep.sta[i];
    w.row({integer(static_cast<long long>(i)), num(s.tau), num(s.tau_ci), num(fp.tau[i]), num(s.throughput / 1e6),
           num(s.throughput_ci / 1e6), num(throughput_tau_form(i, fp.tau, sc.rate_bps[i], timing) / 1e6),
           num(s.airtime), num(s.airtime_ci), num(airtime_tau_form(i, fp.tau, timing)), num(s.collision_prob)});
  }
  log << fmt::format("simulate: {} STAs, {} measured general slots\n", stations.size(), rep.general_slots);
  return 0;
}

int cmd_params(const ExperimentConfig& cfg, const std::vector<double>& taus, const fs::path& out, std::ostream& log) {
  validate(cfg);
  if (taus.empty()) throw ConfigError("params needs at least one target");
  for (double t : taus) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("targets must lie in (0, 1)");
  }
  const TimingConstants timing = derive_timing(cfg.timing);
  const int n = timing.frozen_slots;
  std::ofstream os = open_out(out, "params.csv");
  CsvWriter w(os, config_hash(cfg), cfg.seed,
              {"sta_id", "tau_target", "p", "ceiling", "w_min", "m", "h", "a", "q", "l", "achieved_tau",
               "unreachable"});
  int unreachable = 0;
  EdcaParams defaults = control_defaults();
  defaults.q = cfg.edca.q;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double p = busy_probability(taus, i);
    const ControlResult cr = params_for_tau(taus[i], p, n, defaults);
    unreachable += cr.unreachable ? 1 : 0;
    const auto& e = cr.params;
    w.row({integer(static_cast<long long>(i)), num(taus[i]), num(p), num(tau_upper_bound(p, n)), integer(e.w_min),
           integer(e.m), integer(e.h), integer(e.a), num(e.q), integer(e.l), num(cr.achieved_tau),
           boolean(cr.unreachable)});
  }
  log << fmt::format("params: {} targets, {} unreachable\n", taus.size(), unreachable);
  return 0;
}

}  // namespace airslice
