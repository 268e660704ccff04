// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the CLI
// binary used by the determinism check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "airslice/experiments.hpp"
#include "airslice/rng.hpp"

using namespace airslice;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << fmt::format("CRITERION {} {}: {} ({})", id, pass ? "PASS" : "FAIL", what, detail) << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------
void closed_form_vs_chain(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = cfg.validate.oracle_frozen_slots;
  const auto combos = oracle_combos(100, cfg.seed, n);
  const auto cases = oracle_battery(combos, n, Execution::kParallel, cfg.jobs);
  double worst = 0.0;
  int bad = 0;
  std::set<double> ps;
  for (const auto& c : cases) {
    ps.insert(c.combo.p);
    worst = std::max(worst, c.rel_power);
    if (!c.converged || !(c.rel_power <= 1e-8)) ++bad;
  }
  const bool pass = cases.size() >= 100 && bad == 0 && ps.size() == 4;
  report(1, pass, "closed form vs power-iterated chain",
         fmt::format("{} combinations, N={}, {} outside 1e-8, worst relative error {:.3e}, {:.0f} s", cases.size(), n,
                     bad, worst, seconds_since(t0)));
}

// 2 -------------------------------------------------------------------------
void simulator_vs_analytics(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const TimingConstants timing = derive_timing(cfg.timing);
  const auto pts = control_sweep(cfg.validate.tau1, all_control_modes(), timing, sim_settings(cfg),
                                 derive_seed(cfg.seed, "control-sweep"), Execution::kParallel, cfg.jobs);
  int bad = 0;
  int total = 0;
  double worst = 0.0;
  double worst_tau = 0.0;
  for (const auto& p : pts) {
    if (p.mode != ControlMode::kCascade) continue;
    ++total;
    if (!p.pass) ++bad;
    if (std::abs(p.rel_error) > std::abs(worst)) {
      worst = p.rel_error;
      worst_tau = p.tau1;
    }
  }
  std::map<ControlMode, double> measured;
  std::string ranges;
  for (const auto& r : feasible_ranges(pts)) {
    measured[r.mode] = r.measured_max;
    ranges += fmt::format(" {}<={:g}", to_string(r.mode), r.measured_max);
  }
  // Printed ordering of the single-knob ranges: A widest, then W_min, then L.
  const bool ordering = measured[ControlMode::kA] >= measured[ControlMode::kWMin] &&
                        measured[ControlMode::kWMin] >= measured[ControlMode::kL];
  report(2, bad == 0 && ordering, "simulated vs analytic throughput over the tau1 sweep",
         fmt::format("{}/{} cascade points outside max(3 CI, 5%), worst {:+.1f}% at tau1={:g}; measured "
                     "single-knob ranges{}; A>=W>=L ordering {}; {:.0f} s",
                     bad, total, 100 * worst, worst_tau, ranges, ordering ? "holds" : "does not hold",
                     seconds_since(t0)));
}

// 3 -------------------------------------------------------------------------
void gp_vs_grid_oracle(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto inst = gp_vs_grid(10, cfg.seed, derive_timing(cfg.timing), assoc_options(cfg));
  int bad = 0;
  double worst = -1.0;
  std::string failing;
  for (const auto& g : inst) {
    worst = std::max(worst, g.gap);
    if (!g.pass) {
      ++bad;
      failing += fmt::format(" ({:g},{:g},eta={:g}: gap {:+.3f}%, {})", g.rate1, g.rate2, g.eta, 100 * g.gap,
                             to_string(g.solution.status));
    }
  }
  report(3, bad == 0, "GP optimizer vs 400x400 grid",
         fmt::format("{}/10 failing{}, largest shortfall {:.3f}%, {:.0f} s", bad, failing, 100 * worst,
                     seconds_since(t0)));
}

// 4-6 -----------------------------------------------------------------------
struct Runs {
  std::vector<ReplicationResult> fairness;
  std::vector<ReplicationResult> nonhom;
  std::vector<ReplicationResult> hom;
  std::vector<SweepPoint> fairness_pts, nonhom_pts, hom_pts;
};

Runs run_experiments(const ExperimentConfig& base) {
  Runs r;
  ExperimentConfig f = base;
  f.experiment = "fairness-vs-density";
  f.scenario.kind = Placement::kHomogeneous;
  f.scenario.lambda_mean = std::vector<double>{1, 2, 3, 4};
  f.scenario.rho = std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9};
  r.fairness_pts = sweep_points(f);
  r.fairness = run_replications(f, r.fairness_pts, Execution::kParallel);

  ExperimentConfig nh = base;
  nh.experiment = "throughput-vs-density-nonhomogeneous";
  nh.scenario.lambda_mean = std::vector<double>{2, 4, 6};
  r.nonhom_pts = sweep_points(nh);
  r.nonhom = run_replications(nh, r.nonhom_pts, Execution::kParallel);

  ExperimentConfig h = nh;
  h.experiment = "throughput-vs-density-homogeneous";
  r.hom_pts = sweep_points(h);
  r.hom = run_replications(h, r.hom_pts, Execution::kParallel);
  return r;
}

std::string exclusion_summary(const std::vector<ReplicationResult>& reps) {
  std::map<std::string, int> why;
  for (const auto& r : reps) {
    if (r.ok) continue;
    std::string key = r.flag;
    if (key.rfind("airtime targets unreachable", 0) == 0) key = "airtime targets unreachable";
    ++why[key];
  }
  std::string s;
  for (const auto& [k, v] : why) s += fmt::format("; {} x '{}'", v, k);
  return s;
}

void fairness(const Runs& runs) {
  int used = 0;
  int below = 0;
  double worst = 2.0;
  std::map<double, std::pair<double, int>> gp_by_rho, snr_by_rho;
  for (const auto& r : runs.fairness) {
    if (!r.ok) continue;
    ++used;
    if (!(r.gp.jain >= 0.99)) ++below;
    worst = std::min(worst, r.gp.jain);
  }
  for (std::size_t k = 0; k < runs.fairness_pts.size(); ++k) {
    const double rho = runs.fairness_pts[k].topology.rho;
    for (const auto& r : runs.fairness) {
      if (r.sweep != runs.fairness_pts[k].label || !r.ok) continue;
      if (std::isfinite(r.gp.jain)) {
        gp_by_rho[rho].first += r.gp.jain;
        gp_by_rho[rho].second += 1;
      }
      if (std::isfinite(r.max_snr.jain)) {
        snr_by_rho[rho].first += r.max_snr.jain;
        snr_by_rho[rho].second += 1;
      }
    }
  }
  bool lower = true;
  std::string agg;
  for (double rho : {0.1, 0.3, 0.7, 0.9}) {
    const auto g = gp_by_rho[rho];
    const auto s = snr_by_rho[rho];
    if (g.second == 0 || s.second == 0) {
      lower = false;
      agg += fmt::format(" rho={:g}: no data", rho);
      continue;
    }
    const double gm = g.first / g.second;
    const double sm = s.first / s.second;
    lower = lower && sm < gm;
    agg += fmt::format(" rho={:g}: GP {:.3f} vs Max-SNR {:.3f}", rho, gm, sm);
  }
  const int total = static_cast<int>(runs.fairness.size());
  const bool pass = used == total && below == 0 && lower;
  report(4, pass, "GP Jain index >= 0.99 in every replication, Max-SNR lower off rho=0.5",
         fmt::format("{}/{} replications produced a GP solution{}; {} below 0.99{}; aggregate{}", used, total,
                     exclusion_summary(runs.fairness), below,
                     used > 0 ? fmt::format(", lowest {:.4f}", worst) : std::string(), agg));
}

struct Means {
  double gp = 0, snr = 0;
  int used = 0;
};

Means means(const std::vector<ReplicationResult>& reps) {
  Means m;
  for (const auto& r : reps) {
    if (!r.ok) continue;
    m.gp += r.gp.total;
    m.snr += r.max_snr.total;
    ++m.used;
  }
  if (m.used > 0) {
    m.gp /= m.used;
    m.snr /= m.used;
  }
  return m;
}

void dominance(const Runs& runs) {
  bool pass = true;
  std::string detail;
  for (const auto& pt : runs.nonhom_pts) {
    std::vector<ReplicationResult> nh, h;
    std::copy_if(runs.nonhom.begin(), runs.nonhom.end(), std::back_inserter(nh),
                 [&](const ReplicationResult& r) { return r.sweep == pt.label; });
    std::copy_if(runs.hom.begin(), runs.hom.end(), std::back_inserter(h),
                 [&](const ReplicationResult& r) { return r.sweep == pt.label; });
    const Means a = means(nh);
    const Means b = means(h);
    const bool ok = a.used > 0 && b.used > 0 && a.gp >= a.snr && (a.gp - a.snr) > (b.gp - b.snr);
    pass = pass && ok;
    detail += fmt::format(" {}: non-homogeneous {} used, GP {:.3f} vs Max-SNR {:.3f} Mbps; homogeneous {} used, "
                          "gap {:.3f} Mbps;",
                          pt.label, a.used, a.gp, a.snr, b.used, b.gp - b.snr);
  }
  std::vector<ReplicationResult> all = runs.nonhom;
  all.insert(all.end(), runs.hom.begin(), runs.hom.end());
  report(5, pass, "GP total throughput dominates Max-SNR, larger gap when non-homogeneous",
         detail + " exclusions" + exclusion_summary(all));
}

void sca_behaviour(const Runs& runs) {
  int instances = 0;
  int over = 0;
  int non_monotone = 0;
  int max_iter = 0;
  double worst_drop = 0.0;
  for (const auto* set : {&runs.fairness, &runs.nonhom, &runs.hom}) {
    for (const auto& r : *set) {
      if (r.n_sta > 20 || (r.status == "infeasible" && r.iterations == 0)) continue;
      ++instances;
      max_iter = std::max(max_iter, r.iterations);
      if (r.iterations > 100) ++over;
      if (!r.trace_monotone) ++non_monotone;
      worst_drop = std::max(worst_drop, r.worst_trace_drop);
    }
  }
  report(6, instances > 0 && over == 0 && non_monotone == 0, "SCA iterations <= 100 and non-decreasing trace",
         fmt::format("{} desk-scale instances reached the solver, max {} iterations, {} over 100, {} traces with a "
                     "decrease beyond 1e-8 (largest relative drop {:.2e})",
                     instances, max_iter, over, non_monotone, worst_drop));
}

// 7 -------------------------------------------------------------------------
void round_trip_check(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const TimingConstants timing = derive_timing(cfg.timing);
  const auto pts = round_trip({0.05, 0.2, 0.5}, 50, timing.frozen_slots, timing, sim_settings(cfg),
                              derive_seed(cfg.seed, "round-trip"), Execution::kParallel, cfg.jobs);
  int analytic_bad = 0;
  int sim_bad = 0;
  double worst = 0.0;
  std::map<double, int> bad_by_p;
  for (const auto& r : pts) {
    if (!(r.rel_error < 0.02) || r.unreachable) {
      ++analytic_bad;
      ++bad_by_p[r.p];
    }
    if (!r.sim_pass) ++sim_bad;
    worst = std::max(worst, r.rel_error);
  }
  std::string per_p;
  for (double p : {0.05, 0.2, 0.5}) per_p += fmt::format(" p={:g}:{}", p, bad_by_p[p]);
  report(7, analytic_bad == 0 && sim_bad == 0, "cascade round trip, analytic < 2% and simulated within max(3 CI, 10%)",
         fmt::format("{} targets; analytic misses {} (per p{}), worst {:.1f}%; simulated misses {}; {:.0f} s",
                     pts.size(), analytic_bad, per_p, 100 * worst, sim_bad, seconds_since(t0)));
}

// 8 -------------------------------------------------------------------------
void gp_core(const ExperimentConfig& cfg) {
  const AmGmReport am = amgm_battery(1000, cfg.seed);
  const auto known = known_gp_battery();
  int bad = 0;
  double worst = 0.0;
  for (const auto& k : known) {
    worst = std::max(worst, k.rel_error);
    if (k.status != "optimal" || !(k.rel_error <= 1e-6)) ++bad;
  }
  const bool pass = am.posynomials == 1000 && am.worst_tangency <= 1e-12 && am.worst_dominance <= 1e-12 &&
                    known.size() >= 5 && bad == 0;
  report(8, pass, "condensation properties and known-optimum GPs",
         fmt::format("{} posynomials / {} samples, tangency {:.2e}, dominance {:.2e}; {} known GPs, {} failing, "
                     "worst relative error {:.2e}",
                     am.posynomials, am.samples, am.worst_tangency, am.worst_dominance, known.size(), bad, worst));
}

// 9 -------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run(const std::string& cmd) { return std::system(cmd.c_str()); }

void determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "airslice_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "small.json");
    cfg << R"({"replications": 2, "simulation": {"slots": 200000},
               "validate": {"oracle_combos": 4, "gp_instances": 2, "tau1": [0.005, 0.05, 0.1]}})";
    std::ofstream st(root / "stations.csv");
    st << "sta,w_min,m,h,a,q,l,rate_mbps\n0,15,6,6,2,1,0,54\n1,31,3,2,3,0.5,10,12\n2,7,2,2,1,1,0,24\n";
  }
  const std::string cfg = (root / "small.json").string();
  const std::vector<std::string> cmds = {
      "validate --config " + cfg,
      "simulate --config " + cfg + " --stations " + (root / "stations.csv").string(),
      "optimize --config " + cfg,
      "experiment --config " + cfg + " --experiment iterations",
      "experiment --config " + cfg + " --experiment throughput-vs-load",
      "params --config " + cfg + " --taus 0.002,0.01,0.02",
  };
  int differing = 0;
  int files = 0;
  std::string which;
  for (std::size_t k = 0; k < cmds.size(); ++k) {
    for (const char* run_dir : {"a", "b"}) {
      const fs::path out = root / run_dir / std::to_string(k);
      run(fmt::format("\"{}\" {} --seed 11 --out \"{}\" > /dev/null 2>&1", cli, cmds[k], out.string()));
    }
    const fs::path a = root / "a" / std::to_string(k);
    if (!fs::exists(a)) {
      ++differing;
      which += " " + cmds[k].substr(0, cmds[k].find(' ')) + "(no output)";
      continue;
    }
    for (const auto& e : fs::directory_iterator(a)) {
      const std::string name = e.path().filename().string();
      if (name == "iterations_walltime.csv") continue;
      ++files;
      if (slurp(e.path()) != slurp(root / "b" / std::to_string(k) / name)) {
        ++differing;
        which += " " + name;
      }
    }
  }
  report(9, differing == 0 && files > 0, "byte-identical CSVs on rerun",
         fmt::format("{} commands, {} CSV files compared, {} differing{}", cmds.size(), files, differing, which));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: airslice_acceptance <path to airslice cli>\n";
    return 2;
  }
  ExperimentConfig cfg;
  cfg.jobs = 0;
  closed_form_vs_chain(cfg);
  simulator_vs_analytics(cfg);
  gp_vs_grid_oracle(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const Runs runs = run_experiments(cfg);
  std::cout << fmt::format("(experiment replications took {:.0f} s)", seconds_since(t0)) << std::endl;
  fairness(runs);
  dominance(runs);
  sca_behaviour(runs);
  round_trip_check(cfg);
  gp_core(cfg);
  determinism(argv[1]);
  std::cout << fmt::format("{} of 9 criteria failed", failures) << std::endl;
  return failures == 0 ? 0 : 1;
}
