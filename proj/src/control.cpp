#include "airslice/control.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace airslice {

namespace {

struct Ctx {
  double target;
  double p;
  int n;
  KnobLimits lim;
  double tau(const EdcaParams& e) const { return tau_from_params(e, p, n); }
};

enum class Outcome { kSolved, kBelowFloor, kAboveCeiling };

void set(EdcaParams& e, Knob k, int v) {
  switch (k) {
    case Knob::kWMin: e.w_min = v; break;
    case Knob::kL: e.l = v; break;
    case Knob::kA: e.a = v; break;
    case Knob::kM: e.m = v; break;
    case Knob::kH: e.h = v; break;
  }
}

int floor_of(Knob k) { return k == Knob::kA ? 1 : 0; }

int ceiling_of(Knob k, const KnobLimits& lim) {
  switch (k) {
    case Knob::kWMin: return lim.w_max;
    case Knob::kL: return lim.l_max;
    case Knob::kA: return lim.a_max;
    case Knob::kM: return lim.m_max;
    case Knob::kH: return lim.h_max;
  }
  return 0;
}

// Of n-1, n, n+1 (inside [lo, hi]) keep the one whose tau is closest to the
// target; n wins ties.
int best_neighbor(const Ctx& c, EdcaParams e, Knob k, int n, int lo, int hi) {
  int best = n;
  set(e, k, n);
  double err = std::abs(c.tau(e) - c.target);
  for (int cand : {n - 1, n + 1}) {
    if (cand < lo || cand > hi) continue;
    set(e, k, cand);
    const double d = std::abs(c.tau(e) - c.target);
    if (d < err) {
      err = d;
      best = cand;
    }
  }
  return best;
}

// Real-valued solution of the closed form for W_min or L (both enter
// affinely); NaN when the knob has no effect.
double affine_solution(const Ctx& c, const EdcaParams& e, Knob k) {
  EdcaParams zero = e;
  set(zero, k, 0);
  const NormalizationTerms t = normalization_terms(zero, c.p, c.n);
  const double need = t.stages / c.target - t.total();  // extra denominator mass
  if (k == Knob::kWMin) {
    // backoff term is W_min * coef when W_min = 1
    EdcaParams one = e;
    one.w_min = 1;
    const double coef = normalization_terms(one, c.p, c.n).backoff;
    return need / coef;
  }
  if (e.q >= 1.0 || e.q <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return need * e.q / (1.0 - e.q);
}

double round_half_away(double v) { return std::round(v); }

Outcome solve_affine(const Ctx& c, EdcaParams& e, Knob k) {
  const double raw = affine_solution(c, e, k);
  const int hi = ceiling_of(k, c.lim);
  if (std::isnan(raw)) {
    // The knob does not move tau (L with q = 1): leave it at its floor.
    set(e, k, 0);
    return c.tau(e) < c.target ? Outcome::kBelowFloor : Outcome::kSolved;
  }
  const double r = round_half_away(raw);
  if (r < 0.0) {
    set(e, k, 0);
    return Outcome::kBelowFloor;
  }
  if (r > hi) {
    set(e, k, hi);
    return Outcome::kAboveCeiling;
  }
  set(e, k, best_neighbor(c, e, k, static_cast<int>(r), 0, hi));
  return Outcome::kSolved;
}

// tau is monotone in the knob over [lo, hi]; `increasing` gives the
// direction. Bisection finds the crossing, then the closer neighbor is kept.
Outcome solve_monotone(const Ctx& c, EdcaParams& e, Knob k, bool increasing) {
  const int lo = floor_of(k);
  const int hi = ceiling_of(k, c.lim);
  auto tau_at = [&](int v) {
    EdcaParams t = e;
    set(t, k, v);
    return c.tau(t);
  };
  // "reached" means the knob value is on the target's side of the crossing.
  auto reached = [&](int v) { return increasing ? tau_at(v) <= c.target : tau_at(v) >= c.target; };
  if (!reached(lo)) {
    set(e, k, lo);
    return Outcome::kBelowFloor;
  }
  if (reached(hi)) {
    set(e, k, hi);
    return increasing ? (tau_at(hi) < c.target ? Outcome::kAboveCeiling : Outcome::kSolved)
                      : (tau_at(hi) > c.target ? Outcome::kAboveCeiling : Outcome::kSolved);
  }
  int a = lo;  // reached
  int b = hi;  // not reached
  while (b - a > 1) {
    const int mid = a + (b - a) / 2;
    if (reached(mid)) {
      a = mid;
    } else {
      b = mid;
    }
  }
  const double ea = std::abs(tau_at(a) - c.target);
  const double eb = std::abs(tau_at(b) - c.target);
  set(e, k, eb < ea ? b : a);
  return Outcome::kSolved;
}

Outcome solve_knob(const Ctx& c, EdcaParams& e, Knob k) {
  switch (k) {
    case Knob::kWMin:
    case Knob::kL: return solve_affine(c, e, k);
    case Knob::kA: return solve_monotone(c, e, k, false);
    case Knob::kM:
    case Knob::kH: return solve_monotone(c, e, k, true);
  }
  return Outcome::kSolved;
}

Ctx make_ctx(double target, double p, int n, const KnobLimits& lim) {
  if (!(target > 0.0 && target < 1.0)) throw std::domain_error("target tau must lie in (0, 1)");
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("busy probability must lie in [0, 1)");
  return Ctx{target, p, n, lim};
}

}  // namespace

std::string_view knob_name(Knob k) {
  switch (k) {
    case Knob::kWMin: return "w_min";
    case Knob::kL: return "l";
    case Knob::kA: return "a";
    case Knob::kM: return "m";
    case Knob::kH: return "h";
  }
  return "?";
}

ControlResult params_for_tau(double tau_target, double p, int frozen_slots,
                             const EdcaParams& defaults, const KnobLimits& limits) {
  const Ctx c = make_ctx(tau_target, p, frozen_slots, limits);
  validate(defaults);
  ControlResult res;
  res.params = defaults;
  static constexpr Knob kOrder[] = {Knob::kWMin, Knob::kL, Knob::kA, Knob::kM, Knob::kH};
  for (Knob k : kOrder) {
    res.last_knob = k;
    const Outcome o = solve_knob(c, res.params, k);
    if (o == Outcome::kSolved) break;
    if (o == Outcome::kAboveCeiling) {
      res.unreachable = true;
      break;
    }
    // Below the floor: already clamped, move on. A clamp on the last knob
    // leaves nothing to adjust.
    if (k == Knob::kH) res.unreachable = true;
  }
  res.achieved_tau = c.tau(res.params);
  return res;
}

ControlResult control_single_knob(Knob knob, double tau_target, double p, int frozen_slots,
                                  const EdcaParams& defaults, const KnobLimits& limits) {
  const Ctx c = make_ctx(tau_target, p, frozen_slots, limits);
  validate(defaults);
  ControlResult res;
  res.params = defaults;
  res.last_knob = knob;
  if (knob == Knob::kM || knob == Knob::kH) {
    // With W_min > 0 tau need not be monotone in m or h, so scan the range.
    int best = floor_of(knob);
    double err = std::numeric_limits<double>::infinity();
    for (int v = floor_of(knob); v <= ceiling_of(knob, limits); ++v) {
      EdcaParams t = defaults;
      set(t, knob, v);
      const double d = std::abs(c.tau(t) - tau_target);
      if (d < err) {
        err = d;
        best = v;
      }
    }
    set(res.params, knob, best);
    res.achieved_tau = c.tau(res.params);
    res.unreachable = std::abs(res.achieved_tau - tau_target) > 0.1 * tau_target;
    return res;
  }
  const Outcome o = solve_knob(c, res.params, knob);
  res.unreachable = o != Outcome::kSolved;
  res.achieved_tau = c.tau(res.params);
  return res;
}

double single_knob_ceiling(Knob knob, double p, int frozen_slots, const EdcaParams& defaults,
                           const KnobLimits& limits) {
  double best = 0.0;
  if (knob == Knob::kM || knob == Knob::kH) {
    for (int v = 0; v <= ceiling_of(knob, limits); ++v) {
      EdcaParams t = defaults;
      set(t, knob, v);
      best = std::max(best, tau_from_params(t, p, frozen_slots));
    }
    return best;
  }
  EdcaParams t = defaults;
  set(t, knob, floor_of(knob));
  return tau_from_params(t, p, frozen_slots);
}

double target_busy_probability(const std::vector<double>& tau_targets, std::size_t i) {
  if (i >= tau_targets.size()) throw std::out_of_range("STA index out of range");
  return busy_probability(tau_targets, i);
}

}  // namespace airslice
