#pragma once

#include <string_view>
#include <vector>

#include "airslice/analytics.hpp"

namespace airslice {

/// Starting point of the parameter cascade.
inline EdcaParams control_defaults() { return EdcaParams{15, 6, 6, 6, 0.5, 100}; }

enum class Knob { kWMin, kL, kA, kM, kH };
std::string_view knob_name(Knob k);

/// Search ranges for the knobs that have no affine inversion.
struct KnobLimits {
  int a_max = 64;
  int m_max = 16;
  int h_max = 16;
  int w_max = 1 << 20;
  int l_max = 1 << 24;
};

struct ControlResult {
  EdcaParams params;
  double achieved_tau = 0;
  Knob last_knob = Knob::kWMin;  // knob that was solved last
  bool unreachable = false;      // target beyond what the knob(s) can reach
};

/// Cascade W_min -> L -> A -> m -> h. Each knob is solved with the others
/// fixed; when its solution falls below its floor (0, 0, 1, 0, 0) it is
/// clamped and the next knob is solved.
ControlResult params_for_tau(double tau_target, double p, int frozen_slots,
                             const EdcaParams& defaults = control_defaults(),
                             const KnobLimits& limits = {});

/// Tunes a single knob with every other parameter held at its default; the
/// knob is clamped to its range and `unreachable` reports a clamp.
ControlResult control_single_knob(Knob knob, double tau_target, double p, int frozen_slots,
                                  const EdcaParams& defaults = control_defaults(),
                                  const KnobLimits& limits = {});

/// Largest tau reachable by a single knob at p (the clamp end of its range).
double single_knob_ceiling(Knob knob, double p, int frozen_slots,
                           const EdcaParams& defaults = control_defaults(),
                           const KnobLimits& limits = {});

/// Busy probability STA i will see once every STA runs at its target tau.
double target_busy_probability(const std::vector<double>& tau_targets, std::size_t i);

}  // namespace airslice
