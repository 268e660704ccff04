#pragma once

#include <cstdint>
#include <vector>

#include "airslice/analytics.hpp"

namespace airslice {

/// Column-compressed transition matrix stored by destination: row r lists the
/// (source, probability) pairs flowing into state r. A pull-based SpMV over
/// this layout gives every output entry a fixed summation order, so the serial
/// and threaded kernels produce identical bits.
struct TransitionMatrix {
  std::size_t size = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> source;
  std::vector<double> prob;

  /// Sum of outgoing probability per source state (should be 1).
  std::vector<double> out_mass() const;
};

/// Brute-force enumeration of the per-STA EDCA chain, built directly from the
/// state transition rules and independent of the closed-form solution.
class ChainModel {
 public:
  ChainModel(const EdcaParams& params, int frozen_slots, double p,
             WindowConvention convention = WindowConvention::kInclusive);

  std::size_t size() const { return states_.size(); }
  /// Dense index of a state or -1 when it does not exist.
  std::int64_t index(int stage, std::int64_t counter, int frozen) const;
  const TransitionMatrix& matrix() const { return matrix_; }

  struct State {
    int stage;
    std::int64_t counter;
    int frozen;
  };
  const std::vector<State>& states() const { return states_; }

  /// A state that is recurrent for every valid parameter set.
  std::size_t anchor() const;

  /// Sum of pi over the transmit states (stage >= 0, counter 0, frozen 0).
  double tau(const std::vector<double>& pi) const;

  /// Number of states the chain would have, without building it.
  static std::size_t count_states(const EdcaParams& params, int frozen_slots,
                                  WindowConvention convention = WindowConvention::kInclusive);

 private:
  std::int64_t draw_span(int stage) const;

  EdcaParams params_;
  int frozen_slots_;
  double p_;
  WindowConvention convention_;
  std::vector<State> states_;
  std::vector<std::size_t> stage_offset_;  // first index of each backoff stage
  std::size_t aifs_offset_ = 0;
  TransitionMatrix matrix_;
};

enum class Execution { kSerial, kParallel };

struct PowerIterationOptions {
  double laziness = 0.25;  // pi' = a*pi + (1-a)*pi*P, breaks periodicity
  double tolerance = 1e-13;  // L1 change between iterates
  std::int64_t max_iterations = 20'000'000;
  Execution execution = Execution::kSerial;
};

struct PowerIterationResult {
  std::vector<double> pi;
  std::int64_t iterations = 0;
  double change = 0;
  bool converged = false;
};

/// One pull-based product y = P^T x.
void spmv(const TransitionMatrix& m, const std::vector<double>& x, std::vector<double>& y,
          Execution execution);

PowerIterationResult power_iterate(const TransitionMatrix& m, const PowerIterationOptions& opts = {});

/// Stationary vector from a sparse LU solve of (P^T - I) pi = 0 with pi[anchor]
/// pinned and the result normalized. The anchor must be a recurrent state.
/// Used to cross-check the power iteration.
std::vector<double> direct_stationary(const TransitionMatrix& m, std::size_t anchor);

/// L1 norm of pi*P - pi.
double stationary_residual(const TransitionMatrix& m, const std::vector<double>& pi);

}  // namespace airslice
