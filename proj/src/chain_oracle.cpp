#include "airslice/chain_oracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace airslice {

namespace {

struct Edge {
  std::uint32_t from;
  std::uint32_t to;
  double prob;
};

}  // namespace

std::vector<double> TransitionMatrix::out_mass() const {
  std::vector<double> mass(size, 0.0);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) mass[source[k]] += prob[k];
  }
  return mass;
}

std::size_t ChainModel::count_states(const EdcaParams& params, int frozen_slots,
                                     WindowConvention convention) {
  const std::size_t depth = static_cast<std::size_t>(frozen_slots + params.a) + 1;
  std::size_t n = static_cast<std::size_t>(params.l) + depth;
  for (int j = 0; j <= params.m + params.h; ++j) {
    std::int64_t span = contention_window(params, j) + 1;
    if (convention == WindowConvention::kExclusive) span -= 1;
    n += 1 + static_cast<std::size_t>(span - 1) * depth;
  }
  return n;
}

std::int64_t ChainModel::draw_span(int stage) const {
  const std::int64_t w = contention_window(params_, stage);
  return convention_ == WindowConvention::kInclusive ? w + 1 : w;
}

ChainModel::ChainModel(const EdcaParams& params, int frozen_slots, double p,
                       WindowConvention convention)
    : params_(params), frozen_slots_(frozen_slots), p_(p), convention_(convention) {
  validate(params_);
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("busy probability must lie in [0, 1)");
  if (frozen_slots < 0) throw std::invalid_argument("frozen_slots must be >= 0");
  if (convention == WindowConvention::kExclusive && params.w_min < 1) {
    throw std::invalid_argument("exclusive window convention needs w_min >= 1");
  }
  if (params.q == 0.0 && params.l == 0) {
    throw std::invalid_argument("q = 0 with l = 0 has no stationary distribution");
  }
  const std::size_t total = count_states(params_, frozen_slots_, convention_);
  if (total >= std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("state space too large");
  }

  const int a = params_.a;
  const int depth = frozen_slots_ + a;  // largest frozen index
  const int last = params_.m + params_.h;

  states_.reserve(total);
  for (int d = 0; d < params_.l; ++d) states_.push_back({-2, 0, d});
  aifs_offset_ = states_.size();
  for (int d = 0; d <= depth; ++d) states_.push_back({-1, 0, d});
  stage_offset_.resize(static_cast<std::size_t>(last) + 1);
  for (int j = 0; j <= last; ++j) {
    stage_offset_[j] = states_.size();
    states_.push_back({j, 0, 0});
    for (std::int64_t b = 1; b < draw_span(j); ++b) {
      for (int d = 0; d <= depth; ++d) states_.push_back({j, b, d});
    }
  }

  std::vector<Edge> edges;
  edges.reserve(states_.size() * 2 + 64);
  auto add = [&](std::int64_t from, std::int64_t to, double pr) {
    if (from < 0 || to < 0) throw std::logic_error("transition to a missing state");
    if (pr == 0.0) return;
    edges.push_back({static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(to), pr});
  };
  // Coin after a success or a drop. With l = 0 a tail re-flips at once, so
  // the walk ends in the AIFS chain with certainty.
  auto coin = [&](std::int64_t from, double mass) {
    if (params_.l == 0) {
      add(from, index(-1, 0, a), mass);
      return;
    }
    add(from, index(-1, 0, a), mass * params_.q);
    add(from, index(-2, 0, params_.l - 1), mass * (1.0 - params_.q));
  };
  auto enter_stage = [&](std::int64_t from, int j, double mass) {
    const std::int64_t span = draw_span(j);
    const double each = mass / static_cast<double>(span);
    for (std::int64_t b = 0; b < span; ++b) add(from, index(j, b, 0), each);
  };

  for (int d = 0; d < params_.l; ++d) {
    const std::int64_t s = index(-2, 0, d);
    if (d >= 1) {
      add(s, index(-2, 0, d - 1), 1.0);
    } else {
      add(s, index(-2, 0, params_.l - 1), 1.0 - params_.q);
      add(s, index(-1, 0, a), params_.q);
    }
  }
  for (int d = 0; d <= depth; ++d) {
    const std::int64_t s = index(-1, 0, d);
    if (d > a) {
      add(s, index(-1, 0, d - 1), 1.0);
    } else {
      add(s, index(-1, 0, depth), p_);
      if (d >= 1) {
        add(s, index(-1, 0, d - 1), 1.0 - p_);
      } else {
        enter_stage(s, 0, 1.0 - p_);
      }
    }
  }
  for (int j = 0; j <= last; ++j) {
    const std::int64_t tx = index(j, 0, 0);
    if (j < last) {
      coin(tx, 1.0 - p_);
      enter_stage(tx, j + 1, p_);
    } else {
      coin(tx, 1.0);
    }
    for (std::int64_t b = 1; b < draw_span(j); ++b) {
      for (int d = 0; d <= depth; ++d) {
        const std::int64_t s = index(j, b, d);
        if (d > a) {
          add(s, index(j, b, d - 1), 1.0);
        } else if (d >= 2) {
          add(s, index(j, b, depth), p_);
          add(s, index(j, b, d - 1), 1.0 - p_);
        } else {
          // d == 0 counts down directly; d == 1 finishes the post-freeze AIFS.
          add(s, index(j, b, depth), p_);
          add(s, index(j, b - 1, 0), 1.0 - p_);
        }
      }
    }
  }

  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.to != y.to ? x.to < y.to : x.from < y.from;
  });
  matrix_.size = states_.size();
  matrix_.row_ptr.assign(matrix_.size + 1, 0);
  matrix_.source.reserve(edges.size());
  matrix_.prob.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    // Parallel edges (e.g. a self-loop reached two ways) are merged.
    if (k > 0 && edges[k - 1].to == e.to && edges[k - 1].from == e.from) {
      matrix_.prob.back() += e.prob;
      continue;
    }
    matrix_.source.push_back(e.from);
    matrix_.prob.push_back(e.prob);
    ++matrix_.row_ptr[e.to + 1];
  }
  for (std::size_t r = 0; r < matrix_.size; ++r) matrix_.row_ptr[r + 1] += matrix_.row_ptr[r];
}

std::int64_t ChainModel::index(int stage, std::int64_t counter, int frozen) const {
  const int depth = frozen_slots_ + params_.a;
  if (stage == -2) {
    if (counter != 0 || frozen < 0 || frozen >= params_.l) return -1;
    return frozen;
  }
  if (stage == -1) {
    if (counter != 0 || frozen < 0 || frozen > depth) return -1;
    return static_cast<std::int64_t>(aifs_offset_) + frozen;
  }
  if (stage < 0 || stage > params_.m + params_.h) return -1;
  const std::int64_t base = static_cast<std::int64_t>(stage_offset_[stage]);
  if (counter == 0) return frozen == 0 ? base : -1;
  if (counter < 0 || counter >= draw_span(stage) || frozen < 0 || frozen > depth) return -1;
  return base + 1 + (counter - 1) * (depth + 1) + frozen;
}

std::size_t ChainModel::anchor() const {
  if (params_.q == 0.0) return 0;  // only the long-IFS loop is recurrent
  return stage_offset_[0];
}

double ChainModel::tau(const std::vector<double>& pi) const {
  if (pi.size() != size()) throw std::invalid_argument("distribution size mismatch");
  double sum = 0.0;
  for (std::size_t off : stage_offset_) sum += pi[off];
  return sum;
}

void spmv(const TransitionMatrix& m, const std::vector<double>& x, std::vector<double>& y,
          Execution execution) {
  y.resize(m.size);
  const auto n = static_cast<std::int64_t>(m.size);
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) acc += m.prob[k] * x[m.source[k]];
      y[r] = acc;
    }
  } else {
    for (std::int64_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) acc += m.prob[k] * x[m.source[k]];
      y[r] = acc;
    }
  }
}

PowerIterationResult power_iterate(const TransitionMatrix& m, const PowerIterationOptions& opts) {
  if (m.size == 0) throw std::invalid_argument("empty chain");
  if (!(opts.laziness >= 0.0 && opts.laziness < 1.0)) {
    throw std::invalid_argument("laziness must lie in [0, 1)");
  }
  PowerIterationResult res;
  res.pi.assign(m.size, 1.0 / static_cast<double>(m.size));
  std::vector<double> next(m.size);
  const double a = opts.laziness;
  for (res.iterations = 1; res.iterations <= opts.max_iterations; ++res.iterations) {
    spmv(m, res.pi, next, opts.execution);
    double mass = 0.0;
    for (std::size_t r = 0; r < m.size; ++r) {
      next[r] = a * res.pi[r] + (1.0 - a) * next[r];
      mass += next[r];
    }
    double change = 0.0;
    for (std::size_t r = 0; r < m.size; ++r) {
      next[r] /= mass;
      change += std::abs(next[r] - res.pi[r]);
    }
    res.pi.swap(next);
    res.change = change;
    if (change < opts.tolerance) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.iterations = opts.max_iterations;
  return res;
}

std::vector<double> direct_stationary(const TransitionMatrix& m, std::size_t anchor) {
  const std::size_t n = m.size;
  if (anchor >= n) throw std::out_of_range("anchor outside the chain");
  if (n == 1) return {1.0};
  // Unknowns are pi without the anchor entry; equations are the balance rows
  // of every state other than the anchor.
  auto shrink = [anchor](std::size_t i) { return static_cast<int>(i < anchor ? i : i - 1); };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.prob.size() + n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n - 1));
  for (std::size_t r = 0; r < n; ++r) {
    if (r == anchor) continue;
    const int row = shrink(r);
    trip.emplace_back(row, row, -1.0);
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      const std::size_t s = m.source[k];
      if (s == anchor) {
        rhs[row] -= m.prob[k];
      } else {
        trip.emplace_back(row, shrink(s), m.prob[k]);
      }
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU factorization failed");
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU solve failed");

  std::vector<double> pi(n);
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == anchor) continue;
    pi[i] = std::max(0.0, sol[shrink(i)]);
    total += pi[i];
  }
  pi[anchor] = 1.0;
  for (double& v : pi) v /= total;
  return pi;
}

double stationary_residual(const TransitionMatrix& m, const std::vector<double>& pi) {
  std::vector<double> next;
  spmv(m, pi, next, Execution::kSerial);
  double r = 0.0;
  for (std::size_t i = 0; i < m.size; ++i) r += std::abs(next[i] - pi[i]);
  return r;
}

}  // namespace airslice
