#include "airslice/gp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

namespace airslice::gp {

// ---------------------------------------------------------------------------
// Algebra

Monomial::Monomial(double coef) : coef_(coef) {
  if (!(coef > 0.0) || !std::isfinite(coef)) throw std::domain_error("monomial coefficient must be > 0");
}

Monomial::Monomial(double coef, std::vector<std::pair<int, double>> exps) : Monomial(coef) {
  std::sort(exps.begin(), exps.end());
  for (const auto& [id, a] : exps) {
    if (id < 0) throw std::invalid_argument("negative variable id");
    if (!exps_.empty() && exps_.back().first == id) {
      exps_.back().second += a;
    } else {
      exps_.emplace_back(id, a);
    }
  }
  std::erase_if(exps_, [](const auto& e) { return e.second == 0.0; });
}

double Monomial::exponent(int id) const {
  for (const auto& [v, a] : exps_) {
    if (v == id) return a;
  }
  return 0.0;
}

double Monomial::eval(const std::vector<double>& x) const {
  double logv = std::log(coef_);
  for (const auto& [id, a] : exps_) logv += a * std::log(x.at(static_cast<std::size_t>(id)));
  return std::exp(logv);
}

Monomial Monomial::pow(double e) const {
  std::vector<std::pair<int, double>> ex = exps_;
  for (auto& p : ex) p.second *= e;
  return Monomial(std::pow(coef_, e), std::move(ex));
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  std::vector<std::pair<int, double>> ex = a.exps_;
  ex.insert(ex.end(), b.exps_.begin(), b.exps_.end());
  return Monomial(a.coef_ * b.coef_, std::move(ex));
}

Monomial operator*(double s, const Monomial& m) { return Monomial(s * m.coef_, m.exps_); }

Posynomial::Posynomial(std::vector<Monomial> terms) : terms_(std::move(terms)) {}

double Posynomial::eval(const std::vector<double>& x) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.eval(x);
  return s;
}

Posynomial& Posynomial::operator+=(const Posynomial& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

Posynomial operator*(const Posynomial& p, const Monomial& m) {
  std::vector<Monomial> out;
  out.reserve(p.terms_.size());
  for (const auto& t : p.terms_) out.push_back(t * m);
  return Posynomial(std::move(out));
}

Posynomial operator*(const Posynomial& a, const Posynomial& b) {
  std::vector<Monomial> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) out.push_back(s * t);
  }
  return Posynomial(std::move(out));
}

Monomial monomial_approx(const Posynomial& g, const std::vector<double>& x0) {
  if (g.empty()) throw std::invalid_argument("cannot condense an empty posynomial");
  for (double v : x0) {
    if (!(v > 0.0)) throw std::domain_error("expansion point must be strictly positive");
  }
  const auto& terms = g.terms();
  std::vector<double> f(terms.size());
  double total = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    f[k] = terms[k].eval(x0);
    total += f[k];
  }
  Monomial out(1.0);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double alpha = f[k] / total;
    if (alpha < 1e-15) continue;
    out = out * (terms[k] * Monomial(1.0 / alpha)).pow(alpha);
  }
  // Renormalize so that the approximation is exact at x0 even when tiny
  // weights were dropped.
  return Monomial(total / out.eval(x0)) * out;
}

// ---------------------------------------------------------------------------
// Problem

int Problem::add_variable(std::string name, Bounds b) {
  if (index_.count(name)) throw std::invalid_argument("duplicate variable " + name);
  const int id = static_cast<int>(names_.size());
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  bounds_.push_back(b);
  return id;
}

int Problem::variable(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

std::size_t Problem::add_inequality(Posynomial f, std::string label) {
  if (f.empty()) throw std::invalid_argument("empty inequality");
  ineq_.push_back(std::move(f));
  ineq_labels_.push_back(std::move(label));
  return ineq_.size() - 1;
}

std::size_t Problem::add_equality(Monomial f, std::string label) {
  eq_.push_back(std::move(f));
  eq_labels_.push_back(std::move(label));
  return eq_.size() - 1;
}

void Problem::validate() const {
  const int n = static_cast<int>(names_.size());
  auto check = [n](const Monomial& m) {
    for (const auto& [id, a] : m.exps()) {
      if (id >= n) throw std::invalid_argument("constraint references an unknown variable");
      if (!std::isfinite(a)) throw std::invalid_argument("non-finite exponent");
    }
  };
  if (objective_.empty()) throw std::invalid_argument("objective not set");
  for (const auto& t : objective_.terms()) check(t);
  for (const auto& p : ineq_) {
    for (const auto& t : p.terms()) check(t);
  }
  for (const auto& m : eq_) check(m);
  for (const auto& b : bounds_) {
    if (!(b.lo > 0.0) || !(b.lo <= b.hi) || !std::isfinite(b.hi)) {
      throw std::invalid_argument("variable bounds must satisfy 0 < lo <= hi < inf");
    }
  }
}

void Problem::dump(std::ostream& os) const {
  auto mono = [&](const Monomial& m) {
    os << fmt::format("{:.17g}", m.coef());
    for (const auto& [id, a] : m.exps()) os << ' ' << names_[static_cast<std::size_t>(id)] << '^' << fmt::format("{:.17g}", a);
    os << '\n';
  };
  os << "minimize\n";
  for (const auto& t : objective_.terms()) mono(t);
  for (std::size_t i = 0; i < ineq_.size(); ++i) {
    os << "le " << ineq_labels_[i] << '\n';
    for (const auto& t : ineq_[i].terms()) mono(t);
  }
  for (std::size_t i = 0; i < eq_.size(); ++i) {
    os << "eq " << eq_labels_[i] << '\n';
    mono(eq_[i]);
  }
  os << "bounds\n";
  for (std::size_t v = 0; v < names_.size(); ++v) {
    os << names_[v] << ' ' << fmt::format("{:.17g} {:.17g}", bounds_[v].lo, bounds_[v].hi) << '\n';
  }
}

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kMaxIter: return "max_iter";
    case Status::kInfeasible: return "infeasible";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Solver

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// log sum_k exp(A.row(k) * w + b_k) in reduced coordinates w.
struct Lse {
  MatrixXd a;
  VectorXd b;
};

struct Eval {
  double value;
  VectorXd grad;
  MatrixXd hess;  // empty for single-term functions (affine)
};

double lse_value(const Lse& f, const VectorXd& w) {
  const VectorXd z = f.a * w + f.b;
  const double zmax = z.maxCoeff();
  return zmax + std::log((z.array() - zmax).exp().sum());
}

Eval lse_eval(const Lse& f, const VectorXd& w, bool need_hess) {
  Eval e;
  if (f.a.rows() == 1) {
    e.value = f.a.row(0).dot(w) + f.b[0];
    e.grad = f.a.row(0).transpose();
    return e;
  }
  const VectorXd z = f.a * w + f.b;
  const double zmax = z.maxCoeff();
  VectorXd pi = (z.array() - zmax).exp();
  const double s = pi.sum();
  pi /= s;
  e.value = zmax + std::log(s);
  e.grad = f.a.transpose() * pi;
  if (need_hess) {
    e.hess = f.a.transpose() * pi.asDiagonal() * f.a - e.grad * e.grad.transpose();
  }
  return e;
}

// Barrier subproblem: minimize t*f0(w) - sum_i log(-F_i(w)).
struct Barrier {
  Lse obj;
  std::vector<Lse> cons;
  int dim = 0;

  bool strictly_feasible(const VectorXd& w) const {
    for (const auto& c : cons) {
      if (!(lse_value(c, w) < 0.0)) return false;
    }
    return true;
  }
  double phi(const VectorXd& w, double t) const {
    double v = t * lse_value(obj, w);
    for (const auto& c : cons) {
      const double f = lse_value(c, w);
      if (!(f < 0.0)) return std::numeric_limits<double>::infinity();
      v -= std::log(-f);
    }
    return v;
  }
  double max_cons(const VectorXd& w) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : cons) m = std::max(m, lse_value(c, w));
    return m;
  }
};

struct CenterStats {
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0;  // of the barrier gradient divided by t
};

CenterStats center(const Barrier& bp, VectorXd& w, double t, int max_newton,
                   const std::function<bool(const VectorXd&)>& early_stop) {
  CenterStats st;
  const int k = bp.dim;
  for (int it = 0; it < max_newton; ++it) {
    ++st.iterations;
    Eval o = lse_eval(bp.obj, w, true);
    VectorXd g = t * o.grad;
    MatrixXd h = o.hess.size() ? MatrixXd(t * o.hess) : MatrixXd::Zero(k, k);
    for (const auto& c : bp.cons) {
      Eval e = lse_eval(c, w, true);
      const double inv = -1.0 / e.value;  // > 0
      g += inv * e.grad;
      h.noalias() += (inv * inv) * e.grad * e.grad.transpose();
      if (e.hess.size()) h += inv * e.hess;
    }
    st.grad_norm = g.norm() / t;
    Eigen::LDLT<MatrixXd> ldlt(h);
    VectorXd dw;
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        dw = ldlt.solve(-g);
        if (dw.allFinite()) break;
      }
      reg = reg == 0.0 ? 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff()) : reg * 100.0;
      ldlt.compute(h + reg * MatrixXd::Identity(k, k));
    }
    if (!dw.size() || !dw.allFinite()) break;
    const double slope = g.dot(dw);
    const double decrement = -slope;
    if (decrement / 2.0 <= 1e-12) {
      st.converged = true;
      break;
    }
    double step = 1.0;
    VectorXd trial = w + step * dw;
    while (!bp.strictly_feasible(trial) && step > 1e-16) {
      step *= 0.5;
      trial = w + step * dw;
    }
    const double phi0 = bp.phi(w, t);
    while (step > 1e-16 && !(bp.phi(trial, t) <= phi0 + 0.25 * step * slope)) {
      step *= 0.5;
      trial = w + step * dw;
    }
    if (step <= 1e-16) {
      // Cannot make progress: accept the current point as centered to
      // working precision.
      st.converged = decrement < 1e-6;
      break;
    }
    w = trial;
    if (early_stop && early_stop(w)) {
      st.converged = true;
      break;
    }
  }
  return st;
}

struct Reduced {
  std::vector<int> kept;                 // original id for each reduced column
  std::vector<int> column;               // reduced column of each original id, -1 if eliminated
  std::vector<Monomial> substitution;    // for eliminated ids: value in terms of kept originals
  std::vector<Posynomial> ineq;
  std::vector<Monomial> eq;
  Posynomial objective;
  bool inconsistent = false;
};

Monomial substitute(const Monomial& m, const std::vector<std::optional<Monomial>>& subs) {
  Monomial out(m.coef());
  std::vector<std::pair<int, double>> keep;
  for (const auto& [id, a] : m.exps()) {
    if (subs[static_cast<std::size_t>(id)]) {
      out = out * subs[static_cast<std::size_t>(id)]->pow(a);
    } else {
      keep.emplace_back(id, a);
    }
  }
  return out * Monomial(1.0, std::move(keep));
}

Posynomial substitute(const Posynomial& p, const std::vector<std::optional<Monomial>>& subs) {
  std::vector<Monomial> out;
  out.reserve(p.terms().size());
  for (const auto& t : p.terms()) out.push_back(substitute(t, subs));
  return Posynomial(std::move(out));
}

Reduced presolve(const Problem& prob, bool enabled) {
  const std::size_t n = prob.num_variables();
  std::vector<std::optional<Monomial>> subs(n);
  Reduced r;
  std::vector<Monomial> remaining;
  for (const auto& eq : prob.equalities()) {
    Monomial m = substitute(eq, subs);
    int pick = -1;
    double power = 0.0;
    if (enabled) {
      for (const auto& [id, a] : m.exps()) {
        if (a == 1.0 || a == -1.0) {
          pick = id;
          power = a;
          break;
        }
      }
    }
    if (pick < 0) {
      remaining.push_back(m);
      continue;
    }
    // m = x_pick^power * rest = 1  =>  x_pick = rest^(-1/power)
    std::vector<std::pair<int, double>> rest_exps;
    for (const auto& [id, a] : m.exps()) {
      if (id != pick) rest_exps.emplace_back(id, a);
    }
    const Monomial value = Monomial(m.coef(), std::move(rest_exps)).pow(-1.0 / power);
    std::vector<std::optional<Monomial>> one(n);
    one[static_cast<std::size_t>(pick)] = value;
    for (auto& s : subs) {
      if (s) s = substitute(*s, one);
    }
    for (auto& rm : remaining) rm = substitute(rm, one);
    subs[static_cast<std::size_t>(pick)] = value;
  }

  r.column.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (!subs[v]) {
      r.column[v] = static_cast<int>(r.kept.size());
      r.kept.push_back(static_cast<int>(v));
    }
  }
  r.substitution.assign(n, Monomial(1.0));
  for (std::size_t v = 0; v < n; ++v) {
    if (subs[v]) r.substitution[v] = *subs[v];
  }
  r.objective = substitute(prob.objective(), subs);
  for (const auto& p : prob.inequalities()) r.ineq.push_back(substitute(p, subs));
  // Bounds of eliminated variables become monomial inequalities.
  for (std::size_t v = 0; v < n; ++v) {
    if (!subs[v]) continue;
    const Bounds& b = prob.bounds(static_cast<int>(v));
    r.ineq.emplace_back(Monomial(1.0 / b.hi) * *subs[v]);
    r.ineq.emplace_back(Monomial(b.lo) * subs[v]->inverse());
  }
  for (const auto& m : remaining) {
    if (m.exps().empty()) {
      if (std::abs(std::log(m.coef())) > 1e-12) r.inconsistent = true;
      continue;
    }
    r.eq.push_back(m);
  }
  return r;
}

// Rows: one per term; columns: reduced original coordinates (before the
// null-space map).
void to_log(const Posynomial& p, const std::vector<int>& column, int n, MatrixXd& a, VectorXd& b) {
  const auto& terms = p.terms();
  a = MatrixXd::Zero(static_cast<Eigen::Index>(terms.size()), n);
  b.resize(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    b[static_cast<Eigen::Index>(k)] = std::log(terms[k].coef());
    for (const auto& [id, e] : terms[k].exps()) {
      const int col = column[static_cast<std::size_t>(id)];
      if (col < 0) throw std::logic_error("eliminated variable survived presolve");
      a(static_cast<Eigen::Index>(k), col) += e;
    }
  }
}

std::vector<double> recover(const Reduced& r, const VectorXd& y, std::size_t n) {
  std::vector<double> x(n, 1.0);
  for (std::size_t c = 0; c < r.kept.size(); ++c) x[static_cast<std::size_t>(r.kept[c])] = std::exp(y[static_cast<Eigen::Index>(c)]);
  for (std::size_t v = 0; v < n; ++v) {
    if (r.column[v] < 0) x[v] = r.substitution[v].eval(x);
  }
  return x;
}

double max_violation(const Problem& prob, const std::vector<double>& x) {
  double v = 0.0;
  for (const auto& p : prob.inequalities()) v = std::max(v, std::log(p.eval(x)));
  for (const auto& m : prob.equalities()) v = std::max(v, std::abs(std::log(m.eval(x))));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Bounds& b = prob.bounds(static_cast<int>(i));
    v = std::max(v, std::log(b.lo / x[i]));
    v = std::max(v, std::log(x[i] / b.hi));
  }
  return v;
}

}  // namespace

Result solve(const Problem& prob, const std::vector<double>& start, const Options& opts) {
  prob.validate();
  const std::size_t n = prob.num_variables();
  if (start.size() != n) throw std::invalid_argument("start point has the wrong dimension");
  for (std::size_t v = 0; v < n; ++v) {
    if (!(start[v] > 0.0)) throw std::domain_error("start point must be strictly positive");
  }

  Result res;
  const Reduced red = presolve(prob, opts.presolve);
  const int nk = static_cast<int>(red.kept.size());

  auto finish = [&](const VectorXd& y, Status status, std::string diag) {
    res.x = recover(red, y, n);
    res.objective = prob.objective().eval(res.x);
    res.status = status;
    res.max_violation = max_violation(prob, res.x);
    res.diagnostics = std::move(diag);
    return res;
  };

  VectorXd y0(nk);
  for (int c = 0; c < nk; ++c) {
    const auto v = static_cast<std::size_t>(red.kept[static_cast<std::size_t>(c)]);
    const Bounds& b = prob.bounds(red.kept[static_cast<std::size_t>(c)]);
    y0[c] = std::log(std::clamp(start[v], b.lo, b.hi));
  }
  if (red.inconsistent) return finish(y0, Status::kInfeasible, "inconsistent constant equality");

  // Linear equalities in log space, including variables whose bounds pin them.
  std::vector<std::pair<VectorXd, double>> rows;
  for (const auto& m : red.eq) {
    VectorXd r = VectorXd::Zero(nk);
    for (const auto& [id, e] : m.exps()) r[red.column[static_cast<std::size_t>(id)]] += e;
    rows.emplace_back(r, -std::log(m.coef()));
  }
  std::vector<char> pinned(static_cast<std::size_t>(nk), 0);
  for (int c = 0; c < nk; ++c) {
    const Bounds& b = prob.bounds(red.kept[static_cast<std::size_t>(c)]);
    if (b.hi <= b.lo * (1.0 + 1e-12)) {
      VectorXd r = VectorXd::Zero(nk);
      r[c] = 1.0;
      rows.emplace_back(r, std::log(b.lo));
      pinned[static_cast<std::size_t>(c)] = 1;
    }
  }

  MatrixXd z = MatrixXd::Identity(nk, nk);
  VectorXd ybase = y0;
  if (!rows.empty()) {
    MatrixXd aeq(static_cast<Eigen::Index>(rows.size()), nk);
    VectorXd beq(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      aeq.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
      beq[static_cast<Eigen::Index>(i)] = rows[i].second;
    }
    Eigen::JacobiSVD<MatrixXd> svd(aeq, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-12);
    const VectorXd corr = svd.solve(aeq * y0 - beq);
    ybase = y0 - corr;
    if ((aeq * ybase - beq).cwiseAbs().maxCoeff() > 1e-9) {
      return finish(ybase, Status::kInfeasible, "equality constraints are inconsistent");
    }
    const auto rank = svd.rank();
    z = svd.matrixV().rightCols(nk - rank);
  }
  const int k = static_cast<int>(z.cols());

  auto make_lse = [&](const Posynomial& p) {
    MatrixXd a;
    VectorXd b;
    to_log(p, red.column, nk, a, b);
    return Lse{a * z, a * ybase + b};
  };

  Barrier bp;
  bp.dim = k;
  bp.obj = make_lse(red.objective);
  for (const auto& p : red.ineq) bp.cons.push_back(make_lse(p));
  for (int c = 0; c < nk; ++c) {
    if (pinned[static_cast<std::size_t>(c)]) continue;
    const Bounds& b = prob.bounds(red.kept[static_cast<std::size_t>(c)]);
    Lse up{z.row(c), VectorXd::Constant(1, ybase[c] - std::log(b.hi))};
    Lse dn{-z.row(c), VectorXd::Constant(1, std::log(b.lo) - ybase[c])};
    bp.cons.push_back(std::move(up));
    bp.cons.push_back(std::move(dn));
  }
  // Constraints that no longer depend on any free coordinate are checked once.
  std::vector<Lse> live;
  for (auto& c : bp.cons) {
    if (c.a.cwiseAbs().maxCoeff() < 1e-14) {
      const double val = lse_value(c, VectorXd::Zero(k));
      if (val > 1e-9) return finish(ybase, Status::kInfeasible, "constant constraint violated");
      continue;
    }
    live.push_back(std::move(c));
  }
  bp.cons = std::move(live);
  const auto m = static_cast<double>(bp.cons.size());

  auto y_of = [&](const VectorXd& w) -> VectorXd { return ybase + z * w; };

  VectorXd w = VectorXd::Zero(k);
  if (k == 0) {
    res.gap = 0.0;
    return finish(ybase, bp.max_cons(w) <= 1e-9 ? Status::kOptimal : Status::kInfeasible, "no free coordinates");
  }

  // Phase I: minimize s subject to F_i(w) <= s.
  if (!bp.strictly_feasible(w)) {
    Barrier ph;
    ph.dim = k + 1;
    ph.obj.a = MatrixXd::Zero(1, k + 1);
    ph.obj.a(0, k) = 1.0;
    ph.obj.b = VectorXd::Zero(1);
    for (const auto& c : bp.cons) {
      Lse e;
      e.a.resize(c.a.rows(), k + 1);
      e.a.leftCols(k) = c.a;
      e.a.col(k).setConstant(-1.0);
      e.b = c.b;
      ph.cons.push_back(std::move(e));
    }
    VectorXd ws(k + 1);
    ws.head(k) = w;
    ws[k] = bp.max_cons(w) + 1.0;
    // Phase I objective s can be negative; shift it so the barrier's
    // objective stays the linear s itself (no log), handled by using the
    // affine single-term form above.
    const double stop_level = -1e-4;
    auto reached = [&](const VectorXd& v) { return v[k] < stop_level && bp.strictly_feasible(v.head(k)); };
    double t = 1.0;
    bool found = false;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      const CenterStats cs = center(ph, ws, t, opts.max_newton, reached);
      res.newton_iterations += cs.iterations;
      if (reached(ws)) {
        found = true;
        break;
      }
      if (static_cast<double>(ph.cons.size()) / t < 1e-10) break;
      t *= opts.mu;
    }
    if (!found) {
      if (bp.strictly_feasible(ws.head(k))) {
        found = true;
      } else {
        return finish(y_of(ws.head(k)), Status::kInfeasible,
                      fmt::format("phase I optimum s = {:.3e}", ws[k]));
      }
    }
    w = ws.head(k);
  }

  // Phase II.
  double t = 1.0;
  {
    // Pick t so the objective and barrier terms start on a similar scale.
    const Eval o = lse_eval(bp.obj, w, false);
    double gb = 0.0;
    for (const auto& c : bp.cons) {
      const Eval e = lse_eval(c, w, false);
      gb += e.grad.norm() / -e.value;
    }
    const double go = o.grad.norm();
    if (go > 0.0 && gb > 0.0) t = std::clamp(gb / go, 1e-3, 1e6);
  }
  bool centered = false;
  CenterStats cs;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    cs = center(bp, w, t, opts.max_newton, nullptr);
    res.newton_iterations += cs.iterations;
    centered = cs.converged;
    res.gap = m / t;
    if (res.gap < opts.tol) break;
    t *= opts.mu;
  }
  // Lagrangian gradient: grad f0 + sum_i lambda_i grad F_i with lambda_i = 1 / (-t F_i).
  {
    const Eval o = lse_eval(bp.obj, w, false);
    VectorXd g = o.grad;
    for (const auto& c : bp.cons) {
      const Eval e = lse_eval(c, w, false);
      g += e.grad / (-t * e.value);
    }
    res.kkt_residual = g.norm();
  }
  const bool ok = res.gap < opts.tol && (centered || res.kkt_residual < std::sqrt(opts.tol));
  return finish(y_of(w), ok ? Status::kOptimal : Status::kMaxIter,
                fmt::format("gap {:.3e}, kkt {:.3e}, newton {}", res.gap, res.kkt_residual,
                            res.newton_iterations));
}

}  // namespace airslice::gp
