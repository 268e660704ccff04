#pragma once

#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace airslice::gp {

/// c * prod_v x_v^{a_v} with c > 0. Exponents are kept sorted by variable id.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(double coef);
  Monomial(double coef, std::vector<std::pair<int, double>> exps);

  static Monomial var(int id, double power = 1.0) { return Monomial(1.0, {{id, power}}); }

  double coef() const { return coef_; }
  const std::vector<std::pair<int, double>>& exps() const { return exps_; }
  double exponent(int id) const;

  double eval(const std::vector<double>& x) const;
  Monomial pow(double e) const;
  Monomial inverse() const { return pow(-1.0); }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend Monomial operator/(const Monomial& a, const Monomial& b) { return a * b.inverse(); }
  friend Monomial operator*(double s, const Monomial& m);

 private:
  double coef_ = 1.0;
  std::vector<std::pair<int, double>> exps_;
};

/// Sum of monomials with positive coefficients.
class Posynomial {
 public:
  Posynomial() = default;
  Posynomial(const Monomial& m) : terms_{m} {}  // NOLINT: implicit on purpose
  explicit Posynomial(std::vector<Monomial> terms);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double eval(const std::vector<double>& x) const;

  Posynomial& operator+=(const Posynomial& o);
  friend Posynomial operator+(Posynomial a, const Posynomial& b) { return a += b; }
  friend Posynomial operator*(const Posynomial& p, const Monomial& m);
  friend Posynomial operator*(const Monomial& m, const Posynomial& p) { return p * m; }
  friend Posynomial operator/(const Posynomial& p, const Monomial& m) { return p * m.inverse(); }
  friend Posynomial operator*(const Posynomial& a, const Posynomial& b);

 private:
  std::vector<Monomial> terms_;
};

/// Best local monomial under-estimator of g at x0 (arithmetic-geometric mean
/// condensation). Terms whose weight falls below 1e-15 are dropped.
Monomial monomial_approx(const Posynomial& g, const std::vector<double>& x0);

struct Bounds {
  double lo = 1e-9;
  double hi = 1e9;
};

/// minimize objective s.t. every inequality <= 1, every equality == 1,
/// lo <= x <= hi.
class Problem {
 public:
  int add_variable(std::string name, Bounds b = {});
  int variable(const std::string& name) const;  // -1 when unknown
  std::size_t num_variables() const { return names_.size(); }
  const std::string& name(int id) const { return names_[static_cast<std::size_t>(id)]; }
  Bounds& bounds(int id) { return bounds_[static_cast<std::size_t>(id)]; }
  const Bounds& bounds(int id) const { return bounds_[static_cast<std::size_t>(id)]; }

  void set_objective(Posynomial f) { objective_ = std::move(f); }
  /// Returns the index of the new constraint.
  std::size_t add_inequality(Posynomial f, std::string label = {});
  std::size_t add_equality(Monomial f, std::string label = {});

  const Posynomial& objective() const { return objective_; }
  const std::vector<Posynomial>& inequalities() const { return ineq_; }
  const std::vector<Monomial>& equalities() const { return eq_; }
  const std::vector<std::string>& inequality_labels() const { return ineq_labels_; }
  const std::vector<std::string>& equality_labels() const { return eq_labels_; }

  /// Checks that every referenced variable exists and 0 < lo <= hi.
  void validate() const;

  /// Debug dump: one monomial per line, coefficient then name^exp pairs.
  void dump(std::ostream& os) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<Bounds> bounds_;
  Posynomial objective_;
  std::vector<Posynomial> ineq_;
  std::vector<Monomial> eq_;
  std::vector<std::string> ineq_labels_;
  std::vector<std::string> eq_labels_;
};

enum class Status { kOptimal, kMaxIter, kInfeasible };
const char* to_string(Status s);

struct Options {
  double tol = 1e-8;           // duality-gap / KKT target
  double mu = 10.0;            // barrier growth per outer step
  int max_newton = 200;        // per centering step
  int max_outer = 60;
  bool presolve = true;        // eliminate x_v = monomial equalities
};

struct Result {
  std::vector<double> x;
  double objective = 0;
  Status status = Status::kMaxIter;
  int newton_iterations = 0;
  double gap = 0;             // m / t at exit
  double kkt_residual = 0;    // reduced gradient norm of the Lagrangian
  double max_violation = 0;   // max over inequalities of log(f_i), equalities of |log f_i|, bounds
  std::string diagnostics;
};

/// Log-barrier interior-point solve in y = log x. `start` must lie inside
/// the variable bounds; constraint feasibility is not required (a phase-I
/// problem is solved first when needed).
Result solve(const Problem& problem, const std::vector<double>& start, const Options& opts = {});

}  // namespace airslice::gp
