#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "popre/channel.hpp"

namespace popre::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

// Dense LP in the form: minimize objective . x subject to per-row relations
// and variable bounds (+/-inf allowed).
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Relation> relations;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  static LpProblem with_variables(int num_vars, double lo = 0.0, double hi = kInf);
  void add_row(std::vector<double> coeffs, Relation rel, double b);
  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  void validate() const;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

class LpIterationLimitError : public std::runtime_error {
 public:
  explicit LpIterationLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Two-phase dense simplex, Bland's anti-cycling rule, pivot tolerance 1e-9,
// feasibility tolerance 1e-8. Throws LpIterationLimitError after
// 50*(rows+cols) pivots.
LpSolution solve_lp(const LpProblem& problem);

// Max violation of constraints/bounds of `problem` at point x.
double constraint_violation(const LpProblem& problem, std::span<const double> x);

// min sum t  s.t.  sum p' = 1, -t_j <= qhat_j - (p'A)_j <= t_j, p', t >= 0.
// Variables ordered [p'_0..p'_n, t_0..t_n].
LpProblem build_l1_fit_lp(const ChannelMatrix& a, std::span<const double> qhat);

// min ||cA||_1 over c = c+ - c- with sum c = 0, c_0 = 2 eps, sum |c| <= 2.
// Variables ordered [c+_0..c+_n, c-_0..c-_n, t_0..t_n].
LpProblem build_eta_lp(const ChannelMatrix& a, double eps);

// Same problem with the |cA|_j rows and slack variables scaled by row_scale
// and the objective divided by it, so the optimum still equals eta while the
// solver resolves optima far below its absolute feasibility tolerance.
LpProblem build_eta_lp_scaled(const ChannelMatrix& a, double eps, double row_scale);

// Extracts the p' block / the certificate c from solutions of the builders.
std::vector<double> l1_fit_probability(const LpSolution& sol, int n);
std::vector<double> eta_certificate(const LpSolution& sol, int n);

}  // namespace popre::lp
