#include "popre/lp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <cstddef>

namespace popre::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-8;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

LpProblem LpProblem::with_variables(int num_vars, double lo, double hi) {
  LpProblem p;
  p.objective.assign(static_cast<std::size_t>(num_vars), 0.0);
  p.lower.assign(static_cast<std::size_t>(num_vars), lo);
  p.upper.assign(static_cast<std::size_t>(num_vars), hi);
  return p;
}

void LpProblem::add_row(std::vector<double> coeffs, Relation rel, double b) {
  if (static_cast<int>(coeffs.size()) != num_vars())
    throw std::invalid_argument("LP row length does not match variable count");
  rows.push_back(std::move(coeffs));
  relations.push_back(rel);
  rhs.push_back(b);
}

void LpProblem::validate() const {
  const std::size_t n = objective.size();
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("LP bound vectors mismatch");
  if (rows.size() != relations.size() || rows.size() != rhs.size())
    throw std::invalid_argument("LP row metadata mismatch");
  for (const auto& r : rows)
    if (r.size() != n) throw std::invalid_argument("LP row length mismatch");
  for (double v : objective)
    if (!finite(v)) throw std::invalid_argument("LP objective has non-finite entry");
  for (double v : rhs)
    if (!finite(v)) throw std::invalid_argument("LP rhs has non-finite entry");
  for (const auto& r : rows)
    for (double v : r)
      if (!finite(v)) throw std::invalid_argument("LP matrix has non-finite entry");
  for (std::size_t j = 0; j < n; ++j)
    if (lower[j] > upper[j]) throw std::invalid_argument("LP variable bounds cross");
}

namespace {

// Standard-form image of an LpProblem: min c.u, E u = b (b >= 0), u >= 0,
// with a record of how each original variable maps back.
struct StandardForm {
  std::vector<double> c;
  std::vector<std::vector<double>> e;  // m rows, cols entries
  std::vector<double> b;
  int cols = 0;
  double objective_shift = 0.0;
  // Original variable j maps to shift[j] + sign[j]*u[pos[j]] (- u[neg[j]] when split).
  std::vector<int> pos, neg;
  std::vector<double> shift, sign;
  // Per row: the slack column usable as the initial basic variable (its
  // coefficient is +1 after rhs sign normalization), or -1.
  std::vector<int> slack_basis;
};

StandardForm to_standard_form(const LpProblem& p) {
  StandardForm s;
  const int nv = p.num_vars();
  s.pos.assign(static_cast<std::size_t>(nv), -1);
  s.neg.assign(static_cast<std::size_t>(nv), -1);
  s.shift.assign(static_cast<std::size_t>(nv), 0.0);
  s.sign.assign(static_cast<std::size_t>(nv), 1.0);

  // Variable substitutions; rows for two-sided bounds are added afterwards.
  struct BoundRow {
    int var;
    double range;
  };
  std::vector<BoundRow> bound_rows;
  int cols = 0;
  for (int j = 0; j < nv; ++j) {
    const double lo = p.lower[static_cast<std::size_t>(j)];
    const double hi = p.upper[static_cast<std::size_t>(j)];
    if (finite(lo)) {
      s.pos[static_cast<std::size_t>(j)] = cols++;
      s.shift[static_cast<std::size_t>(j)] = lo;
      s.sign[static_cast<std::size_t>(j)] = 1.0;
      if (finite(hi)) bound_rows.push_back({j, hi - lo});
    } else if (finite(hi)) {
      s.pos[static_cast<std::size_t>(j)] = cols++;
      s.shift[static_cast<std::size_t>(j)] = hi;
      s.sign[static_cast<std::size_t>(j)] = -1.0;
    } else {
      s.pos[static_cast<std::size_t>(j)] = cols++;
      s.neg[static_cast<std::size_t>(j)] = cols++;
    }
  }

  const int m = p.num_rows() + static_cast<int>(bound_rows.size());
  int slack_count = 0;
  for (auto rel : p.relations)
    if (rel != Relation::Equal) ++slack_count;
  slack_count += static_cast<int>(bound_rows.size());
  s.cols = cols + slack_count;

  s.c.assign(static_cast<std::size_t>(s.cols), 0.0);
  for (int j = 0; j < nv; ++j) {
    const double cj = p.objective[static_cast<std::size_t>(j)];
    s.objective_shift += cj * s.shift[static_cast<std::size_t>(j)];
    s.c[static_cast<std::size_t>(s.pos[static_cast<std::size_t>(j)])] += cj * s.sign[static_cast<std::size_t>(j)];
    if (s.neg[static_cast<std::size_t>(j)] >= 0) s.c[static_cast<std::size_t>(s.neg[static_cast<std::size_t>(j)])] -= cj;
  }

  s.e.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(s.cols), 0.0));
  s.b.assign(static_cast<std::size_t>(m), 0.0);
  std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
  int slack_at = cols;
  for (int r = 0; r < p.num_rows(); ++r) {
    auto& row = s.e[static_cast<std::size_t>(r)];
    double b = p.rhs[static_cast<std::size_t>(r)];
    for (int j = 0; j < nv; ++j) {
      const double a = p.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
      if (a == 0.0) continue;
      b -= a * s.shift[static_cast<std::size_t>(j)];
      row[static_cast<std::size_t>(s.pos[static_cast<std::size_t>(j)])] += a * s.sign[static_cast<std::size_t>(j)];
      if (s.neg[static_cast<std::size_t>(j)] >= 0) row[static_cast<std::size_t>(s.neg[static_cast<std::size_t>(j)])] -= a;
    }
    if (p.relations[static_cast<std::size_t>(r)] == Relation::LessEqual) {
      slack_col[static_cast<std::size_t>(r)] = slack_at;
      row[static_cast<std::size_t>(slack_at++)] = 1.0;
    } else if (p.relations[static_cast<std::size_t>(r)] == Relation::GreaterEqual) {
      slack_col[static_cast<std::size_t>(r)] = slack_at;
      row[static_cast<std::size_t>(slack_at++)] = -1.0;
    }
    s.b[static_cast<std::size_t>(r)] = b;
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    const int r = p.num_rows() + static_cast<int>(k);
    auto& row = s.e[static_cast<std::size_t>(r)];
    row[static_cast<std::size_t>(s.pos[static_cast<std::size_t>(bound_rows[k].var)])] = 1.0;
    slack_col[static_cast<std::size_t>(r)] = slack_at;
    row[static_cast<std::size_t>(slack_at++)] = 1.0;
    s.b[static_cast<std::size_t>(r)] = bound_rows[k].range;
  }
  for (std::size_t r = 0; r < s.e.size(); ++r) {
    const int sc = slack_col[r];
    const bool negative_b = s.b[r] < 0.0;
    // Also flip zero-rhs surplus rows so their slack can start in the basis.
    const bool zero_surplus = s.b[r] == 0.0 && sc >= 0 && s.e[r][static_cast<std::size_t>(sc)] < 0.0;
    if (negative_b || zero_surplus) {
      s.b[r] = -s.b[r];
      for (auto& v : s.e[r]) v = -v;
    }
  }
  s.slack_basis.assign(static_cast<std::size_t>(m), -1);
  for (int r = 0; r < m; ++r) {
    const int sc = slack_col[static_cast<std::size_t>(r)];
    if (sc >= 0 && s.e[static_cast<std::size_t>(r)][static_cast<std::size_t>(sc)] > 0.0)
      s.slack_basis[static_cast<std::size_t>(r)] = sc;
  }
  return s;
}

enum class RunResult { Optimal, Unbounded, NumericFailure };

class SimplexTableau {
 public:
  SimplexTableau(const StandardForm& s, long max_iters)
      : s_(&s), m_(static_cast<int>(s.e.size())), n_(s.cols), max_iters_(max_iters) {
    // Artificial columns only where no slack can start in the basis.
    std::vector<int> art_of_row(static_cast<std::size_t>(m_), -1);
    for (int r = 0; r < m_; ++r)
      if (s.slack_basis[static_cast<std::size_t>(r)] < 0) {
        art_of_row[static_cast<std::size_t>(r)] = static_cast<int>(art_row_.size());
        art_row_.push_back(r);
      }
    const int na = static_cast<int>(art_row_.size());
    width_ = n_ + na + 1;
    t_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
    basis_.resize(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) {
      for (int j = 0; j < n_; ++j) at(r, j) = s.e[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
      rhs(r) = s.b[static_cast<std::size_t>(r)];
      if (art_of_row[static_cast<std::size_t>(r)] >= 0) {
        at(r, n_ + art_of_row[static_cast<std::size_t>(r)]) = 1.0;
        basis_[static_cast<std::size_t>(r)] = n_ + art_of_row[static_cast<std::size_t>(r)];
      } else {
        basis_[static_cast<std::size_t>(r)] = s.slack_basis[static_cast<std::size_t>(r)];
      }
    }
  }

  int artificial_count() const { return static_cast<int>(art_row_.size()); }
  int artificial_row(int ordinal) const { return art_row_[static_cast<std::size_t>(ordinal)]; }

  long double& at(int r, int j) { return t_[static_cast<std::size_t>(r) * width_ + j]; }
  long double& rhs(int r) { return t_[static_cast<std::size_t>(r) * width_ + width_ - 1]; }

  // Rebuilds the tableau as B^{-1}[E A_art b] from the clean standard-form
  // data for the current basis, wiping accumulated pivot drift. Fails on a
  // (near-)singular basis or when the clean basic point is infeasible beyond
  // tolerance, both of which mean the walk went numerically wrong.
  bool refactor() {
    const int na = artificial_count();
    // LU of the basis matrix with partial pivoting.
    std::vector<long double> lu(static_cast<std::size_t>(m_) * m_, 0.0L);
    for (int k = 0; k < m_; ++k) {
      const int j = basis_[static_cast<std::size_t>(k)];
      if (j < n_) {
        for (int r = 0; r < m_; ++r)
          lu[static_cast<std::size_t>(r) * m_ + k] = s_->e[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
      } else {
        lu[static_cast<std::size_t>(art_row_[static_cast<std::size_t>(j - n_)]) * m_ + k] = 1.0;
      }
    }
    std::vector<int> perm(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) perm[static_cast<std::size_t>(r)] = r;
    for (int col = 0; col < m_; ++col) {
      int p = col;
      for (int r = col + 1; r < m_; ++r)
        if (std::abs(lu[static_cast<std::size_t>(r) * m_ + col]) > std::abs(lu[static_cast<std::size_t>(p) * m_ + col])) p = r;
      if (std::abs(lu[static_cast<std::size_t>(p) * m_ + col]) < 1e-14L) return false;
      if (p != col) {
        for (int j = 0; j < m_; ++j)
          std::swap(lu[static_cast<std::size_t>(p) * m_ + j], lu[static_cast<std::size_t>(col) * m_ + j]);
        std::swap(perm[static_cast<std::size_t>(p)], perm[static_cast<std::size_t>(col)]);
      }
      const long double inv = 1.0L / lu[static_cast<std::size_t>(col) * m_ + col];
      for (int r = col + 1; r < m_; ++r) {
        const long double f = lu[static_cast<std::size_t>(r) * m_ + col] * inv;
        lu[static_cast<std::size_t>(r) * m_ + col] = f;
        if (f == 0.0) continue;
        for (int j = col + 1; j < m_; ++j)
          lu[static_cast<std::size_t>(r) * m_ + j] -= f * lu[static_cast<std::size_t>(col) * m_ + j];
      }
    }
    // Solve B X = M column-block-wise into the tableau.
    std::vector<long double> col(static_cast<std::size_t>(m_));
    for (int j = 0; j < n_ + na + 1; ++j) {
      for (int r = 0; r < m_; ++r) {
        const int pr = perm[static_cast<std::size_t>(r)];
        long double v;
        if (j < n_)
          v = s_->e[static_cast<std::size_t>(pr)][static_cast<std::size_t>(j)];
        else if (j < n_ + na)
          v = art_row_[static_cast<std::size_t>(j - n_)] == pr ? 1.0 : 0.0;
        else
          v = s_->b[static_cast<std::size_t>(pr)];
        col[static_cast<std::size_t>(r)] = v;
      }
      for (int r = 1; r < m_; ++r) {
        long double acc = col[static_cast<std::size_t>(r)];
        for (int k = 0; k < r; ++k) acc -= lu[static_cast<std::size_t>(r) * m_ + k] * col[static_cast<std::size_t>(k)];
        col[static_cast<std::size_t>(r)] = acc;
      }
      for (int r = m_ - 1; r >= 0; --r) {
        long double acc = col[static_cast<std::size_t>(r)];
        for (int k = r + 1; k < m_; ++k) acc -= lu[static_cast<std::size_t>(r) * m_ + k] * col[static_cast<std::size_t>(k)];
        col[static_cast<std::size_t>(r)] = acc / lu[static_cast<std::size_t>(r) * m_ + r];
      }
      for (int r = 0; r < m_; ++r) at(r, j) = col[static_cast<std::size_t>(r)];
    }
    pivots_since_refactor_ = 0;
    // The clean basic point must still be (near-)feasible.
    for (int r = 0; r < m_; ++r) {
      if (rhs(r) < -1e-7L) return false;
      if (rhs(r) < 0.0L) rhs(r) = 0.0L;
    }
    return true;
  }

  void set_refactor_every(int every) { refactor_every_ = every; }

  // Minimizes obj over the current feasible basis. Artificial columns never
  // enter (drop-on-leave semantics). Reduced costs are recomputed from the
  // tableau every iteration so pricing never acts on stale rows, and the
  // tableau itself is refactorized from clean data periodically and before
  // any optimality/unboundedness verdict. Pricing is most-negative-first
  // with lowest index on ties; persistent degeneracy engages Bland's rule
  // (lowest index entering, lowest basis index on ratio ties), which
  // guarantees termination.
  RunResult run(const std::vector<double>& obj, bool bland_from_start = false) {
    std::vector<char> basic(static_cast<std::size_t>(n_) + art_row_.size(), 0);
    bool bland = bland_from_start;
    int degenerate_streak = 0;
    bool fresh = false;
    for (;;) {
      if (pivots_since_refactor_ >= refactor_every_) {
        if (!refactor()) return RunResult::NumericFailure;
        fresh = true;
      }
      std::fill(basic.begin(), basic.end(), 0);
      for (int r = 0; r < m_; ++r) basic[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 1;
      int enter = -1;
      double most_negative = -kPivotTol;
      for (int j = 0; j < n_; ++j) {
        if (basic[static_cast<std::size_t>(j)]) continue;
        long double red = obj[static_cast<std::size_t>(j)];
        for (int r = 0; r < m_; ++r) {
          const double cb = obj[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
          if (cb != 0.0) red -= cb * at(r, j);
        }
        if (red < most_negative) {
          enter = j;
          if (bland) break;  // lowest index with negative reduced cost
          most_negative = red;
        }
      }
      if (enter < 0) {
        // Confirm optimality on a freshly refactorized tableau.
        if (fresh) return RunResult::Optimal;
        if (!refactor()) return RunResult::NumericFailure;
        fresh = true;
        continue;
      }

      // Ratio test. Pivots must clear both the absolute tolerance and a
      // relative one against the column's magnitude, so noise-level entries
      // of ill-conditioned columns are never pivoted on.
      long double colmax = 0.0L;
      for (int r = 0; r < m_; ++r) colmax = std::max(colmax, std::abs(at(r, enter)));
      const long double admissible = std::max<long double>(kPivotTol, 1e-9L * colmax);
      // Harris two-pass ratio test. Pass 1 relaxes each basic value by a
      // tiny slack, so the pass-2 winner can leave other basic variables
      // negative by at most that slack regardless of pivot magnitudes.
      constexpr long double kRatioSlack = 1e-11L;
      long double theta_bound = -1.0L;
      for (int r = 0; r < m_; ++r) {
        const long double a = at(r, enter);
        if (a > admissible) {
          const long double ratio = (std::max(rhs(r), 0.0L) + kRatioSlack) / a;
          if (theta_bound < 0.0L || ratio < theta_bound) theta_bound = ratio;
        }
      }
      if (theta_bound < 0.0L) {
        // Confirm unboundedness on a freshly refactorized tableau.
        if (fresh) return RunResult::Unbounded;
        if (!refactor()) return RunResult::NumericFailure;
        fresh = true;
        continue;
      }
      // Pass 2: among rows whose true ratio stays within the bound, pick the
      // largest pivot for stability, or the lowest basis index under Bland.
      int leave = -1;
      long double theta = 0.0L;
      for (int r = 0; r < m_; ++r) {
        const long double a = at(r, enter);
        if (a <= admissible) continue;
        if (std::max(rhs(r), 0.0L) / a > theta_bound) continue;
        if (leave < 0) {
          leave = r;
          continue;
        }
        if (bland) {
          if (basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)]) leave = r;
        } else if (a > at(leave, enter)) {
          leave = r;
        }
      }
      theta = std::max(rhs(leave), 0.0L) / at(leave, enter);
      pivot(leave, enter);
      fresh = false;
      degenerate_streak = theta <= 1e-12L ? degenerate_streak + 1 : 0;
      if (!bland && degenerate_streak > 2 * m_ + 8) bland = true;
      if (++iters_ > max_iters_)
        throw LpIterationLimitError("simplex iteration limit exceeded (numerical trouble?)");
    }
  }

  bool is_basic(int j) const {
    for (int r = 0; r < m_; ++r)
      if (basis_[static_cast<std::size_t>(r)] == j) return true;
    return false;
  }

  // Pivot artificial variables out of the basis where possible.
  void expel_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < n_) continue;
      int enter = -1;
      for (int j = 0; j < n_; ++j)
        if (std::abs(at(r, j)) > kPivotTol && !is_basic(j)) {
          enter = j;
          break;
        }
      if (enter >= 0) pivot(r, enter);
      // Otherwise the row is redundant; the artificial stays basic at zero
      // and its row no longer interacts with real columns.
    }
  }

  const std::vector<int>& basis() const { return basis_; }
  int rows() const { return m_; }

 private:
  void pivot(int leave, int enter) {
    const long double piv = at(leave, enter);
    const long double inv = 1.0L / piv;
    for (int j = 0; j < width_; ++j) t_[static_cast<std::size_t>(leave) * width_ + j] *= inv;
    at(leave, enter) = 1.0L;  // clamp roundoff
    for (int r = 0; r < m_; ++r) {
      if (r == leave) continue;
      const long double f = at(r, enter);
      if (f == 0.0L) continue;
      for (int j = 0; j < width_; ++j)
        t_[static_cast<std::size_t>(r) * width_ + j] -= f * t_[static_cast<std::size_t>(leave) * width_ + j];
      at(r, enter) = 0.0;
    }
    basis_[static_cast<std::size_t>(leave)] = enter;
    ++pivots_since_refactor_;
  }

  const StandardForm* s_;
  int m_, n_, width_;
  long max_iters_;
  long iters_ = 0;
  int pivots_since_refactor_ = 0;
  int refactor_every_ = 64;
  std::vector<long double> t_;
  std::vector<int> basis_;
  std::vector<int> art_row_;
};

// Re-solves the basis system from the clean standard-form data to undo
// tableau drift: B x_B = b by Gaussian elimination with partial pivoting.
template <typename Tableau>
std::vector<double> basis_solution(const StandardForm& s, const std::vector<int>& basis,
                                   const Tableau& tab) {
  const int m = static_cast<int>(s.e.size());
  std::vector<long double> mat(static_cast<std::size_t>(m) * (m + 1), 0.0L);
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k < m; ++k) {
      const int j = basis[static_cast<std::size_t>(k)];
      mat[static_cast<std::size_t>(r) * (m + 1) + k] =
          j < s.cols ? s.e[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]
                     : (tab.artificial_row(j - s.cols) == r ? 1.0 : 0.0);
    }
    mat[static_cast<std::size_t>(r) * (m + 1) + m] = s.b[static_cast<std::size_t>(r)];
  }
  for (int col = 0; col < m; ++col) {
    int p = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(mat[static_cast<std::size_t>(r) * (m + 1) + col]) > std::abs(mat[static_cast<std::size_t>(p) * (m + 1) + col])) p = r;
    if (std::abs(mat[static_cast<std::size_t>(p) * (m + 1) + col]) < 1e-16L) return {};  // singular; fall back
    if (p != col)
      for (int j = col; j <= m; ++j)
        std::swap(mat[static_cast<std::size_t>(p) * (m + 1) + j], mat[static_cast<std::size_t>(col) * (m + 1) + j]);
    const long double inv = 1.0L / mat[static_cast<std::size_t>(col) * (m + 1) + col];
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const long double f = mat[static_cast<std::size_t>(r) * (m + 1) + col] * inv;
      if (f == 0.0L) continue;
      for (int j = col; j <= m; ++j)
        mat[static_cast<std::size_t>(r) * (m + 1) + j] -= f * mat[static_cast<std::size_t>(col) * (m + 1) + j];
    }
  }
  std::vector<double> xb(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r)
    xb[static_cast<std::size_t>(r)] = static_cast<double>(mat[static_cast<std::size_t>(r) * (m + 1) + m] /
                                                          mat[static_cast<std::size_t>(r) * (m + 1) + r]);
  return xb;
}

}  // namespace

namespace {

// A solve attempt can fail numerically; nullopt asks the caller to retry.
// `walk` is the (possibly rhs-perturbed) form the simplex pivots on; the
// final point is always re-derived from the clean form `s`.
std::optional<LpSolution> solve_attempt(const LpProblem& problem, const StandardForm& s,
                                        const StandardForm& walk, bool strict_bland,
                                        int refactor_every) {
  const int m = static_cast<int>(s.e.size());
  const long max_iters = 50L * (m + s.cols + m);

  SimplexTableau tab(walk, max_iters);
  tab.set_refactor_every(refactor_every);
  const int na = tab.artificial_count();

  // Phase 1: minimize the sum of artificials (skipped when none are needed).
  if (na > 0) {
    std::vector<double> phase1_obj(static_cast<std::size_t>(s.cols + na), 0.0);
    for (int k = 0; k < na; ++k) phase1_obj[static_cast<std::size_t>(s.cols + k)] = 1.0;
    const RunResult r1 = tab.run(phase1_obj, strict_bland);
    if (r1 == RunResult::NumericFailure) return std::nullopt;
    if (r1 == RunResult::Unbounded)
      throw std::runtime_error("phase-1 LP reported unbounded (internal error)");

    double art_sum = 0.0;
    for (int r = 0; r < m; ++r)
      if (tab.basis()[static_cast<std::size_t>(r)] >= s.cols) art_sum += tab.rhs(r);
    if (art_sum > kFeasTol) return LpSolution{LpStatus::Infeasible, 0.0, {}};

    tab.expel_artificials();
  }

  // Phase 2: the original objective.
  std::vector<double> phase2_obj(static_cast<std::size_t>(s.cols + na), 0.0);
  for (int j = 0; j < s.cols; ++j) phase2_obj[static_cast<std::size_t>(j)] = s.c[static_cast<std::size_t>(j)];
  const RunResult r2 = tab.run(phase2_obj, strict_bland);
  if (r2 == RunResult::NumericFailure) return std::nullopt;
  if (r2 == RunResult::Unbounded) return LpSolution{LpStatus::Unbounded, 0.0, {}};

  // Clean basic solution straight from the original data.
  std::vector<double> u(static_cast<std::size_t>(s.cols), 0.0);
  std::vector<double> xb = basis_solution(s, tab.basis(), tab);
  for (int r = 0; r < m; ++r) {
    const int j = tab.basis()[static_cast<std::size_t>(r)];
    const double v = xb.empty() ? static_cast<double>(tab.rhs(r)) : xb[static_cast<std::size_t>(r)];
    if (j < s.cols) u[static_cast<std::size_t>(j)] = v;
  }

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.x.assign(static_cast<std::size_t>(problem.num_vars()), 0.0);
  for (int j = 0; j < problem.num_vars(); ++j) {
    double v = s.shift[static_cast<std::size_t>(j)] +
               s.sign[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(s.pos[static_cast<std::size_t>(j)])];
    if (s.neg[static_cast<std::size_t>(j)] >= 0) v -= u[static_cast<std::size_t>(s.neg[static_cast<std::size_t>(j)])];
    sol.x[static_cast<std::size_t>(j)] = v;
  }
  double obj = 0.0;
  for (int j = 0; j < problem.num_vars(); ++j)
    obj += problem.objective[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
  sol.objective = obj;
  return sol;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  problem.validate();
  const StandardForm s = to_standard_form(problem);

  // Escalating attempts: fast path, strict Bland, then rhs-perturbed walks
  // (classic anti-degeneracy perturbation; the returned point is always
  // re-solved against the clean data, so acceptance is by true violation).
  struct Attempt {
    bool bland;
    double perturb;
    std::uint64_t seed;
    int refactor_every;
  };
  const Attempt plan[] = {
      {false, 0.0, 0, 64}, {true, 0.0, 0, 16}, {false, 1e-9, 1, 8}, {false, 1e-7, 2, 8},
  };

  std::optional<LpSolution> best;
  double best_viol = kInf;
  for (const Attempt& att : plan) {
    std::optional<LpSolution> sol;
    if (att.perturb == 0.0) {
      sol = solve_attempt(problem, s, s, att.bland, att.refactor_every);
    } else {
      StandardForm walk = s;
      std::uint64_t state = att.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
      for (double& b : walk.b) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
        b += att.perturb * (1.0 + b) * (0.5 + 0.5 * u);
      }
      sol = solve_attempt(problem, s, walk, att.bland, att.refactor_every);
    }
    if (!sol) continue;
    if (sol->status != LpStatus::Optimal) {
      // Trust infeasible/unbounded verdicts only from unperturbed walks.
      if (att.perturb == 0.0) return *sol;
      continue;
    }
    const double viol = constraint_violation(problem, sol->x);
    if (viol <= kFeasTol) return *sol;
    if (viol < best_viol) {
      best = sol;
      best_viol = viol;
    }
  }
  if (best) return *best;
  throw LpIterationLimitError("simplex failed numerically on all pivoting strategies");
}

double constraint_violation(const LpProblem& problem, std::span<const double> x) {
  double worst = 0.0;
  for (int r = 0; r < problem.num_rows(); ++r) {
    double lhs = 0.0;
    for (int j = 0; j < problem.num_vars(); ++j)
      lhs += problem.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    const double b = problem.rhs[static_cast<std::size_t>(r)];
    switch (problem.relations[static_cast<std::size_t>(r)]) {
      case Relation::LessEqual: worst = std::max(worst, lhs - b); break;
      case Relation::GreaterEqual: worst = std::max(worst, b - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - b)); break;
    }
  }
  for (int j = 0; j < problem.num_vars(); ++j) {
    worst = std::max(worst, problem.lower[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]);
    worst = std::max(worst, x[static_cast<std::size_t>(j)] - problem.upper[static_cast<std::size_t>(j)]);
  }
  return worst;
}

LpProblem build_l1_fit_lp(const ChannelMatrix& a, std::span<const double> qhat) {
  const int d = a.dim();
  if (static_cast<int>(qhat.size()) != d) throw std::invalid_argument("qhat dimension mismatch");
  LpProblem p = LpProblem::with_variables(2 * d);
  for (int j = 0; j < d; ++j) p.objective[static_cast<std::size_t>(d + j)] = 1.0;

  std::vector<double> row(static_cast<std::size_t>(2 * d), 0.0);
  for (int i = 0; i < d; ++i) row[static_cast<std::size_t>(i)] = 1.0;
  p.add_row(row, Relation::Equal, 1.0);

  for (int j = 0; j < d; ++j) {
    // (p'A)_j - t_j <= qhat_j  and  (p'A)_j + t_j >= qhat_j.
    row.assign(row.size(), 0.0);
    for (int i = 0; i < d; ++i) row[static_cast<std::size_t>(i)] = a.at(i, j);
    row[static_cast<std::size_t>(d + j)] = -1.0;
    p.add_row(row, Relation::LessEqual, qhat[static_cast<std::size_t>(j)]);
    row[static_cast<std::size_t>(d + j)] = 1.0;
    p.add_row(row, Relation::GreaterEqual, qhat[static_cast<std::size_t>(j)]);
  }
  return p;
}

LpProblem build_eta_lp(const ChannelMatrix& a, double eps) { return build_eta_lp_scaled(a, eps, 1.0); }

LpProblem build_eta_lp_scaled(const ChannelMatrix& a, double eps, double row_scale) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (!(row_scale > 0.0) || !std::isfinite(row_scale))
    throw std::invalid_argument("row scale must be positive and finite");
  const int d = a.dim();
  LpProblem p = LpProblem::with_variables(3 * d);
  for (int j = 0; j < d; ++j) p.objective[static_cast<std::size_t>(2 * d + j)] = 1.0 / row_scale;

  std::vector<double> row(static_cast<std::size_t>(3 * d), 0.0);
  for (int i = 0; i < d; ++i) {
    row[static_cast<std::size_t>(i)] = 1.0;
    row[static_cast<std::size_t>(d + i)] = -1.0;
  }
  p.add_row(row, Relation::Equal, 0.0);  // sum c = 0

  row.assign(row.size(), 0.0);
  row[0] = 1.0;
  row[static_cast<std::size_t>(d)] = -1.0;
  p.add_row(row, Relation::Equal, 2.0 * eps);  // c_0 = 2 eps

  row.assign(row.size(), 0.0);
  for (int i = 0; i < 2 * d; ++i) row[static_cast<std::size_t>(i)] = 1.0;
  p.add_row(row, Relation::LessEqual, 2.0);  // sum |c| <= 2

  for (int j = 0; j < d; ++j) {
    // row_scale*(cA)_j - t_j <= 0  and  row_scale*(cA)_j + t_j >= 0, with
    // t_j = row_scale * |cA|_j at the optimum.
    row.assign(row.size(), 0.0);
    for (int i = 0; i < d; ++i) {
      row[static_cast<std::size_t>(i)] = row_scale * a.at(i, j);
      row[static_cast<std::size_t>(d + i)] = -row_scale * a.at(i, j);
    }
    row[static_cast<std::size_t>(2 * d + j)] = -1.0;
    p.add_row(row, Relation::LessEqual, 0.0);
    row[static_cast<std::size_t>(2 * d + j)] = 1.0;
    p.add_row(row, Relation::GreaterEqual, 0.0);
  }
  return p;
}

std::vector<double> l1_fit_probability(const LpSolution& sol, int n) {
  if (sol.status != LpStatus::Optimal) throw std::invalid_argument("LP not optimal");
  std::vector<double> p(sol.x.begin(), sol.x.begin() + n + 1);
  for (double& v : p) v = std::max(v, 0.0);
  return p;
}

std::vector<double> eta_certificate(const LpSolution& sol, int n) {
  if (sol.status != LpStatus::Optimal) throw std::invalid_argument("LP not optimal");
  std::vector<double> c(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i)
    c[static_cast<std::size_t>(i)] = sol.x[static_cast<std::size_t>(i)] - sol.x[static_cast<std::size_t>(n + 1 + i)];
  return c;
}

}  // namespace popre::lp
