#ifndef JSRLAB_SIMPLEX_HPP
#define JSRLAB_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "jsrlab/error.hpp"
#include "jsrlab/matrix.hpp"

namespace jsrlab {

/// min c^T x  s.t.  A x = b, x >= 0.
struct StandardFormLP {
  Matrix a;
  Vector b;
  Vector c;
};

struct LPSolution {
  double objective = 0.0;
  Vector x;
  std::vector<std::size_t> basis;  // column indices of basic variables
  std::size_t pivots = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  /// Consecutive degenerate pivots before switching to least-index (Bland) pricing for good.
  std::size_t degenerate_streak = 20;
  bool always_bland = false;
};

namespace detail {

// Dense two-phase tableau. Columns [0, nvar) are structural, [nvar, nvar+m) artificial,
// the last column is the right-hand side. Row m is the reduced-cost row.
class SimplexTableau {
 public:
  SimplexTableau(const StandardFormLP& lp, const SimplexOptions& opts)
      : m_(lp.a.rows()), nvar_(lp.a.cols()), opts_(opts), t_(m_ + 1, nvar_ + m_ + 1), basis_(m_), live_(m_, true) {
    for (std::size_t r = 0; r < m_; ++r) {
      const double sign = lp.b[r] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < nvar_; ++j) t_(r, j) = sign * lp.a(r, j);
      t_(r, nvar_ + r) = 1.0;
      t_(r, rhs()) = sign * lp.b[r];
      basis_[r] = nvar_ + r;
    }
  }

  std::size_t rhs() const { return nvar_ + m_; }

  // Phase 1: minimize the sum of artificials. Returns false when the LP is infeasible.
  bool phase_one(double scale) {
    for (std::size_t j = 0; j <= rhs(); ++j) t_(m_, j) = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t j = 0; j < nvar_; ++j) t_(m_, j) -= t_(r, j);
      t_(m_, rhs()) -= t_(r, rhs());
    }
    if (!iterate(nvar_ + m_)) throw NumericError("phase one reported unbounded");
    if (-t_(m_, rhs()) > opts_.feasibility_tol * scale) return false;
    drive_out_artificials();
    return true;
  }

  // Phase 2 with the true costs. Returns false when unbounded.
  bool phase_two(const Vector& c) {
    for (std::size_t j = 0; j <= rhs(); ++j) t_(m_, j) = 0.0;
    for (std::size_t j = 0; j < nvar_; ++j) t_(m_, j) = c[j];
    for (std::size_t r = 0; r < m_; ++r) {
      if (!live_[r] || basis_[r] >= nvar_) continue;
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= rhs(); ++j) t_(m_, j) -= cb * t_(r, j);
    }
    return iterate(nvar_);
  }

  bool reduced_costs_nonnegative() const {
    for (std::size_t j = 0; j < nvar_; ++j)
      if (t_(m_, j) < -opts_.optimality_tol) return false;
    return true;
  }

  const std::vector<std::size_t>& basis() const { return basis_; }
  const std::vector<bool>& live() const { return live_; }
  double value(std::size_t r) const { return t_(r, rhs()); }
  std::size_t rows() const { return m_; }
  std::size_t pivots() const { return pivots_; }

 private:
  // Price columns [0, limit). Returns false on an unbounded direction.
  bool iterate(std::size_t limit) {
    const std::size_t max_pivots = 50 * (m_ + nvar_) + 1000;
    bool bland = opts_.always_bland;
    std::size_t streak = 0;
    for (;;) {
      std::size_t enter = limit;
      double most = -opts_.optimality_tol;
      for (std::size_t j = 0; j < limit; ++j) {
        const double rc = t_(m_, j);
        if (rc < most) {
          enter = j;
          if (bland) break;
          most = rc;
        }
      }
      if (enter == limit) return true;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        if (!live_[r]) continue;
        const double coef = t_(r, enter);
        if (coef <= opts_.pivot_tol) continue;
        const double ratio = std::max(t_(r, rhs()), 0.0) / coef;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && leave < m_ && basis_[r] < basis_[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave == m_) return false;

      if (best_ratio <= 1e-14) {
        if (++streak >= opts_.degenerate_streak) bland = true;
      } else {
        streak = 0;
      }
      pivot(leave, enter);
      if (pivots_ > max_pivots) throw NumericError("simplex exceeded its pivot limit");
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    ++pivots_;
    const double p = t_(row, col);
    auto prow = t_.row(row);
    for (double& v : prow) v /= p;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (f == 0.0) continue;
      auto rr = t_.row(r);
      for (std::size_t j = 0; j < rr.size(); ++j) rr[j] -= f * prow[j];
      rr[col] = 0.0;
    }
    basis_[row] = col;
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < nvar_) continue;
      std::size_t col = nvar_;
      double best = opts_.pivot_tol;
      for (std::size_t j = 0; j < nvar_; ++j) {
        if (std::abs(t_(r, j)) > best) {
          best = std::abs(t_(r, j));
          col = j;
        }
      }
      if (col == nvar_) {
        live_[r] = false;  // redundant equality
      } else {
        pivot(r, col);
      }
    }
  }

  std::size_t m_, nvar_;
  SimplexOptions opts_;
  Matrix t_;
  std::vector<std::size_t> basis_;
  std::vector<bool> live_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Dense two-phase primal simplex. Dantzig pricing, falling back to least-index (Bland)
/// pricing after a run of degenerate pivots so it cannot cycle. The optimal basic solution
/// is re-solved from the original columns for accuracy.
inline LPSolution solve_lp(const StandardFormLP& lp, const SimplexOptions& opts = {}) {
  const std::size_t m = lp.a.rows();
  const std::size_t nvar = lp.a.cols();
  if (lp.b.size() != m || lp.c.size() != nvar) throw ShapeError("LP dimensions do not agree");
  if (!lp.a.all_finite()) throw NumericError("LP matrix has non-finite entries");

  double scale = 1.0;
  for (double v : lp.b) scale = std::max(scale, std::abs(v));

  detail::SimplexTableau tab(lp, opts);
  if (!tab.phase_one(scale)) throw InfeasibleError("LP is infeasible");
  if (!tab.phase_two(lp.c)) throw UnboundedError("LP is unbounded");
  if (!tab.reduced_costs_nonnegative()) throw NumericError("simplex terminated with a negative reduced cost");

  LPSolution sol;
  sol.x.assign(nvar, 0.0);
  sol.pivots = tab.pivots();
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < m; ++r) {
    if (!tab.live()[r]) continue;
    rows.push_back(r);
    sol.basis.push_back(tab.basis()[r]);
  }
  bool refined = false;
  if (!rows.empty()) {
    Matrix bmat(rows.size(), rows.size());
    Vector rhs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rhs[i] = lp.b[rows[i]];
      for (std::size_t k = 0; k < rows.size(); ++k) bmat(i, k) = lp.a(rows[i], sol.basis[k]);
    }
    try {
      const Vector xb = solve_dense(bmat, rhs);
      refined = std::all_of(xb.begin(), xb.end(), [&](double v) { return v >= -opts.feasibility_tol * scale; });
      if (refined)
        for (std::size_t k = 0; k < xb.size(); ++k) sol.x[sol.basis[k]] = std::max(xb[k], 0.0);
    } catch (const NumericError&) {
      refined = false;
    }
  }
  if (!refined) {
    std::fill(sol.x.begin(), sol.x.end(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) sol.x[sol.basis[i]] = std::max(tab.value(rows[i]), 0.0);
  }
  sol.objective = dot(lp.c, sol.x);
  return sol;
}

}  // namespace jsrlab

#endif  // JSRLAB_SIMPLEX_HPP
