#ifndef JSRLAB_ELLIPSOID_HPP
#define JSRLAB_ELLIPSOID_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "jsrlab/bound_report.hpp"
#include "jsrlab/error.hpp"
#include "jsrlab/matset.hpp"
#include "jsrlab/parallel.hpp"
#include "jsrlab/spectrum.hpp"

namespace jsrlab {

/// Norm ||x||_P = sqrt(x^T P x) with P = L L^T, L lower-triangular with positive diagonal.
class EllipsoidalNorm {
 public:
  explicit EllipsoidalNorm(Matrix lower) : l_(std::move(lower)) {
    if (!l_.square()) throw ShapeError("ellipsoidal factor must be square");
    for (std::size_t i = 0; i < l_.rows(); ++i) {
      if (!(l_(i, i) > 0.0)) throw DomainError("ellipsoidal factor needs a positive diagonal");
      for (std::size_t j = i + 1; j < l_.cols(); ++j)
        if (l_(i, j) != 0.0) throw DomainError("ellipsoidal factor must be lower-triangular");
    }
  }

  const Matrix& factor() const noexcept { return l_; }
  Matrix gram() const { return l_ * l_.transpose(); }

  double operator()(std::span<const double> x) const { return norm2(l_.transpose() * x); }

  /// Induced matrix norm: largest singular value of L^T A L^{-T}.
  double induced(const Matrix& a) const {
    const Matrix r = l_.transpose();
    return top_singular(r * a * upper_triangular_inverse(r)).sigma;
  }

 private:
  Matrix l_;
};

struct EllipsoidOptions {
  std::size_t restarts = 10;
  std::size_t iters = 3000;
  std::uint64_t seed = 0;
  double initial_step = 0.2;
  double final_step = 1e-7;
  /// Diagonal entries of the (normalized) factor are kept at least this large.
  double diagonal_floor = 1e-8;
  std::size_t workers = 1;
};

namespace detail {

struct EllipsoidRun {
  double value = std::numeric_limits<double>::infinity();
  Matrix upper;  // R = L^T, upper-triangular
  bool diverged = false;
  std::size_t floor_hits = 0;
};

inline double ellipsoid_objective(const MatrixSet& set, const Matrix& upper, std::size_t* active,
                                  SingularTriple* triple, Matrix* inv_out) {
  const Matrix inv = upper_triangular_inverse(upper);
  double best = -1.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    SingularTriple t = top_singular(upper * set[i] * inv);
    if (t.sigma > best) {
      best = t.sigma;
      if (active) *active = i;
      if (triple) *triple = std::move(t);
    }
  }
  if (inv_out) *inv_out = inv;
  return best;
}

// Normalize to unit Frobenius norm; the objective is invariant under positive scaling of R.
inline void normalize_factor(Matrix& upper) {
  const double f = norm_frobenius(upper);
  if (f > 0.0 && std::isfinite(f)) upper *= 1.0 / f;
}

inline EllipsoidRun ellipsoid_restart(const MatrixSet& set, const EllipsoidOptions& opts, std::size_t restart) {
  const std::size_t n = set.dim();
  Matrix r = Matrix::identity(n);
  if (restart > 0) {
    std::mt19937_64 rng(opts.seed * 1000003ULL + restart);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      r(i, i) = std::exp(gauss(rng));
      for (std::size_t j = i + 1; j < n; ++j) r(i, j) = gauss(rng);
    }
  }
  normalize_factor(r);

  EllipsoidRun run;
  run.upper = r;
  const double decay =
      std::pow(opts.final_step / opts.initial_step, 1.0 / std::max<double>(1.0, static_cast<double>(opts.iters)));
  double step = opts.initial_step;
  for (std::size_t it = 0; it < opts.iters; ++it, step *= decay) {
    std::size_t active = 0;
    SingularTriple top;
    Matrix inv;
    double f = 0.0;
    try {
      f = ellipsoid_objective(set, r, &active, &top, &inv);
    } catch (const NumericError&) {
      f = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(f)) {
      run.diverged = true;
      break;
    }
    if (f < run.value) {
      run.value = f;
      run.upper = r;
    }
    // B = R A R^{-1}; d sigma = u^T dR (A R^{-1} v) - (B^T u)^T dR (R^{-1} v).
    const Matrix& a = set[active];
    const Vector rinv_v = inv * top.right;
    const Vector a_rinv_v = a * rinv_v;
    const Matrix b = r * a * inv;
    const Vector bt_u = b.transpose() * top.left;
    Matrix g(n, n);
    double gnorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = top.left[i] * a_rinv_v[j] - bt_u[i] * rinv_v[j];
        g(i, j) = v;
        gnorm2 += v * v;
      }
    }
    if (gnorm2 == 0.0) break;
    const double scale = step / std::sqrt(gnorm2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) r(i, j) -= scale * g(i, j);
    normalize_factor(r);
    for (std::size_t i = 0; i < n; ++i) {
      if (r(i, i) < opts.diagonal_floor) {
        r(i, i) = opts.diagonal_floor;
        ++run.floor_hits;
      }
    }
  }
  return run;
}

}  // namespace detail

/// Best ellipsoidal norm found by multi-restart normalized subgradient descent on
/// max_i sigma_max(L^T A_i L^{-T}). Any positive definite P certifies, so the returned
/// value is a sound upper bound regardless of how well the optimizer did.
inline std::pair<BoundReport, EllipsoidalNorm> ellipsoidal_upper_bound(const MatrixSet& set,
                                                                       const EllipsoidOptions& opts) {
  if (opts.restarts < 1) throw DomainError("restarts must be >= 1");
  if (opts.iters < 1) throw DomainError("iters must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  std::vector<detail::EllipsoidRun> runs(opts.restarts);
  parallel_for(opts.restarts, opts.workers,
               [&](std::size_t i) { runs[i] = detail::ellipsoid_restart(set, opts, i); });

  std::size_t best = 0;
  std::size_t diverged = 0;
  std::size_t floor_hits = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    diverged += runs[i].diverged;
    floor_hits += runs[i].floor_hits;
    if (runs[i].value < runs[best].value) best = i;
  }

  Matrix upper = runs[best].upper;
  if (!std::isfinite(runs[best].value)) upper = Matrix::identity(set.dim());
  EllipsoidalNorm norm(upper.transpose());

  BoundReport r;
  r.kind = BoundKind::certified_upper;
  r.method = "ellipsoid";
  r.value = 0.0;
  for (const auto& a : set) r.value = std::max(r.value, norm.induced(a));
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.meta = {{"restarts", opts.restarts},
            {"iters", opts.iters},
            {"seed", opts.seed},
            {"best_restart", best},
            {"diverged_restarts", diverged},
            {"diagonal_floor_hits", floor_hits},
            {"all_diverged", diverged == runs.size()}};
  return {std::move(r), std::move(norm)};
}

inline std::pair<BoundReport, EllipsoidalNorm> ellipsoidal_upper_bound(const MatrixSet& set, std::size_t restarts,
                                                                       std::size_t iters, std::uint64_t seed) {
  EllipsoidOptions opts;
  opts.restarts = restarts;
  opts.iters = iters;
  opts.seed = seed;
  return ellipsoidal_upper_bound(set, opts);
}

}  // namespace jsrlab

#endif  // JSRLAB_ELLIPSOID_HPP
