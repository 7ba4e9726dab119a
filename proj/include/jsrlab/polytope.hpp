#ifndef JSRLAB_POLYTOPE_HPP
#define JSRLAB_POLYTOPE_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "jsrlab/bound_report.hpp"
#include "jsrlab/error.hpp"
#include "jsrlab/matset.hpp"
#include "jsrlab/network.hpp"
#include "jsrlab/sampling.hpp"
#include "jsrlab/simplex.hpp"
#include "jsrlab/training.hpp"

namespace jsrlab {

/// Symmetric polytope given by a vertex list (closed under negation). Non-extreme points
/// may be present; they do not change the gauge.
class PolytopeNorm {
 public:
  PolytopeNorm(std::size_t n, std::vector<Vector> vertices) : n_(n), vertices_(std::move(vertices)) {
    if (n_ < 1) throw ShapeError("polytope dimension must be >= 1");
    for (const auto& v : vertices_) {
      if (v.size() != n_) throw ShapeError("vertex dimension does not match n");
      if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
        throw NumericError("vertex has non-finite coordinates");
    }
    if (!is_symmetric()) throw DomainError("polytope vertex list must be closed under negation");
  }

  /// Convex hull of points and their negations.
  static PolytopeNorm symmetric_hull(std::size_t n, const std::vector<Vector>& points) {
    std::vector<Vector> v;
    v.reserve(2 * points.size());
    for (const auto& p : points) {
      v.push_back(p);
      Vector neg(p);
      for (double& x : neg) x = -x;
      v.push_back(std::move(neg));
    }
    return PolytopeNorm(n, std::move(v));
  }

  std::size_t dim() const noexcept { return n_; }
  const std::vector<Vector>& vertices() const noexcept { return vertices_; }

 private:
  bool is_symmetric() const {
    std::vector<Vector> sorted = vertices_;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& v : vertices_) {
      Vector neg(v);
      for (double& x : neg) x = -x;
      if (!std::binary_search(sorted.begin(), sorted.end(), neg)) return false;
    }
    return true;
  }

  std::size_t n_;
  std::vector<Vector> vertices_;
};

/// min sum(theta) s.t. sum_j theta_j v_j = x, theta >= 0.
struct GaugeLPProblem {
  const std::vector<Vector>* vertices = nullptr;
  Vector target;

  StandardFormLP to_standard_form() const {
    const std::size_t n = target.size();
    StandardFormLP lp;
    lp.a = Matrix(n, vertices->size());
    for (std::size_t j = 0; j < vertices->size(); ++j)
      for (std::size_t r = 0; r < n; ++r) lp.a(r, j) = (*vertices)[j][r];
    lp.b = target;
    lp.c.assign(vertices->size(), 1.0);
    return lp;
  }
};

struct GaugeValue {
  double lambda = 0.0;
  Vector theta;
};

inline GaugeValue solve_gauge(const PolytopeNorm& p, std::span<const double> x) {
  if (x.size() != p.dim()) throw ShapeError("gauge target dimension mismatch");
  GaugeValue out;
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) {
    out.theta.assign(p.vertices().size(), 0.0);
    return out;
  }
  GaugeLPProblem prob{&p.vertices(), Vector(x.begin(), x.end())};
  try {
    LPSolution sol = solve_lp(prob.to_standard_form());
    out.lambda = sol.objective;
    out.theta = std::move(sol.x);
  } catch (const InfeasibleError&) {
    throw UnboundedError("direction is outside the span of the polytope; gauge is unbounded");
  }
  return out;
}

/// Minkowski functional min{lambda >= 0 : x in lambda conv(V)}.
inline double gauge(const PolytopeNorm& p, std::span<const double> x) { return solve_gauge(p, x).lambda; }
inline double gauge(const PolytopeNorm& p, const Vector& x) { return gauge(p, std::span<const double>(x)); }

/// True when every +-e_j has a finite gauge, i.e. the origin is interior.
inline bool interior_check(const PolytopeNorm& p) {
  const std::size_t n = p.dim();
  if (p.vertices().empty()) return false;
  for (std::size_t j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      Vector e(n, 0.0);
      e[j] = sign;
      try {
        const double g = gauge(p, e);
        if (!(g > 0.0) || !std::isfinite(g)) return false;
      } catch (const NumericError&) {
        return false;
      }
    }
  }
  return true;
}

struct PolytopeBuildStats {
  std::size_t used = 0;
  std::size_t dropped = 0;  // samples with V(x) < eps
};

/// Unit ball conv{ +-x_i / V(x_i) } over the samples, so the gauge agrees with V on every
/// retained sample direction.
inline PolytopeNorm build_polytope_norm(const NetworkParams& params, const SampleSet& samples,
                                        PolytopeBuildStats* stats = nullptr, double eps = 1e-6) {
  std::vector<Vector> pts;
  pts.reserve(samples.size());
  PolytopeBuildStats st;
  for (const auto& x : samples.points) {
    const double v = forward(params, x);
    if (!(v >= eps) || !std::isfinite(v)) {
      ++st.dropped;
      continue;
    }
    Vector y(x);
    for (double& c : y) c /= v;
    pts.push_back(std::move(y));
  }
  st.used = pts.size();
  if (stats) *stats = st;
  if (pts.empty()) throw NumericError("cannot build polytope norm: every sample is degenerate");
  return PolytopeNorm::symmetric_hull(samples.n, pts);
}

inline PolytopeNorm build_polytope_norm(const TrainResult& result, const SampleSet& samples,
                                        PolytopeBuildStats* stats = nullptr, double eps = 1e-6) {
  return build_polytope_norm(result.best_params, samples, stats, eps);
}

/// max_i ||A_i||_N for the polytope norm N; the induced norm of a linear map is attained at
/// a vertex of the unit ball, so this is max over i and vertices v of gauge(A_i v).
inline BoundReport certified_bound(const PolytopeNorm& p, const MatrixSet& set) {
  if (p.dim() != set.dim()) throw ShapeError("polytope and matrix set dimensions differ");
  const auto start = std::chrono::steady_clock::now();
  if (!interior_check(p)) throw DomainError("origin is not interior to the polytope");

  // Vertices come in +-pairs; gauge(A(-v)) = gauge(A v) so each pair is solved once.
  const auto& verts = p.vertices();
  std::vector<bool> skip(verts.size(), false);
  {
    std::vector<std::size_t> order(verts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return verts[a] < verts[b]; });
    for (std::size_t j = 0; j < verts.size(); ++j) {
      if (skip[j]) continue;
      Vector neg(verts[j]);
      for (double& x : neg) x = -x;
      auto it = std::lower_bound(order.begin(), order.end(), neg,
                                 [&](std::size_t idx, const Vector& v) { return verts[idx] < v; });
      for (; it != order.end() && verts[*it] == neg; ++it)
        if (*it != j) skip[*it] = true;
    }
  }

  double best = 0.0;
  std::size_t best_i = 0, best_v = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = 0; j < verts.size(); ++j) {
      if (skip[j]) continue;
      const double g = gauge(p, set[i] * verts[j]);
      if (g > best) {
        best = g;
        best_i = i;
        best_v = j;
      }
    }
  }

  BoundReport r;
  r.kind = BoundKind::certified_upper;
  r.method = "polytope";
  r.value = best;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.meta = {{"vertices", verts.size()}, {"matrix", best_i + 1}, {"vertex", best_v}, {"vertex_coords", verts[best_v]}};
  return r;
}

// {"n": int, "vertices": [[...]]}
inline nlohmann::json to_json(const PolytopeNorm& p) { return {{"n", p.dim()}, {"vertices", p.vertices()}}; }

inline PolytopeNorm polytope_from_json(const nlohmann::json& j) {
  try {
    return PolytopeNorm(j.at("n").get<std::size_t>(), j.at("vertices").get<std::vector<Vector>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed polytope JSON: ") + e.what());
  }
}

}  // namespace jsrlab

#endif  // JSRLAB_POLYTOPE_HPP
