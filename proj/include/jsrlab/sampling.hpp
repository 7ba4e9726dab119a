#ifndef JSRLAB_SAMPLING_HPP
#define JSRLAB_SAMPLING_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "jsrlab/error.hpp"
#include "jsrlab/matrix.hpp"

namespace jsrlab {

/// Points on the Euclidean unit sphere S^{n-1}.
struct SampleSet {
  std::size_t n = 0;
  std::vector<Vector> points;

  std::size_t size() const noexcept { return points.size(); }
};

template <class Rng>
Vector draw_sphere_point(std::size_t n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x(n);
  for (;;) {
    for (double& v : x) v = gauss(rng);
    const double r = norm2(x);
    if (r > 1e-12) {
      for (double& v : x) v /= r;
      return x;
    }
  }
}

template <class Rng>
void extend_samples(SampleSet& s, std::size_t count, Rng& rng) {
  s.points.reserve(s.points.size() + count);
  for (std::size_t i = 0; i < count; ++i) s.points.push_back(draw_sphere_point(s.n, rng));
}

/// `count` i.i.d. uniform points on S^{n-1} (normalized Gaussians), deterministic per seed.
inline SampleSet sample_sphere(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 1 || count < 1) throw DomainError("sample_sphere needs n >= 1 and count >= 1");
  std::mt19937_64 rng(seed);
  SampleSet s{n, {}};
  extend_samples(s, count, rng);
  return s;
}

// {"n": n, "points": [[...], ...]}
inline nlohmann::json to_json(const SampleSet& s) { return {{"n", s.n}, {"points", s.points}}; }

inline SampleSet sample_set_from_json(const nlohmann::json& j) {
  try {
    SampleSet s;
    s.n = j.at("n").get<std::size_t>();
    s.points = j.at("points").get<std::vector<Vector>>();
    for (const auto& p : s.points)
      if (p.size() != s.n) throw ShapeError("sample point dimension does not match n");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed sample set JSON: ") + e.what());
  }
}

}  // namespace jsrlab

#endif  // JSRLAB_SAMPLING_HPP
