#ifndef JSRLAB_NETWORK_HPP
#define JSRLAB_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "jsrlab/error.hpp"
#include "jsrlab/matrix.hpp"

namespace jsrlab {

/// Bias-free fully-connected ReLU network V(x) = w^T relu(W_k ... relu(W_1 x)).
/// hidden[j] maps layer j to layer j+1 (rows = outputs). Output weights are nonnegative,
/// so V >= 0 and V(c x) = c V(x) for c > 0.
struct NetworkParams {
  std::vector<Matrix> hidden;
  Vector output;

  std::size_t input_dim() const { return hidden.empty() ? 0 : hidden.front().cols(); }
  std::size_t depth() const { return hidden.size(); }

  std::size_t parameter_count() const {
    std::size_t c = output.size();
    for (const auto& w : hidden) c += w.rows() * w.cols();
    return c;
  }

  void validate() const {
    if (hidden.empty()) throw ShapeError("network needs at least one hidden layer");
    for (std::size_t j = 1; j < hidden.size(); ++j)
      if (hidden[j].cols() != hidden[j - 1].rows()) throw ShapeError("hidden layer dimensions do not chain");
    if (output.size() != hidden.back().rows()) throw ShapeError("output layer width mismatch");
  }

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

/// He-style init: hidden ~ N(0, 1/fan_in), output = |N(0, 1/fan_in)|.
template <class Rng>
NetworkParams init_network(std::size_t input_dim, std::size_t layers, std::size_t width, Rng& rng) {
  if (input_dim < 1 || layers < 1 || width < 1) throw DomainError("network sizes must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  NetworkParams p;
  std::size_t fan_in = input_dim;
  for (std::size_t j = 0; j < layers; ++j) {
    Matrix w(width, fan_in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : w.data()) v = scale * gauss(rng);
    p.hidden.push_back(std::move(w));
    fan_in = width;
  }
  p.output.resize(width);
  const double scale = 1.0 / std::sqrt(static_cast<double>(width));
  for (double& v : p.output) v = std::abs(scale * gauss(rng));
  return p;
}

inline double forward(const NetworkParams& p, std::span<const double> x) {
  if (x.size() != p.input_dim()) throw ShapeError("input dimension does not match the first layer");
  Vector h(x.begin(), x.end());
  for (const auto& w : p.hidden) {
    h = w * h;
    for (double& v : h) v = std::max(v, 0.0);
  }
  return dot(p.output, h);
}

inline double forward(const NetworkParams& p, const Vector& x) { return forward(p, std::span<const double>(x)); }

/// Clamp every output weight at zero; hidden layers untouched.
inline NetworkParams project_output_nonneg(NetworkParams p) {
  for (double& v : p.output) v = std::max(v, 0.0);
  return p;
}

// {"input_dim": n, "hidden": [{"rows": r, "cols": c, "weights": [row-major]}], "output": [...]}
inline nlohmann::json to_json(const NetworkParams& p) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& w : p.hidden)
    layers.push_back({{"rows", w.rows()},
                      {"cols", w.cols()},
                      {"weights", std::vector<double>(w.data().begin(), w.data().end())}});
  return {{"input_dim", p.input_dim()}, {"hidden", std::move(layers)}, {"output", p.output}};
}

inline NetworkParams network_from_json(const nlohmann::json& j) {
  try {
    NetworkParams p;
    for (const auto& jl : j.at("hidden")) {
      const auto rows = jl.at("rows").get<std::size_t>();
      const auto cols = jl.at("cols").get<std::size_t>();
      const auto w = jl.at("weights").get<Vector>();
      if (w.size() != rows * cols) throw ShapeError("weight array size does not match rows*cols");
      Matrix m(rows, cols);
      std::copy(w.begin(), w.end(), m.data().begin());
      p.hidden.push_back(std::move(m));
    }
    p.output = j.at("output").get<Vector>();
    p.validate();
    if (j.contains("input_dim") && j.at("input_dim").get<std::size_t>() != p.input_dim())
      throw ShapeError("input_dim does not match the first layer");
    if (std::any_of(p.output.begin(), p.output.end(), [](double v) { return v < 0.0; }))
      throw DomainError("output weights must be nonnegative");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed network JSON: ") + e.what());
  }
}

}  // namespace jsrlab

#endif  // JSRLAB_NETWORK_HPP
