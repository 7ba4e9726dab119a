#ifndef JSRLAB_TRAINING_HPP
#define JSRLAB_TRAINING_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "jsrlab/error.hpp"
#include "jsrlab/matset.hpp"
#include "jsrlab/network.hpp"
#include "jsrlab/parallel.hpp"
#include "jsrlab/sampling.hpp"

namespace jsrlab {

struct TrainConfig {
  std::size_t hidden_layers = 1;
  std::size_t width = 10;
  std::size_t n_samples = 500;
  std::size_t n_seeds = 20;
  std::size_t epochs = 4000;
  /// Adam step size at epoch 0, decayed geometrically to step_size * final_step_ratio.
  double step_size = 0.02;
  double final_step_ratio = 0.01;
  double l1_coeff = 0.0;
  /// (epoch, points to add); only consulted when `incremental` is set.
  std::vector<std::pair<std::size_t, std::size_t>> incremental_schedule;
  bool incremental = false;
  double ratio_epsilon = 1e-6;
  std::optional<double> time_budget;  // seconds
  /// Log-sum-exp temperature on the log-ratios, annealed geometrically start -> end.
  double temperature_start = 0.05;
  double temperature_end = 2e-4;
  double hinge_weight = 1.0;

  void validate() const {
    if (hidden_layers < 1 || width < 1) throw DomainError("network needs >= 1 layer and width >= 1");
    if (n_samples < 1) throw DomainError("n_samples must be >= 1");
    if (epochs < 1) throw DomainError("epochs must be >= 1");
    if (!(ratio_epsilon > 0.0)) throw DomainError("ratio_epsilon must be > 0");
    if (!(step_size > 0.0) || !(final_step_ratio > 0.0)) throw DomainError("step sizes must be > 0");
    if (!(temperature_start > 0.0) || !(temperature_end > 0.0)) throw DomainError("temperatures must be > 0");
    if (l1_coeff < 0.0) throw DomainError("l1_coeff must be >= 0");
  }

  /// The configured schedule, or the default: start at 20% of n_samples and add 20%
  /// every epochs/5 epochs.
  std::vector<std::pair<std::size_t, std::size_t>> effective_schedule() const {
    if (!incremental) return {};
    if (!incremental_schedule.empty()) return incremental_schedule;
    std::vector<std::pair<std::size_t, std::size_t>> s;
    const std::size_t chunk = std::max<std::size_t>(1, n_samples / 5);
    const std::size_t every = std::max<std::size_t>(1, epochs / 5);
    std::size_t have = chunk;
    for (std::size_t e = every; e < epochs && have < n_samples; e += every) {
      const std::size_t add = std::min(chunk, n_samples - have);
      s.emplace_back(e, add);
      have += add;
    }
    return s;
  }

  std::size_t initial_sample_count() const {
    if (!incremental) return n_samples;
    if (!incremental_schedule.empty()) {
      std::size_t added = 0;
      for (const auto& [e, k] : incremental_schedule) added += k;
      return n_samples > added ? n_samples - added : 1;
    }
    return std::max<std::size_t>(1, n_samples / 5);
  }
};

struct LossValue {
  double value = 0.0;          // max_{i,x} V(A_i x) / max(V(x), eps)
  std::size_t degenerate = 0;  // samples with V(x) < eps
};

/// Sample-based max-ratio loss of V over the matrix set.
inline LossValue evaluate_loss(const NetworkParams& p, const SampleSet& samples, const MatrixSet& set, double eps) {
  if (samples.points.empty()) throw DomainError("loss needs a nonempty sample set");
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  LossValue out;
  for (const auto& x : samples.points) {
    const double vx = forward(p, x);
    if (vx < eps) ++out.degenerate;
    const double denom = std::max(vx, eps);
    for (const auto& a : set) out.value = std::max(out.value, forward(p, a * x) / denom);
  }
  return out;
}

inline double loss(const NetworkParams& p, const SampleSet& samples, const MatrixSet& set, double eps) {
  return evaluate_loss(p, samples, set, eps).value;
}

namespace detail {

struct ForwardCache {
  std::vector<Vector> act;  // act[0] = input, act[j+1] = relu(W_j act[j])
  double value = 0.0;
};

inline void forward_cached(const NetworkParams& p, const Vector& x, ForwardCache& c) {
  c.act.resize(p.hidden.size() + 1);
  c.act[0] = x;
  for (std::size_t j = 0; j < p.hidden.size(); ++j) {
    c.act[j + 1] = p.hidden[j] * c.act[j];
    for (double& v : c.act[j + 1]) v = std::max(v, 0.0);
  }
  c.value = dot(p.output, c.act.back());
}

inline NetworkParams zeros_like(const NetworkParams& p) {
  NetworkParams g;
  for (const auto& w : p.hidden) g.hidden.emplace_back(w.rows(), w.cols());
  g.output.assign(p.output.size(), 0.0);
  return g;
}

// g += coeff * dV/dtheta at the cached point.
inline void accumulate_gradient(const NetworkParams& p, const ForwardCache& c, double coeff, NetworkParams& g) {
  const std::size_t depth = p.hidden.size();
  for (std::size_t i = 0; i < g.output.size(); ++i) g.output[i] += coeff * c.act[depth][i];
  Vector delta = p.output;  // dV/d act[depth]
  for (std::size_t j = depth; j-- > 0;) {
    const Vector& out = c.act[j + 1];
    const Vector& in = c.act[j];
    for (std::size_t r = 0; r < delta.size(); ++r)
      if (out[r] <= 0.0) delta[r] = 0.0;
    Matrix& gw = g.hidden[j];
    for (std::size_t r = 0; r < gw.rows(); ++r) {
      const double dr = coeff * delta[r];
      if (dr == 0.0) continue;
      auto grow = gw.row(r);
      for (std::size_t s = 0; s < gw.cols(); ++s) grow[s] += dr * in[s];
    }
    if (j == 0) break;
    const Matrix& w = p.hidden[j];
    Vector next(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
      if (delta[r] == 0.0) continue;
      auto wrow = w.row(r);
      for (std::size_t s = 0; s < w.cols(); ++s) next[s] += delta[r] * wrow[s];
    }
    delta = std::move(next);
  }
}

}  // namespace detail

struct SurrogateSettings {
  double temperature = 0.01;
  double eps = 1e-6;
  double hinge_weight = 1.0;
  double l1_coeff = 0.0;
};

struct SurrogateValue {
  double value = 0.0;  // differentiable training objective
  LossValue exact;     // hard max-ratio loss at the same parameters
  NetworkParams gradient;
};

/// Smooth surrogate of the max-ratio loss: temperature-scaled log-sum-exp over the
/// log-ratios log V(A_i x) - log max(V(x), eps), plus a hinge pushing V(x) above eps
/// and an optional l1 penalty. Also returns the exact loss at the same point.
inline SurrogateValue surrogate(const NetworkParams& p, const SampleSet& samples, const MatrixSet& set,
                                const SurrogateSettings& cfg) {
  if (samples.points.empty()) throw DomainError("loss needs a nonempty sample set");
  constexpr double tiny = 1e-300;
  const std::size_t m = set.size();
  const std::size_t count = samples.size();

  std::vector<detail::ForwardCache> base(count);
  std::vector<detail::ForwardCache> image(count * m);
  std::vector<double> logratio(count * m);
  SurrogateValue out;
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < count; ++s) {
    detail::forward_cached(p, samples.points[s], base[s]);
    const double vx = base[s].value;
    if (vx < cfg.eps) ++out.exact.degenerate;
    const double denom = std::max(vx, cfg.eps);
    for (std::size_t i = 0; i < m; ++i) {
      auto& c = image[s * m + i];
      detail::forward_cached(p, set[i] * samples.points[s], c);
      out.exact.value = std::max(out.exact.value, c.value / denom);
      const double l = std::log(std::max(c.value, tiny)) - std::log(denom);
      logratio[s * m + i] = l;
      lmax = std::max(lmax, l);
    }
  }

  double z = 0.0;
  for (double l : logratio) z += std::exp((l - lmax) / cfg.temperature);
  out.value = lmax + cfg.temperature * std::log(z);

  out.gradient = detail::zeros_like(p);
  for (std::size_t s = 0; s < count; ++s) {
    const double vx = base[s].value;
    double base_coeff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = std::exp((logratio[s * m + i] - lmax) / cfg.temperature) / z;
      if (w < 1e-300) continue;
      const auto& c = image[s * m + i];
      if (c.value > tiny) detail::accumulate_gradient(p, c, w / c.value, out.gradient);
      if (vx >= cfg.eps) base_coeff -= w / vx;
    }
    if (vx < cfg.eps && cfg.hinge_weight > 0.0) {
      out.value += cfg.hinge_weight * (cfg.eps - vx) / static_cast<double>(count);
      base_coeff -= cfg.hinge_weight / static_cast<double>(count);
    }
    if (base_coeff != 0.0) detail::accumulate_gradient(p, base[s], base_coeff, out.gradient);
  }

  if (cfg.l1_coeff > 0.0) {
    auto add_l1 = [&](std::span<const double> w, std::span<double> g) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        out.value += cfg.l1_coeff * std::abs(w[i]);
        g[i] += cfg.l1_coeff * (w[i] > 0.0 ? 1.0 : (w[i] < 0.0 ? -1.0 : 0.0));
      }
    };
    for (std::size_t j = 0; j < p.hidden.size(); ++j) add_l1(p.hidden[j].data(), out.gradient.hidden[j].data());
    add_l1(p.output, out.gradient.output);
  }
  return out;
}

struct TracePoint {
  double time = 0.0;  // seconds since the start of training
  double loss = 0.0;  // exact max-ratio loss
  std::size_t samples = 0;
};

struct TrainResult {
  std::uint64_t seed = 0;
  /// Lowest exact loss seen on the final sample set; an empirical JSR estimate.
  double best_loss = std::numeric_limits<double>::infinity();
  NetworkParams best_params;
  SampleSet samples;
  std::vector<TracePoint> trace;
  std::size_t reinitializations = 0;
  bool budget_exhausted = false;
  std::size_t epochs_run = 0;
};

namespace detail {

class Adam {
 public:
  explicit Adam(const NetworkParams& shape) : m_(zeros_like(shape)), v_(zeros_like(shape)) {}

  void step(NetworkParams& p, const NetworkParams& g, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    auto update = [&](std::span<double> w, std::span<const double> gr, std::span<double> m, std::span<double> v) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * gr[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * gr[i] * gr[i];
        w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + 1e-12);
      }
    };
    for (std::size_t j = 0; j < p.hidden.size(); ++j)
      update(p.hidden[j].data(), g.hidden[j].data(), m_.hidden[j].data(), v_.hidden[j].data());
    update(p.output, g.output, m_.output, v_.output);
  }

 private:
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  NetworkParams m_, v_;
  std::size_t t_ = 0;
};

inline bool all_finite(const NetworkParams& p) {
  auto fin = [](std::span<const double> s) {
    return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
  };
  return fin(p.output) && std::all_of(p.hidden.begin(), p.hidden.end(), [&](const Matrix& w) { return fin(w.data()); });
}

inline double geometric(double from, double to, double frac) { return from * std::pow(to / from, frac); }

}  // namespace detail

/// Trains one network on one seed. Full-batch Adam on the surrogate; the exact loss is
/// evaluated at every epoch and the lowest value (with its parameters) is kept.
inline TrainResult train(const TrainConfig& config, const MatrixSet& set, std::uint64_t seed) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  std::mt19937_64 sample_rng(seed);
  std::mt19937_64 param_rng(seed ^ 0x9E3779B97F4A7C15ULL);

  TrainResult res;
  res.seed = seed;
  res.samples.n = set.dim();
  extend_samples(res.samples, config.initial_sample_count(), sample_rng);
  const auto schedule = config.effective_schedule();
  std::size_t next_growth = 0;

  NetworkParams params = init_network(set.dim(), config.hidden_layers, config.width, param_rng);
  detail::Adam adam(params);
  res.best_params = params;

  SurrogateSettings sur;
  sur.eps = config.ratio_epsilon;
  sur.hinge_weight = config.hinge_weight;
  sur.l1_coeff = config.l1_coeff;

  auto record = [&](double loss_value, const NetworkParams& at) {
    res.trace.push_back({elapsed(), loss_value, res.samples.size()});
    if (loss_value < res.best_loss) {
      res.best_loss = loss_value;
      res.best_params = at;
    }
  };

  const double span = config.epochs > 1 ? static_cast<double>(config.epochs - 1) : 1.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.time_budget && elapsed() > *config.time_budget) {
      res.budget_exhausted = true;
      break;
    }
    bool grew = false;
    while (next_growth < schedule.size() && schedule[next_growth].first <= epoch) {
      extend_samples(res.samples, schedule[next_growth].second, sample_rng);
      ++next_growth;
      grew = true;
    }
    if (grew && std::isfinite(res.best_loss)) {
      // Old minimum was measured on fewer points; re-score the incumbent on the new set.
      res.best_loss = std::numeric_limits<double>::infinity();
      const NetworkParams incumbent = res.best_params;
      record(loss(incumbent, res.samples, set, config.ratio_epsilon), incumbent);
    }

    const double frac = static_cast<double>(epoch) / span;
    sur.temperature = detail::geometric(config.temperature_start, config.temperature_end, frac);
    SurrogateValue sv = surrogate(params, res.samples, set, sur);
    if (!std::isfinite(sv.value) || !std::isfinite(sv.exact.value) || !detail::all_finite(sv.gradient)) {
      ++res.reinitializations;
      params = init_network(set.dim(), config.hidden_layers, config.width, param_rng);
      adam = detail::Adam(params);
      continue;
    }
    record(sv.exact.value, params);
    adam.step(params, sv.gradient, detail::geometric(config.step_size, config.step_size * config.final_step_ratio, frac));
    params = project_output_nonneg(std::move(params));
    res.epochs_run = epoch + 1;
  }
  if (!res.budget_exhausted && detail::all_finite(params)) {
    const double final_loss = loss(params, res.samples, set, config.ratio_epsilon);
    if (std::isfinite(final_loss)) record(final_loss, params);
  }
  return res;
}

/// Trains config.n_seeds networks with seeds seed_base, seed_base+1, ...; results in seed order.
inline std::vector<TrainResult> train_seeds(const TrainConfig& config, const MatrixSet& set, std::uint64_t seed_base,
                                            std::size_t workers = 1) {
  std::vector<TrainResult> out(config.n_seeds);
  parallel_for(config.n_seeds, workers, [&](std::size_t i) { out[i] = train(config, set, seed_base + i); });
  return out;
}

struct SeedSummary {
  double best = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1)
};

inline SeedSummary summarize(const std::vector<TrainResult>& results) {
  SeedSummary s;
  if (results.empty()) return s;
  s.best = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    s.best = std::min(s.best, r.best_loss);
    s.mean += r.best_loss;
  }
  s.mean /= static_cast<double>(results.size());
  if (results.size() > 1) {
    double ss = 0.0;
    for (const auto& r : results) ss += (r.best_loss - s.mean) * (r.best_loss - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(results.size() - 1));
  }
  return s;
}

}  // namespace jsrlab

#endif  // JSRLAB_TRAINING_HPP
