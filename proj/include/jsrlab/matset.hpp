#ifndef JSRLAB_MATSET_HPP
#define JSRLAB_MATSET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jsrlab/error.hpp"
#include "jsrlab/matrix.hpp"
#include "jsrlab/spectrum.hpp"

namespace jsrlab {

/// A finite, nonempty family of square matrices sharing one dimension.
class MatrixSet {
 public:
  explicit MatrixSet(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
    if (matrices_.empty()) throw ConfigError("matrix set must be nonempty");
    n_ = matrices_.front().rows();
    if (n_ == 0) throw ShapeError("matrices must have positive dimension");
    for (const auto& m : matrices_) {
      if (!m.square() || m.rows() != n_) throw ShapeError("all matrices must be square with the same dimension");
      if (!m.all_finite()) throw NumericError("matrix entries must be finite");
    }
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return matrices_.size(); }
  const Matrix& operator[](std::size_t i) const { return matrices_[i]; }
  const std::vector<Matrix>& matrices() const noexcept { return matrices_; }

  auto begin() const noexcept { return matrices_.begin(); }
  auto end() const noexcept { return matrices_.end(); }

  MatrixSet scaled(double c) const {
    std::vector<Matrix> out;
    out.reserve(matrices_.size());
    for (const auto& m : matrices_) out.push_back(c * m);
    return MatrixSet(std::move(out));
  }

 private:
  std::vector<Matrix> matrices_;
  std::size_t n_ = 0;
};

/// Zero-based indices into a MatrixSet. The product reads left to right.
struct SwitchingWord {
  std::vector<std::size_t> indices;

  std::size_t length() const noexcept { return indices.size(); }

  /// Comma-separated, one-based (matches the usual A_1..A_M labelling).
  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(indices[i] + 1);
    }
    return s;
  }
};

/// A_{w[0]} * A_{w[1]} * ... * A_{w[k-1]}.
inline Matrix product_of_word(const MatrixSet& set, const SwitchingWord& word) {
  if (word.indices.empty()) throw InvalidWordError("switching word must be nonempty");
  for (std::size_t idx : word.indices)
    if (idx >= set.size())
      throw InvalidWordError("word index " + std::to_string(idx + 1) + " out of range 1.." +
                             std::to_string(set.size()));
  Matrix p = set[word.indices.front()];
  for (std::size_t i = 1; i < word.indices.size(); ++i) p = p * set[word.indices[i]];
  return p;
}

/// The two-mode 2x2 benchmark with literal four-decimal entries.
inline MatrixSet benchmark_sigma2() {
  return MatrixSet({
      Matrix{{1.5519, 0.4474}, {7.6412, 7.4716}},
      Matrix{{0.4750, 9.1755}, {1.8955, 0.1850}},
  });
}

/// n-dimensional, n-mode family: A_1 = 1 e_1^T (ones in the first column) and,
/// for i >= 2, A_i has column i equal to 1 except a -1 on the diagonal.
inline MatrixSet benchmark_column_family(std::size_t n) {
  if (n < 2) throw DomainError("column family needs n >= 2");
  std::vector<Matrix> mats;
  mats.reserve(n);
  Matrix first(n, n);
  for (std::size_t k = 0; k < n; ++k) first(k, 0) = 1.0;
  mats.push_back(std::move(first));
  for (std::size_t i = 1; i < n; ++i) {
    Matrix a(n, n);
    for (std::size_t k = 0; k < n; ++k) a(k, i) = (k == i) ? -1.0 : 1.0;
    mats.push_back(std::move(a));
  }
  return MatrixSet(std::move(mats));
}

inline MatrixSet benchmark_sigma8() { return benchmark_column_family(8); }

// {"n": int, "matrices": [[[row-major reals]]]}
inline nlohmann::json to_json(const MatrixSet& set) {
  nlohmann::json mats = nlohmann::json::array();
  for (const auto& m : set) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    mats.push_back(std::move(rows));
  }
  return {{"n", set.dim()}, {"matrices", std::move(mats)}};
}

inline MatrixSet matrix_set_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    std::vector<Matrix> mats;
    for (const auto& jm : j.at("matrices")) {
      auto rows = jm.get<std::vector<Vector>>();
      if (rows.size() != n) throw ShapeError("matrix row count does not match n");
      mats.push_back(Matrix::from_rows(rows));
      if (mats.back().cols() != n) throw ShapeError("matrix column count does not match n");
    }
    return MatrixSet(std::move(mats));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed matrix set JSON: ") + e.what());
  }
}

}  // namespace jsrlab

#endif  // JSRLAB_MATSET_HPP
