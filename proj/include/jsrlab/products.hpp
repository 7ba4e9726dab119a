#ifndef JSRLAB_PRODUCTS_HPP
#define JSRLAB_PRODUCTS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "jsrlab/bound_report.hpp"
#include "jsrlab/error.hpp"
#include "jsrlab/matset.hpp"
#include "jsrlab/parallel.hpp"
#include "jsrlab/spectrum.hpp"

namespace jsrlab {

struct ProductSearchOptions {
  std::size_t max_length = 1;
  /// Refuse when M^max_length exceeds this.
  double cap = 1e7;
  /// Skip subtrees whose norm bound cannot beat the incumbent.
  bool prune = false;
  std::size_t workers = 1;
};

namespace detail {

struct ProductSearchState {
  double best = 0.0;
  std::vector<std::size_t> best_word;
  std::size_t evaluated = 0;
  std::size_t visited = 0;
  std::size_t pruned = 0;
};

// Depth-first walk over prenecklaces (FKM order). Every word is conjugate to a power of a
// Lyndon word and rho is invariant under both cyclic shifts and k-th roots of powers, so
// only Lyndon words (period == length) need an eigenvalue solve. Non-prenecklace prefixes
// have no Lyndon descendants and are never generated.
class ProductSearch {
 public:
  ProductSearch(const MatrixSet& set, const ProductSearchOptions& opts)
      : set_(set), opts_(opts) {
    for (const auto& a : set_) {
      mu_inf_ = std::max(mu_inf_, norm_inf(a));
      mu_one_ = std::max(mu_one_, norm_one(a));
    }
  }

  ProductSearchState run_subtree(std::size_t first) {
    ProductSearchState st;
    word_.assign(1, first);
    visit(set_[first], /*period=*/1, st);
    return st;
  }

 private:
  void visit(const Matrix& prefix, std::size_t period, ProductSearchState& st) {
    const std::size_t t = word_.size();
    ++st.visited;
    if (period == t) {
      const double bound = std::pow(std::min(norm_inf(prefix), norm_one(prefix)), 1.0 / static_cast<double>(t));
      if (bound > st.best) {
        ++st.evaluated;
        const double value = std::pow(spectral_radius(prefix), 1.0 / static_cast<double>(t));
        if (value > st.best) {
          st.best = value;
          st.best_word = word_;
        }
      }
    }
    if (t == opts_.max_length) return;
    if (opts_.prune && !subtree_can_improve(prefix, t, st.best)) {
      ++st.pruned;
      return;
    }
    const std::size_t lo = word_[t - period];
    for (std::size_t j = lo; j < set_.size(); ++j) {
      word_.push_back(j);
      visit(prefix * set_[j], j == lo ? period : t + 1, st);
      word_.pop_back();
    }
  }

  bool subtree_can_improve(const Matrix& prefix, std::size_t t, double best) const {
    const double pinf = norm_inf(prefix);
    const double pone = norm_one(prefix);
    for (std::size_t k = t + 1; k <= opts_.max_length; ++k) {
      const double ext = static_cast<double>(k - t);
      const double b = std::min(pinf * std::pow(mu_inf_, ext), pone * std::pow(mu_one_, ext));
      if (std::pow(b, 1.0 / static_cast<double>(k)) > best) return true;
    }
    return false;
  }

  const MatrixSet& set_;
  const ProductSearchOptions& opts_;
  double mu_inf_ = 0.0;
  double mu_one_ = 0.0;
  std::vector<std::size_t> word_;
};

}  // namespace detail

/// max over words of length <= max_length of rho(A_word)^(1/k); a lower bound on the JSR.
inline BoundReport lower_bound_products(const MatrixSet& set, const ProductSearchOptions& opts) {
  if (opts.max_length < 1) throw DomainError("max_length must be >= 1");
  const double total = std::pow(static_cast<double>(set.size()), static_cast<double>(opts.max_length));
  if (total > opts.cap)
    throw EnumerationTooLargeError("enumeration of " + std::to_string(set.size()) + "^" +
                                   std::to_string(opts.max_length) + " products exceeds cap; reduce max_length");

  const auto start = std::chrono::steady_clock::now();
  std::vector<detail::ProductSearchState> parts(set.size());
  parallel_for(set.size(), opts.workers, [&](std::size_t first) {
    detail::ProductSearch search(set, opts);
    parts[first] = search.run_subtree(first);
  });

  // Subtrees are in global DFS order, so keeping the earliest strict maximum matches a
  // sequential walk regardless of worker count.
  detail::ProductSearchState merged;
  for (const auto& p : parts) {
    if (p.best > merged.best || merged.best_word.empty()) {
      merged.best = p.best;
      merged.best_word = p.best_word;
    }
    merged.evaluated += p.evaluated;
    merged.visited += p.visited;
    merged.pruned += p.pruned;
  }
  if (merged.best_word.empty()) merged.best_word = {0};

  BoundReport r;
  r.kind = BoundKind::lower;
  r.method = "products";
  r.value = merged.best;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.meta = {{"max_length", opts.max_length},
            {"word", SwitchingWord{merged.best_word}.to_string()},
            {"word_length", merged.best_word.size()},
            {"eigen_solves", merged.evaluated},
            {"nodes", merged.visited},
            {"pruned_subtrees", merged.pruned},
            {"prune", opts.prune}};
  return r;
}

inline BoundReport lower_bound_products(const MatrixSet& set, std::size_t max_length) {
  ProductSearchOptions opts;
  opts.max_length = max_length;
  return lower_bound_products(set, opts);
}

}  // namespace jsrlab

#endif  // JSRLAB_PRODUCTS_HPP
