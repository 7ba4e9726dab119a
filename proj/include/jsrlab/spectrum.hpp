#ifndef JSRLAB_SPECTRUM_HPP
#define JSRLAB_SPECTRUM_HPP

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "jsrlab/error.hpp"
#include "jsrlab/matrix.hpp"

namespace jsrlab {

namespace detail {

// Diagonal similarity scaling by powers of two; eigenvalues unchanged, roundoff reduced.
inline void balance(Matrix& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity transforms.
inline void to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t piv = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        piv = j;
      }
    }
    if (piv != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
    }
    if (x == 0.0) continue;
    for (std::size_t i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = 0.0;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
}

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (destroys `a`).
inline std::vector<std::complex<double>> hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> eig(static_cast<std::size_t>(n));
  auto A = [&a](int r, int c) -> double& {
    return a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) + s == s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      double x = A(nn, nn);
      if (l == nn) {
        eig[static_cast<std::size_t>(nn)] = {x + t, 0.0};
        --nn;
      } else {
        double y = A(nn - 1, nn - 1);
        double w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            const double hi = x + z;
            const double lo = (z != 0.0) ? x - w / z : hi;
            eig[static_cast<std::size_t>(nn - 1)] = {hi, 0.0};
            eig[static_cast<std::size_t>(nn)] = {lo, 0.0};
          } else {
            eig[static_cast<std::size_t>(nn - 1)] = {x + p, z};
            eig[static_cast<std::size_t>(nn)] = {x + p, -z};
          }
          nn -= 2;
        } else {
          if (its == 60) throw NumericError("eigenvalue iteration did not converge");
          if (its == 10 || its == 20 || its == 40) {
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            const double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            A(i + 2, i) = 0.0;
            if (i != m) A(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = A(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) A(k, k - 1) = -A(k, k - 1);
            } else {
              A(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = A(k, j) + q * A(k + 1, j);
              if (k + 1 != nn) {
                p += r * A(k + 2, j);
                A(k + 2, j) -= p * z;
              }
              A(k + 1, j) -= p * y;
              A(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * A(i, k) + y * A(i, k + 1);
              if (k + 1 != nn) {
                p += z * A(i, k + 2);
                A(i, k + 2) -= p * r;
              }
              A(i, k + 1) -= p * q;
              A(i, k) -= p;
            }
          }
        }
      }
    } while (nn >= 0 && l < nn - 1);
  }
  return eig;
}

}  // namespace detail

/// All eigenvalues of a general real square matrix (complex pairs included).
inline std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  if (!m.square()) throw ShapeError("eigenvalues need a square matrix");
  if (!m.all_finite()) throw NumericError("matrix has non-finite entries");
  const std::size_t n = m.rows();
  if (n == 0) return {};
  if (n == 1) return {{m(0, 0), 0.0}};
  if (n == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double half = 0.5 * tr;
    const double disc = half * half - det;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      // Larger-magnitude root first, the other from the product to avoid cancellation.
      const double big = half + detail::sign_of(root, half);
      const double small = (big != 0.0) ? det / big : half - detail::sign_of(root, half);
      return {{big, 0.0}, {small, 0.0}};
    }
    const double im = std::sqrt(-disc);
    return {{half, im}, {half, -im}};
  }
  Matrix a = m;
  detail::balance(a);
  detail::to_hessenberg(a);
  return detail::hessenberg_qr(a);
}

/// Largest eigenvalue modulus.
inline double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& z : eigenvalues(m)) r = std::max(r, std::abs(z));
  return r;
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (unsorted) and eigenvectors as the columns of the second member.
inline std::pair<Vector, Matrix> symmetric_eigen(Matrix a) {
  const std::size_t n = a.rows();
  if (!a.square()) throw ShapeError("symmetric_eigen needs a square matrix");
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = detail::sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = a(i, i);
  return {std::move(w), std::move(v)};
}

struct SingularTriple {
  double sigma = 0.0;
  Vector left;
  Vector right;
};

/// Largest singular value of a square matrix with a unit left/right singular pair.
inline SingularTriple top_singular(const Matrix& b) {
  const std::size_t n = b.cols();
  auto [w, v] = symmetric_eigen(b.transpose() * b);
  std::size_t top = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (w[i] > w[top]) top = i;
  SingularTriple out;
  out.right.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.right[k] = v(k, top);
  out.left = b * out.right;
  out.sigma = norm2(out.left);
  if (out.sigma > 0.0) {
    for (double& x : out.left) x /= out.sigma;
  } else {
    out.left.assign(b.rows(), 0.0);
    out.left[0] = 1.0;
  }
  return out;
}

}  // namespace jsrlab

#endif  // JSRLAB_SPECTRUM_HPP
