#pragma once

// Reference implementations used only by tests. They favour obviousness over
// speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Matrix = std::vector<std::vector<cd>>;

inline Matrix identity(std::size_t d) {
  Matrix m(d, std::vector<cd>(d));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t ra = a.size(), rb = b.size();
  Matrix out(ra * rb, std::vector<cd>(ra * rb));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ra; ++j)
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < rb; ++l) out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
  return out;
}

inline Matrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return {{s, s}, {s, -s}};
}

inline Matrix rx(double w) {
  const cd c = std::cos(w / 2), s = cd(0, -std::sin(w / 2));
  return {{c, s}, {s, c}};
}

inline Matrix rz(double w) { return {{std::polar(1.0, -w / 2), 0.0}, {0.0, std::polar(1.0, w / 2)}}; }

// I (x) ... (x) g (x) ... (x) I with qubit 0 leftmost (most significant).
inline Matrix lift(int n, int q, const Matrix& g) {
  Matrix m = {{1.0}};
  for (int k = 0; k < n; ++k) m = kron(m, k == q ? g : identity(2));
  return m;
}

inline Matrix cnot(int n, int control, int target) {
  const std::size_t d = std::size_t{1} << n;
  Matrix m(d, std::vector<cd>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const bool c = (i >> (n - 1 - control)) & 1U;
    const std::size_t j = c ? i ^ (std::size_t{1} << (n - 1 - target)) : i;
    m[j][i] = 1.0;
  }
  return m;
}

inline std::vector<cd> matvec(const Matrix& m, const std::vector<cd>& v) {
  std::vector<cd> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

inline std::vector<cd> basis_zero(int n) {
  std::vector<cd> v(std::size_t{1} << n);
  v[0] = 1.0;
  return v;
}

inline double expect_z(int n, int q, const std::vector<cd>& v) {
  double e = 0;
  for (std::size_t i = 0; i < v.size(); ++i) e += ((i >> (n - 1 - q)) & 1U ? -1.0 : 1.0) * std::norm(v[i]);
  return e;
}

// Whole circuit by dense matrices: encoding then `layers` variational blocks.
inline std::vector<double> circuit(std::span<const double> omega, std::span<const double> theta, int layers) {
  const int n = static_cast<int>(omega.size());
  auto v = basis_zero(n);
  for (int q = 0; q < n; ++q) {
    v = matvec(lift(n, q, hadamard()), v);
    v = matvec(lift(n, q, rx(omega[q])), v);
    v = matvec(lift(n, q, rz(omega[q])), v);
  }
  for (int l = 0; l < layers; ++l) {
    if (n > 1)
      for (int q = 0; q < n; ++q) v = matvec(cnot(n, q, (q + 1) % n), v);
    for (int q = 0; q < n; ++q) {
      v = matvec(lift(n, q, rx(theta[(l * n + q) * 2])), v);
      v = matvec(lift(n, q, rz(theta[(l * n + q) * 2 + 1])), v);
    }
  }
  std::vector<double> out(n);
  for (int q = 0; q < n; ++q) out[q] = expect_z(n, q, v);
  return out;
}

// Central difference of a scalar function along coordinate i of x.
inline double central_diff(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                           std::size_t i, double eps) {
  const double x0 = x[i];
  x[i] = x0 + eps;
  const double up = f(x);
  x[i] = x0 - eps;
  const double down = f(x);
  return (up - down) / (2 * eps);
}

// Two-sided signed-rank p value by enumerating every sign assignment of the
// nonzero differences.
inline double wilcoxon_brute_p(std::span<const double> x, std::span<const double> y) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] - y[i] != 0.0) d.push_back(x[i] - y[i]);
  const std::size_t n = d.size();
  if (n == 0) return 1.0;
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) ++less;
      if (std::abs(d[j]) == std::abs(d[i])) ++equal;
    }
    rank[i] = less + (equal + 1) / 2;
  }
  double wplus = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (d[i] > 0) wplus += rank[i];
  }
  const double w = std::min(wplus, total - wplus);
  std::uint64_t hits = 0;
  const std::uint64_t all = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < all; ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) s += rank[i];
    if (s <= w + 1e-9) ++hits;
  }
  return std::min(1.0, 2.0 * static_cast<double>(hits) / static_cast<double>(all));
}

// Per-class binary cross-entropy evaluated directly.
inline double bce(std::span<const double> z, int target) {
  double l = 0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double p = std::clamp(z[j], 1e-7, 1 - 1e-7);
    l -= static_cast<int>(j) == target ? std::log(p) : std::log(1 - p);
  }
  return l;
}

}  // namespace oracle
