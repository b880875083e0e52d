// tridiag.hpp — symmetric tridiagonal eigenpairs via Sturm bisection and
// shifted inverse iteration. Deterministic; no external dependencies.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace srphase {

struct Tridiagonal {
  std::vector<double> diag;  // n entries
  std::vector<double> off;   // n - 1 entries

  std::size_t size() const { return diag.size(); }

  // Eigenvalues strictly below lambda, by the Sturm sequence of the
  // LDL^T pivots. Near-zero pivots are nudged to keep the recurrence finite.
  int count_below(double lambda) const {
    const double tiny = 1e-290;
    int count = 0;
    double q = diag[0] - lambda;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
      double denom = q;
      if (std::abs(denom) < tiny) denom = denom < 0.0 ? -tiny : tiny;
      q = diag[i] - lambda - off[i - 1] * off[i - 1] / denom;
      if (q < 0.0) ++count;
    }
    return count;
  }

  // k smallest eigenvalues, ascending, each bisected until the bracket is
  // below an absolute-plus-relative tolerance.
  std::vector<double> lowest_eigenvalues(int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > size())
      throw std::invalid_argument("eigenvalue count out of range");
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < size(); ++i) {
      const double left = i > 0 ? std::abs(off[i - 1]) : 0.0;
      const double right = i + 1 < size() ? std::abs(off[i]) : 0.0;
      lo = std::min(lo, diag[i] - left - right);
      hi = std::max(hi, diag[i] + left + right);
    }
    std::vector<double> eigenvalues(k);
    for (int m = 0; m < k; ++m) {
      double a = lo, b = hi;
      for (int iter = 0; iter < 240 && b - a > 1e-13 * (std::abs(a) + std::abs(b) + 1.0);
           ++iter) {
        const double mid = 0.5 * (a + b);
        if (count_below(mid) >= m + 1)
          b = mid;
        else
          a = mid;
      }
      eigenvalues[m] = 0.5 * (a + b);
      lo = a;  // later eigenvalues cannot lie below this bracket
    }
    return eigenvalues;
  }

  // Unit eigenvector for an eigenvalue estimate, kept orthogonal to any
  // previously found vectors so clustered levels resolve cleanly.
  std::vector<double> eigenvector(double lambda,
                                  const std::vector<std::vector<double>>& previous) const {
    const std::size_t n = size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = 1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i + 1));
    orthonormalize(v, previous);

    std::vector<double> work(n);
    for (int iter = 0; iter < 12; ++iter) {
      work = v;
      solve_shifted(lambda, work);
      v = work;
      orthonormalize(v, previous);
      if (residual(lambda, v) < 1e-9 * (std::abs(lambda) + 1.0)) break;
    }
    return v;
  }

 private:
  static void orthonormalize(std::vector<double>& v,
                             const std::vector<std::vector<double>>& previous) {
    for (const auto& p : previous) {
      double proj = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) proj += v[i] * p[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * p[i];
    }
    double norm2 = 0.0;
    for (double c : v) norm2 += c * c;
    const double norm = std::sqrt(norm2);
    if (norm < 1e-200) throw std::runtime_error("inverse iteration collapsed");
    for (double& c : v) c /= norm;
  }

  double residual(double lambda, const std::vector<double>& v) const {
    const std::size_t n = size();
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double t = (diag[i] - lambda) * v[i];
      if (i > 0) t += off[i - 1] * v[i - 1];
      if (i + 1 < n) t += off[i] * v[i + 1];
      r2 += t * t;
    }
    return std::sqrt(r2);
  }

  // Gaussian elimination with partial pivoting on (T - lambda I) x = b,
  // overwriting b with x. Zero pivots are nudged; the shift sits at an
  // eigenvalue, so amplification along the eigenvector is the desired effect.
  void solve_shifted(double lambda, std::vector<double>& b) const {
    const std::size_t n = size();
    std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0), l(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - lambda;
    for (std::size_t i = 0; i + 1 < n; ++i) u1[i] = off[i];

    for (std::size_t i = 0; i + 1 < n; ++i) {
      double sub = off[i];  // current subdiagonal entry in row i+1
      if (std::abs(sub) > std::abs(d[i])) {
        std::swap(d[i], sub);
        std::swap(u1[i], d[i + 1]);
        std::swap(u2[i], u1[i + 1]);
        std::swap(b[i], b[i + 1]);
      }
      double pivot = d[i];
      if (std::abs(pivot) < 1e-290) pivot = pivot < 0.0 ? -1e-290 : 1e-290;
      const double m = sub / pivot;
      l[i] = m;
      d[i + 1] -= m * u1[i];
      u1[i + 1] -= m * u2[i];
      b[i + 1] -= m * b[i];
    }
    for (std::size_t ri = n; ri-- > 0;) {
      double t = b[ri];
      if (ri + 1 < n) t -= u1[ri] * b[ri + 1];
      if (ri + 2 < n) t -= u2[ri] * b[ri + 2];
      double pivot = d[ri];
      if (std::abs(pivot) < 1e-290) pivot = pivot < 0.0 ? -1e-290 : 1e-290;
      b[ri] = t / pivot;
    }
  }
};

}  // namespace srphase
