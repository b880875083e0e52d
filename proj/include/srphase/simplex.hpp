// simplex.hpp — Bounded Nelder-Mead descent for low-dimensional smooth objectives.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace srphase {

template <std::size_t N>
struct SimplexOptions {
  std::array<double, N> lower{};
  std::array<double, N> upper{};
  double f_tol{1e-12};  // absolute spread of simplex values
  double x_tol{1e-8};   // max vertex distance from the incumbent
  int max_iter{400};
};

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> x{};
  double value{std::numeric_limits<double>::infinity()};
  int iterations{0};
  bool converged{false};
};

// Standard reflect/expand/contract/shrink scheme. Trial points are clamped to
// the box, so optima on the boundary behave like ordinary box-constrained
// minima. Fully deterministic: no randomness, stable ordering.
template <std::size_t N, class F>
SimplexResult<N> nelder_mead(F&& f, const std::array<double, N>& start,
                             const std::array<double, N>& step,
                             const SimplexOptions<N>& opt) {
  constexpr std::size_t M = N + 1;
  using Vec = std::array<double, N>;

  auto clamp = [&opt](Vec v) {
    for (std::size_t i = 0; i < N; ++i)
      v[i] = std::min(std::max(v[i], opt.lower[i]), opt.upper[i]);
    return v;
  };

  std::array<Vec, M> vx;
  std::array<double, M> fv;
  vx[0] = clamp(start);
  for (std::size_t i = 0; i < N; ++i) {
    Vec v = vx[0];
    v[i] = std::min(std::max(v[i] + step[i], opt.lower[i]), opt.upper[i]);
    if (v[i] == vx[0][i])
      v[i] = std::min(std::max(vx[0][i] - step[i], opt.lower[i]), opt.upper[i]);
    vx[i + 1] = v;
  }
  for (std::size_t i = 0; i < M; ++i) fv[i] = f(vx[i]);

  std::array<std::size_t, M> ord{};
  auto sort_order = [&] {
    for (std::size_t i = 0; i < M; ++i) ord[i] = i;
    std::stable_sort(ord.begin(), ord.end(),
                     [&fv](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  int it = 0;
  bool converged = false;
  for (; it < opt.max_iter; ++it) {
    sort_order();
    const std::size_t best = ord[0], second = ord[M - 2], worst = ord[M - 1];

    double spread = fv[worst] - fv[best];
    double dist = 0.0;
    for (std::size_t i = 1; i < M; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < N; ++k) {
        double d = vx[ord[i]][k] - vx[best][k];
        d2 += d * d;
      }
      dist = std::max(dist, std::sqrt(d2));
    }
    if (spread <= opt.f_tol && dist <= opt.x_tol) {
      converged = true;
      break;
    }

    Vec centroid{};
    for (std::size_t i = 0; i < M; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < N; ++k) centroid[k] += vx[i][k];
    for (std::size_t k = 0; k < N; ++k) centroid[k] /= double(N);

    auto blend = [&](double t) {  // centroid + t * (centroid - worst)
      Vec v;
      for (std::size_t k = 0; k < N; ++k)
        v[k] = centroid[k] + t * (centroid[k] - vx[worst][k]);
      return clamp(v);
    };

    Vec xr = blend(1.0);
    double fr = f(xr);
    if (fr < fv[best]) {
      Vec xe = blend(2.0);
      double fe = f(xe);
      if (fe < fr) {
        vx[worst] = xe;
        fv[worst] = fe;
      } else {
        vx[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      vx[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      Vec xc = blend(outside ? 0.5 : -0.5);
      double fc = f(xc);
      if (outside ? fc <= fr : fc < fv[worst]) {
        vx[worst] = xc;
        fv[worst] = fc;
      } else {
        for (std::size_t i = 1; i < M; ++i) {
          std::size_t idx = ord[i];
          for (std::size_t k = 0; k < N; ++k)
            vx[idx][k] = vx[best][k] + 0.5 * (vx[idx][k] - vx[best][k]);
          fv[idx] = f(vx[idx]);
        }
      }
    }
  }

  sort_order();
  SimplexResult<N> out;
  out.x = vx[ord[0]];
  out.value = fv[ord[0]];
  out.iterations = it;
  out.converged = converged;
  return out;
}

}  // namespace srphase
