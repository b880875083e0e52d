// qwell.hpp — 1D piecewise-constant quantum wells: bound states, dipoles,
// oscillator strengths, and inverse design against target strength triples.
//
// Units: lengths in L, energies in E_c = hbar^2 / (2 m L^2), so the
// Hamiltonian is -d^2/dx^2 + V(x) on a hard-walled domain.
#pragma once

#include <srphase/io.hpp>
#include <srphase/model.hpp>
#include <srphase/simplex.hpp>
#include <srphase/tridiag.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace srphase {

struct insufficient_spectrum : std::runtime_error {
  int found;
  explicit insufficient_spectrum(int found_states)
      : std::runtime_error("insufficient spectrum: found " +
                           std::to_string(found_states) +
                           " bound states, need at least 3"),
        found(found_states) {}
};

// Piecewise-constant potential. values[i] holds on [breakpoints[i], next
// breakpoint), the leftmost breakpoint coincides with x_lo, and the domain
// ends are hard walls.
struct PotentialSpec {
  double x_lo{0.0};
  double x_hi{1.0};
  std::vector<double> breakpoints;
  std::vector<double> values;
};

inline void validate(const PotentialSpec& pot) {
  if (!std::isfinite(pot.x_lo) || !std::isfinite(pot.x_hi) || !(pot.x_lo < pot.x_hi))
    throw invalid_parameter("potential domain must be finite with x_lo < x_hi");
  if (pot.breakpoints.empty() || pot.breakpoints.size() != pot.values.size())
    throw invalid_parameter("potential needs matching breakpoint and value lists");
  if (pot.breakpoints.front() != pot.x_lo)
    throw invalid_parameter("first breakpoint must sit at x_lo");
  for (std::size_t i = 1; i < pot.breakpoints.size(); ++i)
    if (!(pot.breakpoints[i] > pot.breakpoints[i - 1]))
      throw invalid_parameter("breakpoints must be strictly ascending");
  if (!(pot.breakpoints.back() < pot.x_hi))
    throw invalid_parameter("last breakpoint must lie inside the domain");
  for (double v : pot.values)
    if (!std::isfinite(v)) throw invalid_parameter("potential values must be finite");
}

inline double value_at(const PotentialSpec& pot, double x) {
  auto it = std::upper_bound(pot.breakpoints.begin(), pot.breakpoints.end(), x);
  if (it == pot.breakpoints.begin()) return pot.values.front();
  return pot.values[static_cast<std::size_t>(it - pot.breakpoints.begin()) - 1];
}

// States below the exterior potential level count as bound. A flat potential
// has no exterior barrier to leak through, so every box state is bound.
inline double continuum_edge(const PotentialSpec& pot) {
  bool flat = true;
  for (double v : pot.values) flat = flat && v == pot.values.front();
  if (flat) return std::numeric_limits<double>::infinity();
  return std::max(pot.values.front(), pot.values.back());
}

namespace detail {

struct WellGrid {
  std::vector<double> x;
  double dx{};
};

inline WellGrid interior_grid(const PotentialSpec& pot, int n_grid) {
  WellGrid g;
  g.dx = (pot.x_hi - pot.x_lo) / (n_grid + 1);
  g.x.resize(n_grid);
  for (int i = 0; i < n_grid; ++i) g.x[i] = pot.x_lo + (i + 1) * g.dx;
  return g;
}

// Mean of the piecewise-constant profile over [a, b], exact. Cell-averaged
// sampling keeps eigenvalues second-order accurate when region edges fall
// between nodes, and makes them vary smoothly with the edge positions.
inline double average_value(const PotentialSpec& pot, double a, double b) {
  const auto& bp = pot.breakpoints;
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(bp.begin(), bp.end(), a) - bp.begin());
  double acc = 0.0;
  double left = a;
  while (i < bp.size() && bp[i] < b) {
    acc += pot.values[i - 1] * (bp[i] - left);
    left = bp[i];
    ++i;
  }
  acc += pot.values[i - 1] * (b - left);
  return acc / (b - a);
}

inline Tridiagonal well_hamiltonian(const PotentialSpec& pot, const WellGrid& g) {
  Tridiagonal T;
  const double inv2 = 1.0 / (g.dx * g.dx);
  const double half = 0.5 * g.dx;
  T.diag.resize(g.x.size());
  T.off.assign(g.x.size() - 1, -inv2);
  for (std::size_t i = 0; i < g.x.size(); ++i)
    T.diag[i] = 2.0 * inv2 + average_value(pot, g.x[i] - half, g.x[i] + half);
  return T;
}

// Lowest k eigenpairs; wavefunctions come back trapezoid-normalized over the
// domain with the largest-magnitude sample made positive.
inline void lowest_states(const Tridiagonal& T, const WellGrid& g, int k,
                          std::vector<double>& energies,
                          std::vector<std::vector<double>>& wavefunctions) {
  energies = T.lowest_eigenvalues(k);
  std::vector<std::vector<double>> unit;  // l2-normalized, for orthogonalization
  wavefunctions.clear();
  const double scale = 1.0 / std::sqrt(g.dx);
  for (int m = 0; m < k; ++m) {
    unit.push_back(T.eigenvector(energies[m], unit));
    std::vector<double> psi = unit.back();
    std::size_t peak = 0;
    for (std::size_t i = 1; i < psi.size(); ++i)
      if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
    const double sign = psi[peak] < 0.0 ? -scale : scale;
    for (double& c : psi) c *= sign;
    wavefunctions.push_back(std::move(psi));
  }
}

inline double dipole(const WellGrid& g, const std::vector<double>& a,
                     const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) sum += a[i] * g.x[i] * b[i];
  return sum * g.dx;
}

}  // namespace detail

struct WellSolution {
  std::vector<double> grid;  // interior nodes; walls sit one dx outside
  double dx{};
  std::array<double, 3> energies{};
  std::array<std::vector<double>, 3> wavefunctions{};
  double d01{}, d02{}, d12{};
  double f01{}, f02{}, f12{};
  double anharmonicity{};  // (E1 - E0) / (E2 - E1)
  int bound_count{};
};

inline WellSolution solve_bound_states(const PotentialSpec& pot, int n_grid) {
  validate(pot);
  if (n_grid < 200) throw invalid_parameter("n_grid must be >= 200");
  const auto g = detail::interior_grid(pot, n_grid);
  const auto T = detail::well_hamiltonian(pot, g);
  const double edge = continuum_edge(pot);
  const int bound = std::isinf(edge) ? n_grid : T.count_below(edge);
  if (bound < 3) throw insufficient_spectrum(bound);

  std::vector<double> energies;
  std::vector<std::vector<double>> states;
  detail::lowest_states(T, g, 3, energies, states);

  WellSolution sol;
  sol.grid = g.x;
  sol.dx = g.dx;
  sol.bound_count = bound;
  for (int i = 0; i < 3; ++i) {
    sol.energies[i] = energies[i];
    sol.wavefunctions[i] = std::move(states[i]);
  }
  sol.d01 = detail::dipole(g, sol.wavefunctions[0], sol.wavefunctions[1]);
  sol.d02 = detail::dipole(g, sol.wavefunctions[0], sol.wavefunctions[2]);
  sol.d12 = detail::dipole(g, sol.wavefunctions[1], sol.wavefunctions[2]);
  sol.f01 = (sol.energies[1] - sol.energies[0]) * sol.d01 * sol.d01;
  sol.f02 = (sol.energies[2] - sol.energies[0]) * sol.d02 * sol.d02;
  sol.f12 = (sol.energies[2] - sol.energies[1]) * sol.d12 * sol.d12;
  sol.anharmonicity = (sol.energies[1] - sol.energies[0]) / (sol.energies[2] - sol.energies[1]);
  return sol;
}

struct WellStrengths {
  double f01{}, f02{}, f12{};
  double anharmonicity{};
};

inline WellStrengths strengths_from_potential(const PotentialSpec& pot, int n_grid) {
  const WellSolution sol = solve_bound_states(pot, n_grid);
  return {sol.f01, sol.f02, sol.f12, sol.anharmonicity};
}

// Truncated ground-state sum rule over the lowest n_states box states,
// bound or not. Approaches 1 from below as states are added.
inline double ground_sum_rule(const PotentialSpec& pot, int n_grid, int n_states) {
  validate(pot);
  if (n_grid < 200) throw invalid_parameter("n_grid must be >= 200");
  if (n_states < 2 || n_states > n_grid)
    throw invalid_parameter("state count out of range");
  const auto g = detail::interior_grid(pot, n_grid);
  const auto T = detail::well_hamiltonian(pot, g);
  std::vector<double> energies;
  std::vector<std::vector<double>> states;
  detail::lowest_states(T, g, n_states, energies, states);
  double sum = 0.0;
  for (int j = 1; j < n_states; ++j) {
    const double d = detail::dipole(g, states[0], states[j]);
    sum += (energies[j] - energies[0]) * d * d;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Potential files: `domain x_lo x_hi` header, then `breakpoint value` rows.
// '#' starts a comment.

inline std::string serialize_potential(const PotentialSpec& pot) {
  validate(pot);
  char buffer[96];
  std::string out = "# piecewise-constant potential\n";
  std::snprintf(buffer, sizeof(buffer), "domain %.17g %.17g\n", pot.x_lo, pot.x_hi);
  out += buffer;
  for (std::size_t i = 0; i < pot.breakpoints.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.17g %.17g\n", pot.breakpoints[i],
                  pot.values[i]);
    out += buffer;
  }
  return out;
}

inline PotentialSpec parse_potential(const std::string& text) {
  PotentialSpec pot;
  std::istringstream stream(text);
  std::string line;
  bool have_domain = false;
  while (std::getline(stream, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    if (!have_domain) {
      std::string keyword;
      if (!(fields >> keyword)) continue;  // blank line before the header
      if (keyword != "domain" || !(fields >> pot.x_lo >> pot.x_hi))
        throw invalid_parameter("potential file must start with: domain x_lo x_hi");
      have_domain = true;
    } else {
      double b, v;
      if (!(fields >> b)) continue;
      if (!(fields >> v)) throw invalid_parameter("bad potential row: " + line);
      pot.breakpoints.push_back(b);
      pot.values.push_back(v);
    }
    std::string extra;
    if (fields >> extra) throw invalid_parameter("trailing tokens in row: " + line);
  }
  if (!have_domain) throw invalid_parameter("potential file is empty");
  validate(pot);
  return pot;
}

inline PotentialSpec read_potential_file(const std::string& path) {
  return parse_potential(read_text_file(path));
}

inline void write_potential_file(const std::string& path, const PotentialSpec& pot) {
  write_text_file(path, serialize_potential(pot));
}

// Wavefunction CSV over the full domain including the hard-wall zeros.
inline std::string wavefunctions_csv(const WellSolution& sol) {
  char buffer[40];
  auto append_g = [&](std::string& out, double v) {
    std::snprintf(buffer, sizeof(buffer), "%.9g", v);
    out += buffer;
  };
  std::string out = "x,psi0,psi1,psi2\n";
  auto row = [&](double x, double a, double b, double c) {
    append_g(out, x);
    out += ',';
    append_g(out, a);
    out += ',';
    append_g(out, b);
    out += ',';
    append_g(out, c);
    out += '\n';
  };
  row(sol.grid.front() - sol.dx, 0.0, 0.0, 0.0);
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    row(sol.grid[i], sol.wavefunctions[0][i], sol.wavefunctions[1][i],
        sol.wavefunctions[2][i]);
  row(sol.grid.back() + sol.dx, 0.0, 0.0, 0.0);
  return out;
}

inline void write_wavefunctions_csv(const std::string& path, const WellSolution& sol) {
  write_text_file(path, wavefunctions_csv(sol));
}

// ---------------------------------------------------------------------------
// Inverse design: search a square-well template for a potential whose three
// lowest states hit target strengths and anharmonicity.

enum class WellFamily { SingleWell, DoubleWell };

struct FitTargets {
  double f01{}, f02{}, f12{};
  double anharmonicity{};
};

struct FitOptions {
  WellFamily family{WellFamily::DoubleWell};
  double v_out{80.0};  // exterior pad level, sets the continuum edge
  double pad{1.25};    // pad width between the hard wall and the wells
  int search_grid{400};
  int polish_grid{1000};
  int verify_grid{2000};
};

struct FitResult {
  PotentialSpec potential;
  std::vector<double> parameters;
  double residual{};  // at verify_grid
  bool success{};     // residual < 1e-2
  WellStrengths achieved{};
};

namespace detail {

// DoubleWell parameters: width1, barrier width, width2, barrier height,
// depth offset of the second well. SingleWell parameters: width, depth offset.
template <std::size_t N>
inline PotentialSpec family_potential(const FitOptions& opt,
                                      const std::array<double, N>& p) {
  static_assert(N == 5 || N == 2, "unknown well family parameter count");
  PotentialSpec pot;
  pot.x_lo = 0.0;
  if constexpr (N == 5) {
    const double w1 = p[0], wb = p[1], w2 = p[2], vb = p[3], dv = p[4];
    pot.x_hi = 2.0 * opt.pad + w1 + wb + w2;
    pot.breakpoints = {0.0, opt.pad, opt.pad + w1, opt.pad + w1 + wb,
                       opt.pad + w1 + wb + w2};
    pot.values = {opt.v_out, 0.0, vb, dv, opt.v_out};
  } else {
    const double w = p[0], dv = p[1];
    pot.x_hi = 2.0 * opt.pad + w;
    pot.breakpoints = {0.0, opt.pad, opt.pad + w};
    pot.values = {opt.v_out, dv, opt.v_out};
  }
  return pot;
}

inline double fit_residual(const WellStrengths& a, const FitTargets& t) {
  const double r0 = a.f01 - t.f01;
  const double r1 = a.f02 - t.f02;
  const double r2 = a.f12 - t.f12;
  const double r3 = a.anharmonicity - t.anharmonicity;
  return std::sqrt(r0 * r0 + r1 * r1 + r2 * r2 + r3 * r3);
}

template <std::size_t N>
inline bool lex_less(const std::array<double, N>& a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

template <std::size_t N>
struct FitCandidate {
  std::array<double, N> p{};
  double value{};
};

template <std::size_t N>
inline void rank(std::vector<FitCandidate<N>>& c) {
  std::stable_sort(c.begin(), c.end(),
                   [](const FitCandidate<N>& a, const FitCandidate<N>& b) {
                     if (a.value != b.value) return a.value < b.value;
                     return lex_less(a.p, b.p);
                   });
}

template <std::size_t N>
inline FitResult fit_with_family(const FitTargets& targets, const FitOptions& opt,
                                 const std::array<double, N>& lower,
                                 const std::array<double, N>& upper,
                                 const std::vector<std::array<double, N>>& lattice,
                                 const std::array<double, N>& search_step,
                                 const std::array<double, N>& polish_step) {
  auto objective_on = [&](int grid) {
    return [&, grid](const std::array<double, N>& p) -> double {
      try {
        return fit_residual(strengths_from_potential(family_potential(opt, p), grid),
                            targets);
      } catch (const insufficient_spectrum& e) {
        return 6.0 + (3 - e.found);  // graded penalty toward more bound states
      }
    };
  };

  auto coarse_obj = objective_on(opt.search_grid);
  std::vector<FitCandidate<N>> pool;
  for (const auto& p : lattice) pool.push_back({p, coarse_obj(p)});
  rank(pool);

  SimplexOptions<N> search_opt;
  search_opt.lower = lower;
  search_opt.upper = upper;
  search_opt.f_tol = 1e-10;
  search_opt.x_tol = 1e-7;
  search_opt.max_iter = 500;
  // Wide-step descent, then a narrow-step restart at the found point. The
  // restart re-inflates the simplex, which rescues runs that collapsed early.
  const std::size_t n_starts = std::min<std::size_t>(32, pool.size());
  std::vector<FitCandidate<N>> refined;
  for (std::size_t i = 0; i < n_starts; ++i) {
    auto r = nelder_mead<N>(coarse_obj, pool[i].p, search_step, search_opt);
    auto r2 = nelder_mead<N>(coarse_obj, r.x, polish_step, search_opt);
    refined.push_back({r2.x, r2.value});
  }
  rank(refined);

  auto polish_obj = objective_on(opt.polish_grid);
  SimplexOptions<N> polish_opt = search_opt;
  polish_opt.f_tol = 1e-12;
  polish_opt.max_iter = 250;
  std::vector<FitCandidate<N>> polished;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, refined.size()); ++i) {
    auto r = nelder_mead<N>(polish_obj, refined[i].p, polish_step, polish_opt);
    polished.push_back({r.x, r.value});
  }
  rank(polished);

  const auto& best = polished.front().p;
  FitResult result;
  result.potential = family_potential(opt, best);
  result.parameters.assign(best.begin(), best.end());
  try {
    result.achieved = strengths_from_potential(result.potential, opt.verify_grid);
    result.residual = fit_residual(result.achieved, targets);
  } catch (const insufficient_spectrum& e) {
    result.residual = 6.0 + (3 - e.found);
  }
  result.success = result.residual < 1e-2;
  return result;
}

}  // namespace detail

inline FitResult fit_potential(const FitTargets& targets, const FitOptions& opt = {}) {
  if (!std::isfinite(targets.anharmonicity) || targets.anharmonicity <= 0.0)
    throw invalid_parameter("target anharmonicity must be finite and > 0");
  if (!trk_check(targets.f01, targets.f02, targets.f12).feasible)
    throw invalid_parameter("target strengths violate the sum rule");
  if (!(opt.v_out > 0.0) || !(opt.pad > 0.0))
    throw invalid_parameter("fit fixture needs positive pad and exterior level");

  if (opt.family == WellFamily::DoubleWell) {
    // The barrier may rise above the exterior pads; capping it at v_out cuts
    // off the narrow-well regime where strongly detuned targets live.
    const std::array<double, 5> lower{0.2, 0.04, 0.2, 1.0, -40.0};
    const std::array<double, 5> upper{4.0, 2.5, 4.0, opt.v_out + 60.0, 40.0};
    std::vector<std::array<double, 5>> lattice;
    for (double w1 : {0.3, 0.55, 1.0, 1.7, 2.6})
      for (double wb : {0.08, 0.2, 0.45})
        for (double w2 : {0.3, 0.55, 1.0, 1.7, 2.6})
          for (double vb : {12.0, 45.0, 0.6 * opt.v_out + 60.0})
            for (double dv : {-18.0, 0.0, 18.0})
              lattice.push_back({w1, wb, w2, vb, dv});
    const std::array<double, 5> search_step{0.2, 0.08, 0.2, 8.0, 4.0};
    const std::array<double, 5> polish_step{0.02, 0.01, 0.02, 0.8, 0.4};
    return detail::fit_with_family<5>(targets, opt, lower, upper, lattice, search_step,
                                      polish_step);
  }
  const std::array<double, 2> lower{0.4, -240.0};
  const std::array<double, 2> upper{6.0, 40.0};
  std::vector<std::array<double, 2>> lattice;
  for (double w : {1.0, 1.75, 2.5, 3.25, 4.0})
    for (double dv : {-200.0, -120.0, -60.0, -20.0, 0.0, 20.0})
      lattice.push_back({w, dv});
  const std::array<double, 2> search_step{0.4, 10.0};
  const std::array<double, 2> polish_step{0.05, 2.0};
  return detail::fit_with_family<2>(targets, opt, lower, upper, lattice, search_step,
                                    polish_step);
}

}  // namespace srphase
