// model.hpp — Parameter types, the oscillator-strength -> Rabi map, TRK feasibility.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace srphase {

// All frequencies are expressed in units of the cavity frequency.
inline constexpr double omega_cav = 1.0;

class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class out_of_domain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Dimensionless oscillator strengths; converted to Rabi couplings through D.
struct TrkCoupling {
  double f01{0.0};
  double f02{0.0};
  double f12{0.0};
};

// Collective Rabi frequencies given directly (no sum-rule structure implied).
struct DirectCoupling {
  double omega01{0.0};
  double omega02{0.0};
  double omega12{0.0};
};

using CouplingSpec = std::variant<TrkCoupling, DirectCoupling>;

struct ModelParams {
  double omega10{1.0};  // 0 -> 1 splitting, > 0
  double omega21{1.0};  // 1 -> 2 splitting, > 0
  double D{0.0};        // diamagnetic amplitude, >= 0
  CouplingSpec coupling{TrkCoupling{}};
};

inline double omega20(const ModelParams& p) { return p.omega10 + p.omega21; }

inline bool is_trk(const ModelParams& p) {
  return std::holds_alternative<TrkCoupling>(p.coupling);
}

inline void validate(const ModelParams& p) {
  if (!std::isfinite(p.omega10) || p.omega10 <= 0.0)
    throw invalid_parameter("omega10 must be finite and > 0");
  if (!std::isfinite(p.omega21) || p.omega21 <= 0.0)
    throw invalid_parameter("omega21 must be finite and > 0");
  if (!std::isfinite(p.D) || p.D < 0.0)
    throw invalid_parameter("D must be finite and >= 0");
  if (const auto* trk = std::get_if<TrkCoupling>(&p.coupling)) {
    for (double f : {trk->f01, trk->f02, trk->f12})
      if (!std::isfinite(f) || f < 0.0)
        throw invalid_parameter("oscillator strengths must be finite and >= 0");
    if (p.D == 0.0 && (trk->f01 > 0.0 || trk->f02 > 0.0 || trk->f12 > 0.0))
      throw invalid_parameter(
          "oscillator-strength coupling with D = 0 is undefined for nonzero f");
  } else {
    const auto& d = std::get<DirectCoupling>(p.coupling);
    for (double w : {d.omega01, d.omega02, d.omega12})
      if (!std::isfinite(w) || w < 0.0)
        throw invalid_parameter("Rabi couplings must be finite and >= 0");
  }
}

struct RabiTriple {
  double omega01{0.0};
  double omega02{0.0};
  double omega12{0.0};
};

// Omega_ij = sqrt(f_ij * omega_ji * D); identity on direct couplings.
inline RabiTriple rabi_from_trk(const ModelParams& p) {
  validate(p);
  if (const auto* trk = std::get_if<TrkCoupling>(&p.coupling)) {
    return {std::sqrt(trk->f01 * p.omega10 * p.D),
            std::sqrt(trk->f02 * omega20(p) * p.D),
            std::sqrt(trk->f12 * p.omega21 * p.D)};
  }
  const auto& d = std::get<DirectCoupling>(p.coupling);
  return {d.omega01, d.omega02, d.omega12};
}

struct TrkReport {
  bool feasible{true};
  double ground_sum{0.0};   // f01 + f02
  double excited_sum{0.0};  // f12 - f01, the downward strength entering negated
  std::vector<std::string> violated_constraints;
};

// Truncated sum-rule feasibility. The lower bound on the excited-state sum
// constrains only configurations that use the 1->2 transition; with f12 = 0
// the bound degenerates and the ground-state sum alone applies.
inline TrkReport trk_check(double f01, double f02, double f12) {
  for (double f : {f01, f02, f12})
    if (!std::isfinite(f) || f < 0.0)
      throw invalid_parameter("oscillator strengths must be finite and >= 0");
  TrkReport report;
  report.ground_sum = f01 + f02;
  report.excited_sum = f12 - f01;
  if (report.ground_sum > 1.0)
    report.violated_constraints.emplace_back("ground_sum>1");
  if (f12 > 0.0 && report.excited_sum < 0.0)
    report.violated_constraints.emplace_back("excited_sum<0");
  if (report.excited_sum > 1.0)
    report.violated_constraints.emplace_back("excited_sum>1");
  report.feasible = report.violated_constraints.empty();
  return report;
}

inline TrkReport trk_check(const TrkCoupling& c) {
  return trk_check(c.f01, c.f02, c.f12);
}

}  // namespace srphase
