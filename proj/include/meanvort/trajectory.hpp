#pragma once

#include <vector>

#include "meanvort/state.hpp"

namespace meanvort {

/// One row of the diagnostics CSV. Quantities that do not apply to the run's
/// regime stay NaN and are serialized as "nan".
struct DiagRow {
  double t = 0.0;
  double mass = std::numeric_limits<double>::quiet_NaN();
  double linf = std::numeric_limits<double>::quiet_NaN();
  double l2 = std::numeric_limits<double>::quiet_NaN();
  double lp = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double div_a_v_rel = std::numeric_limits<double>::quiet_NaN();
  double delort_res = std::numeric_limits<double>::quiet_NaN();
  double energy = std::numeric_limits<double>::quiet_NaN();
  double energy_rhs_res = std::numeric_limits<double>::quiet_NaN();
  double margin_r44_sharp = std::numeric_limits<double>::quiet_NaN();
  double margin_r44_univ = std::numeric_limits<double>::quiet_NaN();
  double fitted_C_112 = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr const char* kDiagCsvHeader =
    "t,mass,linf,l2,lp,p,div_a_v_rel,delort_res,energy,energy_rhs_res,"
    "margin_r44_sharp,margin_r44_univ,fitted_C_112";

/// Recorded time series of a run: strided snapshots plus per-run extrema
/// tracked at every step (not only at snapshot times).
struct Trajectory {
  std::vector<double> times;
  std::vector<State> snapshots;
  std::vector<DiagRow> diagnostics_rows;

  long steps_taken = 0;
  double min_omega_ever = 0.0;
  double max_mass_rel_drift = 0.0;
};

}  // namespace meanvort
