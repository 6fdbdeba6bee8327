#pragma once

#include <string>

#include "meanvort/errors.hpp"

namespace meanvort {

/// Allowed undershoot of the nonnegative vorticity after limiting.
inline constexpr double kVorticityTolPos = 1e-12;

enum class Regime { Incompressible, Compressible, DegenerateParabolic };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Incompressible: return "incompressible";
    case Regime::Compressible: return "compressible";
    case Regime::DegenerateParabolic: return "degenerate_parabolic";
  }
  return "?";
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "incompressible") return Regime::Incompressible;
  if (s == "compressible") return Regime::Compressible;
  if (s == "degenerate_parabolic") return Regime::DegenerateParabolic;
  throw ValidationError("params.regime must be incompressible | compressible | degenerate_parabolic, got '" + s + "'");
}

/// Model coefficients. In the incompressible regime lambda is ignored
/// (conceptually infinite); the degenerate parabolic regime requires
/// lambda = beta = 0 with alpha > 0.
struct ModelParams {
  double alpha = 1.0;
  double beta = 0.0;
  double lambda = 0.0;
  Regime regime = Regime::Incompressible;

  void validate() const {
    if (lambda < 0.0) throw ValidationError("params.lambda must be >= 0");
    if (regime == Regime::DegenerateParabolic) {
      if (beta != 0.0)
        throw ValidationError("degenerate_parabolic regime requires beta = 0");
      if (lambda != 0.0)
        throw ValidationError("degenerate_parabolic regime requires lambda = 0");
      if (!(alpha > 0.0))
        throw ValidationError("degenerate_parabolic regime requires alpha > 0");
    }
    if (regime == Regime::Compressible && alpha < 0.0)
      throw ValidationError("compressible regime requires alpha >= 0");
  }

  bool evolves_zeta() const { return regime != Regime::Incompressible; }
};

}  // namespace meanvort
