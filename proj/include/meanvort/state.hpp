#pragma once

#include "meanvort/field.hpp"
#include "meanvort/params.hpp"

namespace meanvort {

/// Evolving fields at one instant. The velocity is the reconstruction of
/// (omega - mean, zeta - mean) plus a harmonic component fixed by its mean;
/// see elliptic.hpp for the compatibility contract.
struct State {
  double t = 0.0;
  VectorField v;
  ScalarField omega;
  ScalarField zeta;

  State() = default;
  State(double time, VectorField vel, ScalarField om, ScalarField ze)
      : t(time), v(std::move(vel)), omega(std::move(om)), zeta(std::move(ze)) {}
};

}  // namespace meanvort
