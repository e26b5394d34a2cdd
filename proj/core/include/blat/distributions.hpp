#pragma once

#include "blat/linalg.hpp"
#include "blat/types.hpp"

namespace blat {

/// N(mean, cov) with density evaluation.
struct MultivariateNormal {
  Vector mean;
  Matrix cov;

  double log_density(const Vector& x) const;
  double density(const Vector& x) const;
};

/// Log density of t_ν(location, scale) with ν = t.shape_dof().
double log_density(const StudentTPredictive& t, const Vector& x);
double density(const StudentTPredictive& t, const Vector& x);

}  // namespace blat
