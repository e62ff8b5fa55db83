#pragma once

#include "densctl/grid.hpp"

namespace densctl {

/// One row of the diagnostics time series shared by the macro and micro runs.
struct DiagnosticSample {
  double t = 0.0;
  double err_L = 0.0;
  double err_F = 0.0;
  double pct_L = 0.0;
  double pct_F = 0.0;
  double kl_L = 0.0;
  double kl_F = 0.0;
  double mass_L = 0.0;
  double mass_F = 0.0;
};

/// sqrt(integral((a - b)^2)).
double l2_error(const GridFunction& a, const GridFunction& b);

/// integral(p log(p / q)) with 0 log 0 = 0. Throws if q has a sample <= 0.
double kl_divergence(const GridFunction& p, const GridFunction& q);

/// 100 * err / reference, or 0 when the reference is 0.
double percentage_error(double err, double reference);

}  // namespace densctl
