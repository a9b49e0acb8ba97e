#pragma once

#include <functional>
#include <string>
#include <vector>

namespace airy {

struct QuadratureOptions {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 0.0;
  int max_intervals = 4000;
};

// One bisection step of the adaptive scheme, kept for error reports.
struct RefinementStep {
  double lo = 0.0;
  double hi = 0.0;
  double estimate = 0.0;
  double error = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

// Globally adaptive 15-point Gauss-Kronrod on [lo, hi]: the interval with the largest error estimate is
// bisected until the summed estimate meets max(abs_tol, rel_tol |value|). Throws NumericalError carrying
// the last refinement steps when max_intervals is exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& options = {});

// ∫_{u0}^{u1} ∫_{v0}^{v1} f(u, v) dv du by nested adaptive rules; the inner tolerance is a tenth of the outer.
QuadratureResult integrate_nested(const std::function<double(double, double)>& f, double u0, double u1, double v0, double v1,
                                  const QuadratureOptions& options = {});

std::string describe_trace(const std::vector<RefinementStep>& trace);

}  // namespace airy
