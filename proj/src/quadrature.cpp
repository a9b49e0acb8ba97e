#include "airy/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <sstream>

#include "airy/core.hpp"
#include "airy/json_writer.hpp"

namespace airy {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Piece {
  RefinementStep step;
  bool operator<(const Piece& o) const { return step.error < o.step.error; }
};

Piece evaluate(const std::function<double(double)>& f, double lo, double hi) {
  double error = 0.0;
  // max_depth 0: a single Kronrod panel with its embedded Gauss error estimate. Boost reports that
  // estimate on the reference interval [-1, 1], so it is scaled by the half-width here.
  const double value = Rule::integrate(f, lo, hi, 0, 0.0, &error);
  return {{lo, hi, value, error * 0.5 * (hi - lo)}};
}

}  // namespace

std::string describe_trace(const std::vector<RefinementStep>& trace) {
  std::ostringstream out;
  for (const auto& s : trace)
    out << "\n  [" << format_double(s.lo) << ", " << format_double(s.hi) << "] estimate " << format_double(s.estimate)
        << " error " << format_double(s.error);
  return out.str();
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& options) {
  if (!(lo <= hi)) throw ValidationError("integrate_adaptive: lower limit above upper limit");
  if (lo == hi) return {};
  std::priority_queue<Piece> pieces;
  pieces.push(evaluate(f, lo, hi));
  double value = pieces.top().step.estimate, error = pieces.top().step.error;
  std::vector<RefinementStep> trace;
  int count = 1;
  while (true) {
    if (!std::isfinite(value)) throw NumericalError("integrate_adaptive: non-finite integrand on [" + format_double(lo) + ", " +
                                                    format_double(hi) + "]");
    if (error <= std::max(options.absolute_tolerance, options.relative_tolerance * std::abs(value))) break;
    if (count >= options.max_intervals) {
      const std::size_t keep = std::min<std::size_t>(trace.size(), 12);
      throw NumericalError("adaptive quadrature did not converge: value " + format_double(value) + ", error " +
                           format_double(error) + " after " + std::to_string(count) + " intervals; last refinements:" +
                           describe_trace({trace.end() - static_cast<long>(keep), trace.end()}));
    }
    const Piece worst = pieces.top();
    pieces.pop();
    const double mid = 0.5 * (worst.step.lo + worst.step.hi);
    const Piece left = evaluate(f, worst.step.lo, mid), right = evaluate(f, mid, worst.step.hi);
    value += left.step.estimate + right.step.estimate - worst.step.estimate;
    error += left.step.error + right.step.error - worst.step.error;
    trace.push_back(worst.step);
    pieces.push(left);
    pieces.push(right);
    ++count;
  }
  // Re-sum to shed the drift of the running updates.
  std::vector<double> values, errors;
  while (!pieces.empty()) {
    values.push_back(pieces.top().step.estimate);
    errors.push_back(pieces.top().step.error);
    pieces.pop();
  }
  return {pairwise_sum(values), pairwise_sum(errors), count};
}

QuadratureResult integrate_nested(const std::function<double(double, double)>& f, double u0, double u1, double v0, double v1,
                                  const QuadratureOptions& options) {
  QuadratureOptions inner = options;
  inner.relative_tolerance = 0.1 * options.relative_tolerance;
  inner.absolute_tolerance = 0.1 * options.absolute_tolerance / std::max(1.0, u1 - u0);
  int intervals = 0;
  const QuadratureResult outer = integrate_adaptive(
      [&](double u) {
        const QuadratureResult r = integrate_adaptive([&](double v) { return f(u, v); }, v0, v1, inner);
        intervals += r.intervals;
        return r.value;
      },
      u0, u1, options);
  return {outer.value, outer.error, outer.intervals + intervals};
}

}  // namespace airy
