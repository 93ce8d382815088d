#pragma once

#include <span>
#include <vector>

namespace driverl {

/// Periodic cubic spline through (t_i, y_i) with period t_n - t_0.
///
/// `knots` holds n + 1 strictly increasing parameters; `values` holds the n
/// samples at knots[0..n-1] (the value at knots[n] is values[0]).
class PeriodicSpline {
 public:
  PeriodicSpline() = default;
  PeriodicSpline(std::span<const double> knots, std::span<const double> values);

  double operator()(double t) const;
  double derivative(double t) const;
  double period() const { return knots_.back() - knots_.front(); }
  double start() const { return knots_.front(); }

 private:
  std::size_t segment(double& t) const;

  std::vector<double> knots_;
  std::vector<double> values_;   // n + 1, closed
  std::vector<double> moments_;  // second derivatives, n + 1, closed
};

/// Solves a cyclic tridiagonal system (Sherman-Morrison on Thomas).
/// `lower[i]` multiplies x[i-1], `upper[i]` multiplies x[i+1], indices wrap.
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs);

}  // namespace driverl
