#include "driverl/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driverl {

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n < 3) throw std::invalid_argument("cyclic system needs n >= 3");
  // Corner terms: lower[0] couples x[0] to x[n-1], upper[n-1] couples x[n-1] to x[0].
  const double alpha = upper[n - 1];
  const double beta = lower[0];
  const double gamma = -diag[0];

  std::vector<double> b(diag.begin(), diag.end());
  b[0] -= gamma;
  b[n - 1] -= alpha * beta / gamma;

  auto thomas = [&](std::span<const double> d) {
    std::vector<double> c(n), x(n), bb(b);
    std::vector<double> dd(d.begin(), d.end());
    c[0] = upper[0] / bb[0];
    dd[0] /= bb[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = bb[i] - lower[i] * c[i - 1];
      c[i] = (i + 1 < n) ? upper[i] / m : 0.0;
      dd[i] = (dd[i] - lower[i] * dd[i - 1]) / m;
    }
    x[n - 1] = dd[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dd[i] - c[i] * x[i + 1];
    return x;
  };

  std::vector<double> x = thomas(rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<double> z = thomas(u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) /
                      (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

PeriodicSpline::PeriodicSpline(std::span<const double> knots,
                               std::span<const double> values) {
  const std::size_t n = values.size();
  if (knots.size() != n + 1 || n < 3) {
    throw std::invalid_argument("periodic spline needs n >= 3 values and n + 1 knots");
  }
  knots_.assign(knots.begin(), knots.end());
  values_.assign(values.begin(), values.end());
  values_.push_back(values.front());

  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = knots_[i + 1] - knots_[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("spline knots must increase");
  }
  // Row i: h[i-1] M[i-1] + 2 (h[i-1] + h[i]) M[i] + h[i] M[i+1] = 6 (slope_i - slope_{i-1}).
  std::vector<double> lo(n), di(n), up(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const double hp = h[prev];
    const double hi = h[i];
    lo[i] = hp;
    up[i] = hi;
    di[i] = 2.0 * (hp + hi);
    const double slope = (values_[i + 1] - values_[i]) / hi;
    const double slope_prev = (values_[i] - values_[prev]) / hp;
    rhs[i] = 6.0 * (slope - slope_prev);
  }
  moments_ = solve_cyclic_tridiagonal(lo, di, up, rhs);
  moments_.push_back(moments_.front());
}

std::size_t PeriodicSpline::segment(double& t) const {
  const double p = period();
  t = knots_.front() + std::fmod(t - knots_.front(), p);
  if (t < knots_.front()) t += p;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
  return i;
}

double PeriodicSpline::operator()(double t) const {
  const std::size_t i = segment(t);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = (t - knots_[i]) / h;
  return a * values_[i] + b * values_[i + 1] +
         ((a * a * a - a) * moments_[i] + (b * b * b - b) * moments_[i + 1]) * h * h / 6.0;
}

double PeriodicSpline::derivative(double t) const {
  const std::size_t i = segment(t);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = (t - knots_[i]) / h;
  return (values_[i + 1] - values_[i]) / h -
         (3.0 * a * a - 1.0) / 6.0 * h * moments_[i] +
         (3.0 * b * b - 1.0) / 6.0 * h * moments_[i + 1];
}

}  // namespace driverl
