#include <algorithm>
#include <cmath>

#include "driverl/qp.hpp"
#include "driverl/spline.hpp"
#include "driverl/track.hpp"

namespace driverl {

namespace {

constexpr double kCoarseSpacing = 0.5;
constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-5;
constexpr double kTrustRadius = 0.3;
constexpr double kRegularization = 1e-6;

struct CoarseGrid {
  std::vector<Vec2> base;
  std::vector<Vec2> normal;
  std::vector<double> s;
  std::vector<double> lo, hi;
};

// Discrete turning-angle curvature at node j of the polyline base + a * normal.
double node_curvature(const CoarseGrid& grid, const std::vector<double>& a, std::size_t j) {
  const std::size_t m = a.size();
  const std::size_t i = (j + m - 1) % m;
  const std::size_t k = (j + 1) % m;
  const Vec2 p0 = grid.base[i] + a[i] * grid.normal[i];
  const Vec2 p1 = grid.base[j] + a[j] * grid.normal[j];
  const Vec2 p2 = grid.base[k] + a[k] * grid.normal[k];
  const Vec2 u = p1 - p0;
  const Vec2 v = p2 - p1;
  const double turn = wrap_angle(std::atan2(v.y(), v.x()) - std::atan2(u.y(), u.x()));
  return turn / std::max(0.5 * (u.norm() + v.norm()), 1e-9);
}

Eigen::VectorXd curvature_vector(const CoarseGrid& grid, const std::vector<double>& a) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(a.size()));
  for (std::size_t j = 0; j < a.size(); ++j) k[static_cast<Eigen::Index>(j)] = node_curvature(grid, a, j);
  return k;
}

std::vector<double> interpolate_fine(const TrackGeometry& track, const CoarseGrid& grid,
                                     const std::vector<double>& a) {
  std::vector<double> knots(grid.s);
  knots.push_back(track.total_length());
  const PeriodicSpline spline(knots, a);
  const std::size_t n = track.centerline.size();
  std::vector<double> fine(n);
  for (std::size_t i = 0; i < n; ++i) {
    fine[i] = std::clamp(spline(track.centerline.s_at(i)), -track.width_right[i] + kRacelineMargin,
                         track.width_left[i] - kRacelineMargin);
  }
  return fine;
}

}  // namespace

TrackGeometry generate_raceline(const TrackGeometry& track, double alat_max, double v_cap) {
  const auto& c = track.centerline;
  const std::size_t n = c.size();
  const std::size_t m = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(track.total_length() / kCoarseSpacing)));

  CoarseGrid grid;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(std::lround(static_cast<double>(j * n) / static_cast<double>(m))));
    grid.base.push_back(c.points()[i]);
    grid.normal.emplace_back(-std::sin(c.headings()[i]), std::cos(c.headings()[i]));
    grid.s.push_back(c.s_at(i));
    grid.lo.push_back(std::min(0.0, -track.width_right[i] + kRacelineMargin));
    grid.hi.push_back(std::max(0.0, track.width_left[i] - kRacelineMargin));
  }

  std::vector<double> a(m, 0.0);
  Eigen::VectorXd kappa = curvature_vector(grid, a);
  double objective = kappa.squaredNorm();
  bool converged = false;
  int iterations = 0;
  const auto em = static_cast<Eigen::Index>(m);

  for (; iterations < kMaxIterations && !converged; ++iterations) {
    // Jacobian of the node curvatures; node j couples only to j-1, j, j+1.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(em, em);
    constexpr double h = 1e-6;
    for (std::size_t q = 0; q < m; ++q) {
      std::vector<double> ap = a;
      ap[q] += h;
      std::vector<double> am = a;
      am[q] -= h;
      for (std::size_t d : {(q + m - 1) % m, q, (q + 1) % m}) {
        J(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(q)) =
            (node_curvature(grid, ap, d) - node_curvature(grid, am, d)) / (2.0 * h);
      }
    }
    QpProblem qp(em);
    qp.H = 2.0 * (J.transpose() * J);
    qp.H.diagonal().array() += 2.0 * kRegularization;
    qp.g = 2.0 * (J.transpose() * kappa);
    for (std::size_t j = 0; j < m; ++j) {
      const auto e = static_cast<Eigen::Index>(j);
      qp.lb[e] = std::max(grid.lo[j] - a[j], -kTrustRadius);
      qp.ub[e] = std::min(grid.hi[j] - a[j], kTrustRadius);
    }
    const QpResult res = solve_qp(qp, {80, 1e-9});
    if (res.status == QpStatus::numerical_error) break;

    double step = 1.0;
    bool improved = false;
    std::vector<double> trial(m);
    for (int ls = 0; ls < 12; ++ls, step *= 0.5) {
      for (std::size_t j = 0; j < m; ++j) {
        trial[j] = std::clamp(a[j] + step * res.z[static_cast<Eigen::Index>(j)], grid.lo[j], grid.hi[j]);
      }
      const Eigen::VectorXd k_trial = curvature_vector(grid, trial);
      const double obj = k_trial.squaredNorm();
      if (obj < objective) {
        const double change = step * res.z.lpNorm<Eigen::Infinity>();
        a = trial;
        kappa = k_trial;
        const double rel = (objective - obj) / std::max(objective, 1e-12);
        objective = obj;
        improved = true;
        if (change < kStepTolerance || rel < 1e-10) converged = true;
        break;
      }
    }
    if (!improved) converged = true;
  }

  const double center_rms = rms(c.curvatures());
  std::vector<double> offsets;
  for (double scale : {1.0, 0.75, 0.5, 0.25, 0.0}) {
    std::vector<double> scaled(m);
    for (std::size_t j = 0; j < m; ++j) scaled[j] = scale * a[j];
    offsets = scale > 0.0 ? interpolate_fine(track, grid, scaled) : std::vector<double>(n, 0.0);
    if (scale == 0.0 || rms(offset_curve_curvature(track, offsets)) <= center_rms) break;
  }

  const auto curv = offset_curve_curvature(track, offsets);
  std::vector<double> speeds(n);
  for (std::size_t i = 0; i < n; ++i) speeds[i] = speed_reference(curv[i], alat_max, v_cap);

  TrackGeometry out = track;
  out.raceline = make_raceline(track, std::move(offsets), std::move(speeds));
  out.raceline->converged = converged;
  out.raceline->iterations = iterations;
  return out;
}

}  // namespace driverl
