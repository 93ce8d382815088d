#include "driverl/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace driverl {

QpProblem::QpProblem(Eigen::Index n)
    : H(Eigen::MatrixXd::Zero(n, n)),
      g(Eigen::VectorXd::Zero(n)),
      lb(Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity())),
      ub(Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity())),
      G_hard(0, n),
      h_hard(0),
      G_soft(0, n),
      h_soft(0),
      rho1(0),
      rho2(0) {}

namespace {

using Eigen::Index;
using Eigen::VectorXd;

struct Iterate {
  VectorXd z;
  VectorXd t_h, l_h;
  VectorXd t_s, l_s, sig, nu;
  VectorXd t_u, l_u;
  VectorXd t_l, l_l;
};

struct Residuals {
  VectorXd d, sig, ph, ps, pu, pl;
};

double max_step(const VectorXd& x, const VectorXd& dx) {
  double a = 1.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
  }
  return a;
}

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

}  // namespace

QpResult solve_qp(const QpProblem& p, const QpOptions& options, const VectorXd& warm_start) {
  const Index n = p.g.size();
  const Index mh = p.h_hard.size();
  const Index ms = p.h_soft.size();

  std::vector<Index> iu, il;
  for (Index j = 0; j < n; ++j) {
    if (std::isfinite(p.ub[j])) iu.push_back(j);
    if (std::isfinite(p.lb[j])) il.push_back(j);
  }
  const Index mu_n = static_cast<Index>(iu.size());
  const Index ml_n = static_cast<Index>(il.size());
  const double pairs = static_cast<double>(mh + 2 * ms + mu_n + ml_n);

  Iterate x;
  x.z = warm_start.size() == n ? warm_start : VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    const double lo = p.lb[j], hi = p.ub[j];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double pad = std::min(1e-3, 0.25 * (hi - lo));
      x.z[j] = std::clamp(x.z[j], lo + pad, hi - pad);
    } else if (std::isfinite(lo)) {
      x.z[j] = std::max(x.z[j], lo + 1e-3);
    } else if (std::isfinite(hi)) {
      x.z[j] = std::min(x.z[j], hi - 1e-3);
    }
  }
  auto init_slack = [](const VectorXd& gap) { return gap.cwiseMax(1.0).eval(); };
  x.t_h = init_slack(p.h_hard - p.G_hard * x.z);
  x.l_h = VectorXd::Ones(mh);
  x.t_s = init_slack(p.h_soft - p.G_soft * x.z);
  x.l_s = VectorXd::Ones(ms);
  x.sig = (p.G_soft * x.z - p.h_soft).cwiseMax(0.0).array() + 1.0;
  x.nu = VectorXd::Ones(ms);
  x.t_u.resize(mu_n);
  x.t_l.resize(ml_n);
  for (Index k = 0; k < mu_n; ++k) x.t_u[k] = std::max(p.ub[iu[k]] - x.z[iu[k]], 1e-3);
  for (Index k = 0; k < ml_n; ++k) x.t_l[k] = std::max(x.z[il[k]] - p.lb[il[k]], 1e-3);
  x.l_u = VectorXd::Ones(mu_n);
  x.l_l = VectorXd::Ones(ml_n);

  const double dual_scale = 1.0 + std::max(inf_norm(p.g), p.H.size() ? p.H.cwiseAbs().maxCoeff() : 0.0);

  auto residuals = [&](const Iterate& it) {
    Residuals r;
    r.d = p.H * it.z + p.g;
    if (mh) r.d.noalias() += p.G_hard.transpose() * it.l_h;
    if (ms) r.d.noalias() += p.G_soft.transpose() * it.l_s;
    for (Index k = 0; k < mu_n; ++k) r.d[iu[k]] += it.l_u[k];
    for (Index k = 0; k < ml_n; ++k) r.d[il[k]] -= it.l_l[k];
    r.sig = p.rho1 + p.rho2.cwiseProduct(it.sig) - it.l_s - it.nu;
    r.ph = p.G_hard * it.z + it.t_h - p.h_hard;
    r.ps = p.G_soft * it.z - it.sig + it.t_s - p.h_soft;
    r.pu.resize(mu_n);
    r.pl.resize(ml_n);
    for (Index k = 0; k < mu_n; ++k) r.pu[k] = it.z[iu[k]] + it.t_u[k] - p.ub[iu[k]];
    for (Index k = 0; k < ml_n; ++k) r.pl[k] = -it.z[il[k]] + it.t_l[k] + p.lb[il[k]];
    return r;
  };
  auto complementarity = [&](const Iterate& it) {
    if (pairs == 0.0) return 0.0;
    return (it.t_h.dot(it.l_h) + it.t_s.dot(it.l_s) + it.sig.dot(it.nu) + it.t_u.dot(it.l_u) +
            it.t_l.dot(it.l_l)) /
           pairs;
  };
  auto kkt = [&](const Residuals& r, double mu) {
    const double primal =
        std::max({inf_norm(r.ph), inf_norm(r.ps), inf_norm(r.pu), inf_norm(r.pl)});
    const double dual = std::max(inf_norm(r.d), inf_norm(r.sig)) / dual_scale;
    return std::max({primal, dual, mu});
  };

  QpResult result;
  Eigen::MatrixXd K(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd WG;

  Residuals r = residuals(x);
  double mu = complementarity(x);
  result.kkt_residual = kkt(r, mu);
  result.status = QpStatus::max_iter;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (result.kkt_residual <= options.tolerance) {
      result.status = QpStatus::solved;
      break;
    }
    result.iterations = iter + 1;

    const VectorXd D_h = x.l_h.cwiseQuotient(x.t_h);
    const VectorXd D_s = x.l_s.cwiseQuotient(x.t_s);
    const VectorXd D_u = x.l_u.cwiseQuotient(x.t_u);
    const VectorXd D_l = x.l_l.cwiseQuotient(x.t_l);
    const VectorXd P = p.rho2 + D_s + x.nu.cwiseQuotient(x.sig);
    const VectorXd W_s = D_s - D_s.cwiseProduct(D_s).cwiseQuotient(P);

    K = p.H;
    if (mh) {
      WG = D_h.asDiagonal() * p.G_hard;
      K.noalias() += p.G_hard.transpose() * WG;
    }
    if (ms) {
      WG = W_s.asDiagonal() * p.G_soft;
      K.noalias() += p.G_soft.transpose() * WG;
    }
    for (Index k = 0; k < mu_n; ++k) K(iu[k], iu[k]) += D_u[k];
    for (Index k = 0; k < ml_n; ++k) K(il[k], il[k]) += D_l[k];
    llt.compute(K);
    if (llt.info() != Eigen::Success) {
      K.diagonal().array() += 1e-9 * (1.0 + K.diagonal().cwiseAbs().maxCoeff());
      llt.compute(K);
      if (llt.info() != Eigen::Success) {
        result.status = QpStatus::numerical_error;
        break;
      }
    }

    // Solves the Newton system for given complementarity right-hand sides.
    auto direction = [&](const VectorXd& rc_h, const VectorXd& rc_s, const VectorXd& rc_sig,
                         const VectorXd& rc_u, const VectorXd& rc_l) {
      Iterate d;
      const VectorXd e_h = (x.l_h.cwiseProduct(r.ph) - rc_h).cwiseQuotient(x.t_h);
      const VectorXd e_s = (x.l_s.cwiseProduct(r.ps) - rc_s).cwiseQuotient(x.t_s);
      const VectorXd e_u = (x.l_u.cwiseProduct(r.pu) - rc_u).cwiseQuotient(x.t_u);
      const VectorXd e_l = (x.l_l.cwiseProduct(r.pl) - rc_l).cwiseQuotient(x.t_l);
      const VectorXd q = -r.sig + e_s - rc_sig.cwiseQuotient(x.sig);

      VectorXd rhs = -r.d;
      if (mh) rhs.noalias() -= p.G_hard.transpose() * e_h;
      if (ms) rhs.noalias() -= p.G_soft.transpose() * (e_s - D_s.cwiseProduct(q).cwiseQuotient(P));
      for (Index k = 0; k < mu_n; ++k) rhs[iu[k]] -= e_u[k];
      for (Index k = 0; k < ml_n; ++k) rhs[il[k]] += e_l[k];
      d.z = llt.solve(rhs);

      const VectorXd y_h = p.G_hard * d.z;
      d.t_h = -r.ph - y_h;
      d.l_h = D_h.cwiseProduct(y_h) + e_h;

      const VectorXd y_s = p.G_soft * d.z;
      d.sig = (D_s.cwiseProduct(y_s) + q).cwiseQuotient(P);
      d.t_s = -r.ps - y_s + d.sig;
      d.l_s = (-rc_s - x.l_s.cwiseProduct(d.t_s)).cwiseQuotient(x.t_s);
      d.nu = (-rc_sig - x.nu.cwiseProduct(d.sig)).cwiseQuotient(x.sig);

      d.t_u.resize(mu_n);
      d.t_l.resize(ml_n);
      for (Index k = 0; k < mu_n; ++k) d.t_u[k] = -r.pu[k] - d.z[iu[k]];
      for (Index k = 0; k < ml_n; ++k) d.t_l[k] = -r.pl[k] + d.z[il[k]];
      d.l_u = (-rc_u - x.l_u.cwiseProduct(d.t_u)).cwiseQuotient(x.t_u);
      d.l_l = (-rc_l - x.l_l.cwiseProduct(d.t_l)).cwiseQuotient(x.t_l);
      return d;
    };
    auto step_length = [&](const Iterate& d) {
      return std::min({max_step(x.t_h, d.t_h), max_step(x.l_h, d.l_h), max_step(x.t_s, d.t_s),
                       max_step(x.l_s, d.l_s), max_step(x.sig, d.sig), max_step(x.nu, d.nu),
                       max_step(x.t_u, d.t_u), max_step(x.l_u, d.l_u), max_step(x.t_l, d.t_l),
                       max_step(x.l_l, d.l_l)});
    };

    // Predictor.
    const VectorXd c_h = x.t_h.cwiseProduct(x.l_h);
    const VectorXd c_s = x.t_s.cwiseProduct(x.l_s);
    const VectorXd c_sig = x.sig.cwiseProduct(x.nu);
    const VectorXd c_u = x.t_u.cwiseProduct(x.l_u);
    const VectorXd c_l = x.t_l.cwiseProduct(x.l_l);
    const Iterate aff = direction(c_h, c_s, c_sig, c_u, c_l);
    const double a_aff = step_length(aff);
    double mu_aff = 0.0;
    if (pairs > 0.0) {
      mu_aff = ((x.t_h + a_aff * aff.t_h).dot(x.l_h + a_aff * aff.l_h) +
                (x.t_s + a_aff * aff.t_s).dot(x.l_s + a_aff * aff.l_s) +
                (x.sig + a_aff * aff.sig).dot(x.nu + a_aff * aff.nu) +
                (x.t_u + a_aff * aff.t_u).dot(x.l_u + a_aff * aff.l_u) +
                (x.t_l + a_aff * aff.t_l).dot(x.l_l + a_aff * aff.l_l)) /
               pairs;
    }
    const double centering = mu > 0.0 ? std::pow(mu_aff / mu, 3.0) : 0.0;
    const double target = centering * mu;

    // Corrector.
    const Iterate d = direction(
        (c_h + aff.t_h.cwiseProduct(aff.l_h)).array() - target,
        (c_s + aff.t_s.cwiseProduct(aff.l_s)).array() - target,
        (c_sig + aff.sig.cwiseProduct(aff.nu)).array() - target,
        (c_u + aff.t_u.cwiseProduct(aff.l_u)).array() - target,
        (c_l + aff.t_l.cwiseProduct(aff.l_l)).array() - target);
    const double alpha = std::min(1.0, 0.995 * step_length(d));

    x.z += alpha * d.z;
    x.t_h += alpha * d.t_h;
    x.l_h += alpha * d.l_h;
    x.t_s += alpha * d.t_s;
    x.l_s += alpha * d.l_s;
    x.sig += alpha * d.sig;
    x.nu += alpha * d.nu;
    x.t_u += alpha * d.t_u;
    x.l_u += alpha * d.l_u;
    x.t_l += alpha * d.t_l;
    x.l_l += alpha * d.l_l;

    if (!x.z.allFinite()) {
      result.status = QpStatus::numerical_error;
      break;
    }
    r = residuals(x);
    mu = complementarity(x);
    result.kkt_residual = kkt(r, mu);
    if (result.kkt_residual <= options.tolerance) result.status = QpStatus::solved;
  }

  result.z = x.z;
  result.sigma = x.sig;
  result.objective = 0.5 * x.z.dot(p.H * x.z) + p.g.dot(x.z) + p.rho1.dot(x.sig) +
                     0.5 * x.sig.dot(p.rho2.cwiseProduct(x.sig));
  return result;
}

}  // namespace driverl
