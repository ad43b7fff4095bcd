#include "mcstfa/aecm.hpp"

#include <cmath>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mcstfa/densities.hpp"
#include "mcstfa/gig.hpp"
#include "mcstfa/specfun.hpp"

namespace mcstfa::aecm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Per-component quadratic forms shared by the E-step and the CM updates.
// All O(n p q); no p x p matrix is formed.
struct ComponentWork {
  densities::ScaleOps ops;
  VectorXd mean;           // Lambda xi_g
  VectorXd alpha;          // Lambda zeta_g
  double alpha_quad = 0;   // alpha' Sigma^-1 alpha
  MatrixXd w;              // Lambda' Sigma^-1 Lambda, q x q
  MatrixXd t;              // n x q, rows t_i = Lambda' Sigma^-1 x_i
  VectorXd delta;          // squared Mahalanobis distances
  VectorXd cross;          // (x_i - mean)' Sigma^-1 alpha
};

ComponentWork make_work(const MatrixXd& x, const model::MixtureParams& params,
                        int g) {
  ComponentWork cw{densities::ScaleOps(densities::LowRankScale{
                       params.loadings, params.factor_covs[g],
                       params.noise_diag}),
                   {}, {}, 0, {}, {}, {}, {}};
  const int n = static_cast<int>(x.rows());
  cw.mean = params.loadings * params.factor_means[g];
  cw.alpha = params.loadings * params.factor_skews[g];
  const VectorXd sia = cw.ops.solve(cw.alpha);
  cw.alpha_quad = cw.alpha.dot(sia);
  const MatrixXd sinv_loadings = cw.ops.solve(params.loadings);
  cw.w = params.loadings.transpose() * sinv_loadings;
  cw.t = x * sinv_loadings;
  MatrixXd centered = x.rowwise() - cw.mean.transpose();
  MatrixXd solved = cw.ops.solve(MatrixXd(centered.transpose()));  // p x n
  cw.delta = (centered.transpose().array() * solved.array())
                 .colwise()
                 .sum()
                 .transpose()
                 .cwiseMax(0.0);
  cw.cross = centered * sia;
  (void)n;
  return cw;
}

double log_sum_exp_row(const Eigen::RowVectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

}  // namespace

EStepQuantities e_step(const model::DataMatrix& data,
                       const model::MixtureParams& params, int threads) {
  const int n = data.n(), p = data.p(), G = params.n_components();
  const int q = params.q();
  std::vector<ComponentWork> works;
  works.reserve(G);
  for (int g = 0; g < G; ++g) works.push_back(make_work(data.values, params, g));

  EStepQuantities eq;
  eq.z.resize(n, G);
  eq.a.resize(n, G);
  eq.b.resize(n, G);
  eq.c.resize(n, G);
  VectorXd lse(n);
  const VectorXd log_w = params.weights.array().log();
  const int nthreads = resolve_threads(threads);

  bool failed = false;
  std::string error;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      Eigen::RowVectorXd logd(G);
      for (int g = 0; g < G; ++g) {
        const ComponentWork& cw = works[g];
        const double nu = params.dof(g);
        logd(g) = densities::log_density_skew_t_core(
                      cw.delta(i), cw.alpha_quad, cw.cross(i),
                      cw.ops.log_det(), p, nu) +
                  log_w(g);
        const gig::GigMoments m = gig::gig_moments(
            gig::posterior_y_params(cw.alpha_quad, cw.delta(i), nu, p));
        eq.a(i, g) = m.e_y;
        eq.b(i, g) = m.e_inv_y;
        eq.c(i, g) = m.e_log_y;
      }
      if (!logd.allFinite())
        throw std::runtime_error("non-finite component log density");
      lse(i) = log_sum_exp_row(logd);
      eq.z.row(i) = (logd.array() - lse(i)).exp();
    } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
      {
        failed = true;
        error = "e_step: row " + std::to_string(i) + ": " + e.what();
      }
    }
  }
  if (failed) throw std::runtime_error(error);

  eq.loglik = lse.sum();
  eq.n_g = eq.z.colwise().sum();
  for (int g = 0; g < G; ++g)
    if (eq.n_g(g) < q + 1)
      throw ComponentCollapseError(
          "e_step: component " + std::to_string(g) +
          " collapsed (effective size " + std::to_string(eq.n_g(g)) + ")");
  eq.a_bar = (eq.z.array() * eq.a.array()).colwise().sum().transpose();
  eq.b_bar = (eq.z.array() * eq.b.array()).colwise().sum().transpose();
  eq.a_bar.array() /= eq.n_g.array();
  eq.b_bar.array() /= eq.n_g.array();
  eq.m_g = eq.n_g.array() * (eq.a_bar.array() * eq.b_bar.array() - 1.0);
  return eq;
}

namespace {

// Stationarity condition of the expected complete-data log-likelihood in
// nu: log(nu/2) + 1 - digamma(nu/2) - s = 0, with
// s = (1/n_g) sum_i z_ig (b_ig + c_ig). Strictly decreasing in nu.
double solve_dof(double s, double lo, double hi) {
  auto f = [s](double nu) {
    return std::log(nu / 2.0) + 1.0 - specfun::digamma(nu / 2.0) - s;
  };
  if (f(lo) <= 0.0) return lo;
  if (f(hi) >= 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-8 * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

VectorXd solve_spd(const MatrixXd& m, const VectorXd& rhs,
                   const char* context) {
  Eigen::LDLT<MatrixXd> ldlt(m);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive())
    return ldlt.solve(rhs);
  std::cerr << "mcstfa: warning: ill-conditioned system in " << context
            << ", using regularized solve\n";
  const int q = static_cast<int>(m.rows());
  const double ridge = 1e-10 * std::max(1.0, m.trace() / q);
  return (m + ridge * MatrixXd::Identity(q, q)).ldlt().solve(rhs);
}

}  // namespace

void cm_step_1(const model::DataMatrix& data, model::MixtureParams& params,
               const EStepQuantities& eq, const FitConfig& config) {
  const int n = data.n(), G = params.n_components();
  params.weights = eq.n_g / static_cast<double>(n);

  for (int g = 0; g < G; ++g) {
    const ComponentWork cw = make_work(data.values, params, g);
    const VectorXd zb = eq.z.col(g).cwiseProduct(eq.b.col(g));
    const VectorXd s_bt = cw.t.transpose() * zb;
    const VectorXd s_t = cw.t.transpose() * eq.z.col(g);
    const double ng = eq.n_g(g);
    const double sa = eq.a_bar(g) * ng;
    const double sb = eq.b_bar(g) * ng;
    const double denom = sa * sb - ng * ng;  // >= 0 since a_ig b_ig >= 1

    if (config.skew && denom > 1e-12 * sa * sb) {
      // Joint maximizer for (xi, zeta); equivalently the z-weighted
      // (1/m_g) sum (gamma' Lambda)^-1 gamma' x_i (a_bar b_ig - 1) form.
      params.factor_means[g] =
          solve_spd(cw.w, (sa * s_bt - ng * s_t) / denom, "xi update");
      params.factor_skews[g] =
          solve_spd(cw.w, (sb * s_t - ng * s_bt) / denom, "zeta update");
    } else {
      params.factor_means[g] = solve_spd(cw.w, s_bt / sb, "xi update");
      params.factor_skews[g].setZero();
    }

    if (config.fixed_dof) {
      params.dof(g) = *config.fixed_dof;
    } else {
      const double s =
          eq.z.col(g).dot((eq.b.col(g) + eq.c.col(g)).eval()) / ng;
      params.dof(g) = solve_dof(s, config.min_dof, config.max_dof);
    }
  }
}

void cm_step_2(const model::DataMatrix& data, model::MixtureParams& params,
               const EStepQuantities& eq, const FitConfig& config) {
  (void)config;
  const int n = data.n(), G = params.n_components();
  const int p = params.p(), q = params.q();
  const MatrixXd& x = data.values;

  MatrixXd f_acc = MatrixXd::Zero(p, q);
  MatrixXd h_acc = MatrixXd::Zero(q, q);
  VectorXd d_acc = VectorXd::Zero(p);
  const MatrixXd x_sq = x.array().square();

  struct OmegaWork {
    MatrixXd eta;    // n x q, eta_ig = xi + gamma'(x_i - Lambda xi)
    VectorXd zb;     // z_ig b_ig
    VectorXd w_vec;  // gamma' Lambda zeta
    MatrixXd cond_cov;  // (I - gamma' Lambda) Omega
  };
  std::vector<OmegaWork> ow(G);

  for (int g = 0; g < G; ++g) {
    const ComponentWork cw = make_work(x, params, g);
    const MatrixXd& omega = params.factor_covs[g];
    const VectorXd& xi = params.factor_means[g];
    const VectorXd& zeta = params.factor_skews[g];
    const MatrixXd omega_w = omega * cw.w;  // gamma' Lambda
    const VectorXd k_zeta = zeta - omega_w * zeta;

    ow[g].eta = (cw.t * omega).rowwise() + (xi - omega_w * xi).transpose();
    ow[g].zb = eq.z.col(g).cwiseProduct(eq.b.col(g));
    ow[g].w_vec = omega_w * zeta;
    ow[g].cond_cov = omega - omega_w * omega;
    ow[g].cond_cov = 0.5 * (ow[g].cond_cov + ow[g].cond_cov.transpose());

    const VectorXd xz = x.transpose() * eq.z.col(g);
    const VectorXd u = ow[g].eta.transpose() * eq.z.col(g);
    f_acc += x.transpose() * ow[g].zb.asDiagonal() * ow[g].eta +
             xz * k_zeta.transpose();
    h_acc += ow[g].eta.transpose() * ow[g].zb.asDiagonal() * ow[g].eta +
             u * k_zeta.transpose() + k_zeta * u.transpose() +
             eq.a_bar(g) * eq.n_g(g) * k_zeta * k_zeta.transpose() +
             eq.n_g(g) * ow[g].cond_cov;
    d_acc += x_sq.transpose() * ow[g].zb;
  }

  h_acc = 0.5 * (h_acc + h_acc.transpose());
  Eigen::LDLT<MatrixXd> h_ldlt(h_acc);
  if (h_ldlt.info() != Eigen::Success)
    throw std::runtime_error("cm_step_2: singular loading system");
  const MatrixXd lam_new = h_ldlt.solve(f_acc.transpose()).transpose();

  // Psi diagonal; cross terms cancel against the Lambda stationarity.
  const double psi_floor =
      1e-6 * std::max(1e-12, (x.rowwise() - x.colwise().mean())
                                 .array()
                                 .square()
                                 .colwise()
                                 .mean()
                                 .mean());
  VectorXd psi_new =
      (d_acc - lam_new.cwiseProduct(f_acc).rowwise().sum()) / n;
  psi_new = psi_new.cwiseMax(psi_floor);

  for (int g = 0; g < G; ++g) {
    const VectorXd& xi = params.factor_means[g];
    const MatrixXd r = ow[g].eta.rowwise() - xi.transpose();
    const double ng = eq.n_g(g);
    const VectorXd rz = r.transpose() * eq.z.col(g) / ng;
    const VectorXd& w = ow[g].w_vec;
    MatrixXd omega_new =
        r.transpose() * ow[g].zb.asDiagonal() * r / ng -
        rz * w.transpose() - w * rz.transpose() +
        eq.a_bar(g) * w * w.transpose() + ow[g].cond_cov;
    omega_new = 0.5 * (omega_new + omega_new.transpose());
    // Project to SPD by eigenvalue flooring.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(omega_new);
    const double floor = 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff());
    params.factor_covs[g] =
        es.eigenvectors() *
        es.eigenvalues().cwiseMax(floor).asDiagonal() *
        es.eigenvectors().transpose();
  }

  params.loadings = lam_new;
  params.noise_diag = psi_new;
  model::orthonormalize_loadings(params);
}

AitkenResult aitken_update(const std::vector<double>& history,
                           double epsilon) {
  AitkenResult res;
  const size_t m = history.size();
  if (m < 3) return res;
  const double l0 = history[m - 3], l1 = history[m - 2], l2 = history[m - 1];
  const double d0 = l1 - l0, d1 = l2 - l1;
  const double tiny = 1e-12 * (1.0 + std::fabs(l2));
  if (std::fabs(d0) < tiny) {
    res.l_inf = l2;
    res.converged = std::fabs(d1) < tiny;  // plain-delta fallback
    return res;
  }
  res.a_t = d1 / d0;
  if (res.a_t >= 1.0) return res;  // diverging extrapolation: keep going
  res.l_inf = l1 + d1 / (1.0 - res.a_t);
  const double gap = res.l_inf - l2;
  res.converged = gap >= 0.0 && gap < epsilon;
  return res;
}

long free_parameter_count(int p, int q, int G, bool skew) {
  long count = model::count_free_parameters(model::ModelId::MCStFA, p, q, G);
  if (!skew) count -= static_cast<long>(G) * q;  // zeta_g pinned at zero
  return count;
}

FitResult fit(const model::DataMatrix& data, const model::MixtureParams& init,
              const FitConfig& config) {
  data.validate();
  init.validate();
  const int n = data.n(), p = data.p();
  const int G = init.n_components(), q = init.q();
  if (q < 1 || q >= p)
    throw std::invalid_argument("fit: requires 1 <= q < p");
  if (n <= G * (q + 1))
    throw std::invalid_argument("fit: too few observations for (G, q)");

  model::MixtureParams params = init;
  if (!config.skew)
    for (auto& zeta : params.factor_skews) zeta.setZero();
  if (config.fixed_dof) params.dof.setConstant(*config.fixed_dof);

  FitResult result;
  EStepQuantities eq = e_step(data, params, config.threads);
  result.loglik_trace.push_back(eq.loglik);

  for (int iter = 0; iter < config.max_iter; ++iter) {
    cm_step_1(data, params, eq, config);
    EStepQuantities eq2 = e_step(data, params, config.threads);
    cm_step_2(data, params, eq2, config);
    eq = e_step(data, params, config.threads);
    result.loglik_trace.push_back(eq.loglik);
    result.iterations = iter + 1;
    if (aitken_update(result.loglik_trace, config.epsilon).converged) {
      result.converged = true;
      break;
    }
  }

  // Deterministic output ordering: sort components, permute the E-step
  // quantities to match.
  const std::vector<int> order = model::sort_components(params);
  result.params = std::move(params);
  result.loglik = result.loglik_trace.back();
  result.n_free_parameters = free_parameter_count(p, q, G, config.skew);
  result.bic = 2.0 * result.loglik -
               result.n_free_parameters * std::log(static_cast<double>(n));
  result.responsibilities.resize(n, G);
  for (int g = 0; g < G; ++g)
    result.responsibilities.col(g) = eq.z.col(order[g]);
  result.hard_labels.resize(n);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    result.responsibilities.row(i).maxCoeff(&best);
    result.hard_labels[i] = best;
  }
  return result;
}

}  // namespace mcstfa::aecm
