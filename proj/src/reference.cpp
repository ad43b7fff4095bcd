#include "mcstfa/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "mcstfa/gig.hpp"
#include "mcstfa/specfun.hpp"

namespace mcstfa::reference {

namespace {
using Eigen::MatrixXd;
using Eigen::VectorXd;
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

MatrixXd dense_scale(const model::MixtureParams& params, int g) {
  return params.loadings * params.factor_covs[g] * params.loadings.transpose() +
         MatrixXd(params.noise_diag.asDiagonal());
}

double log_density_skew_t_dense(const VectorXd& x, const VectorXd& mu,
                                const MatrixXd& sigma, const VectorXd& alpha,
                                double nu) {
  const int p = static_cast<int>(x.size());
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_density_skew_t_dense: scale not SPD");
  double log_det = 0.0;
  for (int j = 0; j < p; ++j) log_det += 2.0 * std::log(llt.matrixL()(j, j));

  const VectorXd d = x - mu;
  const VectorXd sid = llt.solve(d);
  const VectorXd sia = llt.solve(alpha);
  const double delta = d.dot(sid);
  const double aqa = alpha.dot(sia);
  const double cross = d.dot(sia);

  if (aqa < 1e-12) {
    return specfun::log_gamma((nu + p) / 2.0) - specfun::log_gamma(nu / 2.0) -
           0.5 * p * std::log(nu * kPi) - 0.5 * log_det -
           0.5 * (nu + p) * std::log1p(delta / nu);
  }
  const double order = (nu + p) / 2.0;
  return -0.5 * order * std::log((nu + delta) / aqa) +
         0.5 * nu * std::log(nu) +
         specfun::log_bessel_k(order, std::sqrt(aqa * (nu + delta))) -
         0.5 * p * kLog2Pi - 0.5 * log_det - specfun::log_gamma(nu / 2.0) -
         (0.5 * nu - 1.0) * kLn2 + cross;
}

double mixture_log_density(const VectorXd& x,
                           const model::MixtureParams& params) {
  const int G = params.n_components();
  VectorXd lds(G);
  for (int g = 0; g < G; ++g) {
    lds(g) = std::log(params.weights(g)) +
             log_density_skew_t_dense(
                 x, params.loadings * params.factor_means[g],
                 dense_scale(params, g),
                 params.loadings * params.factor_skews[g], params.dof(g));
  }
  const double m = lds.maxCoeff();
  return m + std::log((lds.array() - m).exp().sum());
}

double observed_loglik(const model::DataMatrix& data,
                       const model::MixtureParams& params) {
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i)
    total += reference::mixture_log_density(data.values.row(i).transpose(),
                                            params);
  return total;
}

Eigen::MatrixXd posterior_responsibilities(const model::DataMatrix& data,
                                           const model::MixtureParams& params) {
  const int n = data.n(), G = params.n_components();
  MatrixXd z(n, G);
  for (int i = 0; i < n; ++i) {
    VectorXd lds(G);
    const VectorXd x = data.values.row(i).transpose();
    for (int g = 0; g < G; ++g) {
      lds(g) = std::log(params.weights(g)) +
               log_density_skew_t_dense(
                   x, params.loadings * params.factor_means[g],
                   dense_scale(params, g),
                   params.loadings * params.factor_skews[g], params.dof(g));
    }
    const double m = lds.maxCoeff();
    const double lse = m + std::log((lds.array() - m).exp().sum());
    z.row(i) = (lds.array() - lse).exp();
  }
  return z;
}

aecm::EStepQuantities e_step(const model::DataMatrix& data,
                             const model::MixtureParams& params) {
  const int n = data.n(), p = data.p(), G = params.n_components();
  aecm::EStepQuantities eq;
  eq.z.resize(n, G);
  eq.a.resize(n, G);
  eq.b.resize(n, G);
  eq.c.resize(n, G);

  std::vector<MatrixXd> sigma_inv(G);
  std::vector<VectorXd> means(G), alphas(G);
  std::vector<double> aqa(G);
  for (int g = 0; g < G; ++g) {
    const MatrixXd sigma = dense_scale(params, g);
    sigma_inv[g] = sigma.llt().solve(MatrixXd::Identity(p, p));
    means[g] = params.loadings * params.factor_means[g];
    alphas[g] = params.loadings * params.factor_skews[g];
    aqa[g] = alphas[g].dot(sigma_inv[g] * alphas[g]);
  }

  double loglik = 0.0;
  for (int i = 0; i < n; ++i) {
    const VectorXd x = data.values.row(i).transpose();
    VectorXd lds(G);
    for (int g = 0; g < G; ++g) {
      lds(g) = std::log(params.weights(g)) +
               log_density_skew_t_dense(x, means[g], dense_scale(params, g),
                                        alphas[g], params.dof(g));
      const VectorXd d = x - means[g];
      const double delta = d.dot(sigma_inv[g] * d);
      const gig::GigMoments m = gig::gig_moments(
          gig::posterior_y_params(aqa[g], delta, params.dof(g), p));
      eq.a(i, g) = m.e_y;
      eq.b(i, g) = m.e_inv_y;
      eq.c(i, g) = m.e_log_y;
    }
    const double m = lds.maxCoeff();
    const double lse = m + std::log((lds.array() - m).exp().sum());
    loglik += lse;
    eq.z.row(i) = (lds.array() - lse).exp();
  }

  eq.loglik = loglik;
  eq.n_g = eq.z.colwise().sum();
  eq.a_bar = (eq.z.array() * eq.a.array()).colwise().sum().transpose();
  eq.b_bar = (eq.z.array() * eq.b.array()).colwise().sum().transpose();
  eq.a_bar.array() /= eq.n_g.array();
  eq.b_bar.array() /= eq.n_g.array();
  eq.m_g = eq.n_g.array() * (eq.a_bar.array() * eq.b_bar.array() - 1.0);
  return eq;
}

}  // namespace mcstfa::reference
