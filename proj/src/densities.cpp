#include "mcstfa/densities.hpp"

#include <cmath>
#include <stdexcept>

#include "mcstfa/specfun.hpp"

namespace mcstfa::densities {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLn2 = 0.69314718055994530942;
}  // namespace

ScaleOps::ScaleOps(const LowRankScale& scale) : low_rank_(true) {
  const auto& lam = scale.loadings;
  const auto& omega = scale.factor_cov;
  const auto& psi = scale.noise_diag;
  p_ = static_cast<int>(lam.rows());
  const int q = static_cast<int>(lam.cols());
  if (omega.rows() != q || omega.cols() != q || psi.size() != p_ || q > p_)
    throw std::invalid_argument("ScaleOps: inconsistent low-rank dimensions");
  if ((psi.array() <= 0.0).any())
    throw std::runtime_error("ScaleOps: non-positive noise variance");

  psi_inv_ = psi.cwiseInverse();
  psi_inv_loadings_ = psi_inv_.asDiagonal() * lam;

  Eigen::LLT<Eigen::MatrixXd> omega_llt(omega);
  if (omega_llt.info() != Eigen::Success)
    throw std::runtime_error("ScaleOps: factor covariance is not SPD");
  Eigen::MatrixXd omega_inv =
      omega_llt.solve(Eigen::MatrixXd::Identity(q, q));
  Eigen::MatrixXd m = omega_inv + lam.transpose() * psi_inv_loadings_;
  m_llt_.compute(m);
  if (m_llt_.info() != Eigen::Success)
    throw std::runtime_error("ScaleOps: Woodbury inner matrix is not SPD");

  double log_det_omega = 0.0, log_det_m = 0.0;
  for (int j = 0; j < q; ++j) {
    log_det_omega += 2.0 * std::log(omega_llt.matrixL()(j, j));
    log_det_m += 2.0 * std::log(m_llt_.matrixL()(j, j));
  }
  log_det_ = psi.array().log().sum() + log_det_omega + log_det_m;
}

ScaleOps::ScaleOps(const Eigen::MatrixXd& sigma) : low_rank_(false) {
  p_ = static_cast<int>(sigma.rows());
  if (sigma.cols() != p_)
    throw std::invalid_argument("ScaleOps: sigma must be square");
  sigma_llt_.compute(sigma);
  if (sigma_llt_.info() != Eigen::Success)
    throw std::runtime_error("ScaleOps: scale matrix is not SPD");
  log_det_ = 0.0;
  for (int j = 0; j < p_; ++j)
    log_det_ += 2.0 * std::log(sigma_llt_.matrixL()(j, j));
}

Eigen::VectorXd ScaleOps::solve(const Eigen::VectorXd& v) const {
  if (!low_rank_) return sigma_llt_.solve(v);
  Eigen::VectorXd w = psi_inv_loadings_.transpose() * v;
  return psi_inv_.cwiseProduct(v) - psi_inv_loadings_ * m_llt_.solve(w);
}

Eigen::MatrixXd ScaleOps::solve(const Eigen::MatrixXd& m) const {
  if (!low_rank_) return sigma_llt_.solve(m);
  Eigen::MatrixXd w = psi_inv_loadings_.transpose() * m;
  return psi_inv_.asDiagonal() * m - psi_inv_loadings_ * m_llt_.solve(w);
}

double ScaleOps::quad(const Eigen::VectorXd& v) const {
  if (!low_rank_) return v.dot(sigma_llt_.solve(v));
  Eigen::VectorXd w = psi_inv_loadings_.transpose() * v;
  return v.dot(psi_inv_.cwiseProduct(v)) - w.dot(m_llt_.solve(w));
}

double ScaleOps::mahalanobis(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& mu) const {
  return quad(x - mu);
}

double mahalanobis(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                   const Eigen::MatrixXd& sigma) {
  return ScaleOps(sigma).mahalanobis(x, mu);
}

double mahalanobis(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                   const LowRankScale& scale) {
  return ScaleOps(scale).mahalanobis(x, mu);
}

double log_density_t_core(double delta, double log_det, int p, double nu) {
  return specfun::log_gamma((nu + p) / 2.0) - specfun::log_gamma(nu / 2.0) -
         0.5 * p * std::log(nu * 3.14159265358979323846) - 0.5 * log_det -
         0.5 * (nu + p) * std::log1p(delta / nu);
}

double log_density_skew_t_core(double delta, double alpha_quad, double cross,
                               double log_det, int p, double nu) {
  if (alpha_quad < kSkewThreshold)
    return log_density_t_core(delta, log_det, p, nu);
  const double half_order = (nu + p) / 2.0;
  const double arg = std::sqrt(alpha_quad * (nu + delta));
  return -0.5 * half_order * std::log((nu + delta) / alpha_quad) +
         0.5 * nu * std::log(nu) + specfun::log_bessel_k(half_order, arg) -
         0.5 * p * kLog2Pi - 0.5 * log_det - specfun::log_gamma(nu / 2.0) -
         (0.5 * nu - 1.0) * kLn2 + cross;
}

double log_density_skew_t(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          const ScaleOps& scale, const Eigen::VectorXd& alpha,
                          double nu) {
  if (!(nu > 0.0)) throw std::domain_error("log_density_skew_t: nu must be > 0");
  const Eigen::VectorXd d = x - mu;
  const Eigen::VectorXd sia = scale.solve(alpha);
  const double value = log_density_skew_t_core(
      scale.quad(d), alpha.dot(sia), d.dot(sia), scale.log_det(),
      scale.dim(), nu);
  if (!std::isfinite(value))
    throw std::runtime_error("log_density_skew_t: non-finite density value");
  return value;
}

double log_density_skew_t(const Eigen::VectorXd& x, const SkewTParams& params) {
  return log_density_skew_t(x, params.mu, ScaleOps(params.sigma), params.alpha,
                            params.nu);
}

double log_density_gh(const Eigen::VectorXd& x, const GhParams& params) {
  if (!(params.chi > 0.0) || !(params.psi > 0.0))
    throw std::domain_error("log_density_gh: requires chi > 0 and psi > 0");
  const ScaleOps scale(params.sigma);
  const int p = scale.dim();
  const Eigen::VectorXd d = x - params.mu;
  const Eigen::VectorXd sia = scale.solve(params.alpha);
  const double delta = scale.quad(d);
  const double alpha_quad = params.alpha.dot(sia);
  const double cross = d.dot(sia);
  const double order = params.lambda - p / 2.0;
  const double num = params.chi + delta;
  const double den = params.psi + alpha_quad;
  const double value =
      0.5 * order * std::log(num / den) +
      0.5 * params.lambda * (std::log(params.psi) - std::log(params.chi)) +
      specfun::log_bessel_k(order, std::sqrt(num * den)) - 0.5 * p * kLog2Pi -
      0.5 * scale.log_det() -
      specfun::log_bessel_k(params.lambda,
                            std::sqrt(params.chi * params.psi)) +
      cross;
  if (!std::isfinite(value))
    throw std::runtime_error("log_density_gh: non-finite density value");
  return value;
}

}  // namespace mcstfa::densities
