#pragma once

#include <Eigen/Dense>

namespace mcstfa::densities {

// Low-rank-plus-diagonal scale Sigma = Lambda Omega Lambda' + Psi.
struct LowRankScale {
  Eigen::MatrixXd loadings;    // p x q (Lambda)
  Eigen::MatrixXd factor_cov;  // q x q SPD (Omega)
  Eigen::VectorXd noise_diag;  // p, positive (diagonal of Psi)
};

// Factored solver for a scale matrix. The low-rank route uses the Woodbury
// identity, O(p q^2), and never forms the p x p inverse:
//   Sigma^-1 = Psi^-1 - Psi^-1 Lambda (Omega^-1 + Lambda' Psi^-1 Lambda)^-1
//              Lambda' Psi^-1
//   |Sigma|  = |Psi| |Omega| |Omega^-1 + Lambda' Psi^-1 Lambda|
class ScaleOps {
 public:
  explicit ScaleOps(const LowRankScale& scale);
  explicit ScaleOps(const Eigen::MatrixXd& sigma);  // dense Cholesky route

  int dim() const { return p_; }
  double log_det() const { return log_det_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;  // Sigma^-1 v
  Eigen::MatrixXd solve(const Eigen::MatrixXd& m) const;  // Sigma^-1 M
  double quad(const Eigen::VectorXd& v) const;            // v' Sigma^-1 v
  double mahalanobis(const Eigen::VectorXd& x, const Eigen::VectorXd& mu) const;

 private:
  int p_ = 0;
  bool low_rank_ = false;
  double log_det_ = 0.0;
  // Low-rank route.
  Eigen::VectorXd psi_inv_;
  Eigen::MatrixXd psi_inv_loadings_;   // Psi^-1 Lambda
  Eigen::LLT<Eigen::MatrixXd> m_llt_;  // Omega^-1 + Lambda' Psi^-1 Lambda
  // Dense route.
  Eigen::LLT<Eigen::MatrixXd> sigma_llt_;
};

double mahalanobis(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                   const Eigen::MatrixXd& sigma);
double mahalanobis(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                   const LowRankScale& scale);

// Generalized hyperbolic parameters (verification-grade density).
struct GhParams {
  double lambda = 0.0;
  double chi = 1.0;
  double psi = 1.0;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::VectorXd alpha;
};

struct SkewTParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::VectorXd alpha;
  double nu = 1.0;
};

double log_density_gh(const Eigen::VectorXd& x, const GhParams& params);
double log_density_skew_t(const Eigen::VectorXd& x, const SkewTParams& params);
double log_density_skew_t(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          const ScaleOps& scale, const Eigen::VectorXd& alpha,
                          double nu);

// Scalar cores shared by the mixture hot path; all quadratic forms are
// precomputed by the caller:
//   delta      = (x-mu)' Sigma^-1 (x-mu)
//   alpha_quad = alpha' Sigma^-1 alpha
//   cross      = (x-mu)' Sigma^-1 alpha
// Below the alpha_quad threshold the skew-t switches to its multivariate-t
// limit; the formula is numerically 0/0 there.
inline constexpr double kSkewThreshold = 1e-12;
double log_density_skew_t_core(double delta, double alpha_quad, double cross,
                               double log_det, int p, double nu);
double log_density_t_core(double delta, double log_det, int p, double nu);

}  // namespace mcstfa::densities
