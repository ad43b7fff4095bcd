#pragma once

// Serial dense-matrix reference path. Forms the p x p component scales
// explicitly and loops plainly over observations; kept as the oracle for
// the Woodbury/OpenMP kernels and as the benchmark baseline.

#include <Eigen/Dense>

#include "mcstfa/aecm.hpp"
#include "mcstfa/model.hpp"

namespace mcstfa::reference {

Eigen::MatrixXd dense_scale(const model::MixtureParams& params, int g);

double log_density_skew_t_dense(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& mu,
                                const Eigen::MatrixXd& sigma,
                                const Eigen::VectorXd& alpha, double nu);

double mixture_log_density(const Eigen::VectorXd& x,
                           const model::MixtureParams& params);

double observed_loglik(const model::DataMatrix& data,
                       const model::MixtureParams& params);

Eigen::MatrixXd posterior_responsibilities(const model::DataMatrix& data,
                                           const model::MixtureParams& params);

// Serial dense E-step producing the same quantities as aecm::e_step.
aecm::EStepQuantities e_step(const model::DataMatrix& data,
                             const model::MixtureParams& params);

}  // namespace mcstfa::reference
