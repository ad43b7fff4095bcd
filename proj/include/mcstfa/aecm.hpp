#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcstfa/model.hpp"

namespace mcstfa::aecm {

struct FitConfig {
  int max_iter = 2000;
  double epsilon = 1e-5;   // Aitken convergence threshold
  double min_dof = 0.5;    // lower bisection bound for the nu update
  double max_dof = 400.0;
  bool skew = true;        // false pins zeta_g = 0 (the MCtFA restriction)
  std::optional<double> fixed_dof;  // pin nu_g, skipping the nu update
  int threads = 0;         // 0 = all available
};

// Thrown when a component loses effective mass (n_g < q + 1).
struct ComponentCollapseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-observation, per-component E-step expectations and their aggregates.
struct EStepQuantities {
  Eigen::MatrixXd z;  // n x G responsibilities
  Eigen::MatrixXd a;  // E[Y_i | x_i, Z_ig = 1]
  Eigen::MatrixXd b;  // E[1/Y_i | .]
  Eigen::MatrixXd c;  // E[log Y_i | .]
  Eigen::VectorXd n_g, a_bar, b_bar, m_g;
  double loglik = 0.0;  // observed-data log-likelihood at the input params
};

EStepQuantities e_step(const model::DataMatrix& data,
                       const model::MixtureParams& params, int threads = 0);

// CM-1: update pi, xi_g, zeta_g, nu_g with Lambda, Psi, Omega fixed.
void cm_step_1(const model::DataMatrix& data, model::MixtureParams& params,
               const EStepQuantities& eq, const FitConfig& config);

// CM-2: update Lambda, Psi, Omega_g, then re-orthonormalize Lambda and
// absorb the transform into the factor-space parameters.
void cm_step_2(const model::DataMatrix& data, model::MixtureParams& params,
               const EStepQuantities& eq, const FitConfig& config);

struct AitkenResult {
  double a_t = 0.0;
  double l_inf = 0.0;
  bool converged = false;
};

// Aitken-accelerated stopping rule on the log-likelihood history.
AitkenResult aitken_update(const std::vector<double>& history, double epsilon);

struct FitResult {
  model::MixtureParams params;
  std::vector<double> loglik_trace;
  bool converged = false;
  int iterations = 0;
  double loglik = 0.0;
  double bic = 0.0;
  long n_free_parameters = 0;
  Eigen::MatrixXd responsibilities;
  std::vector<int> hard_labels;
};

// Run the AECM loop (E, CM-1, E, CM-2 per cycle) from explicit starting
// values until the Aitken criterion or max_iter.
FitResult fit(const model::DataMatrix& data, const model::MixtureParams& init,
              const FitConfig& config);

long free_parameter_count(int p, int q, int G, bool skew);

}  // namespace mcstfa::aecm
