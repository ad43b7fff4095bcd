#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcstfa/densities.hpp"

namespace mcstfa::model {

// n x p observation matrix with optional column names.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
  void validate() const;  // throws on empty or non-finite entries
};

// Full MCStFA parameter set. Lambda and Psi are shared across components;
// everything else is component-specific. Lambda is kept with orthonormal
// columns (sign convention: first nonzero entry of each column positive).
struct MixtureParams {
  Eigen::VectorXd weights;                   // G, positive, sums to 1
  Eigen::MatrixXd loadings;                  // p x q (Lambda)
  std::vector<Eigen::VectorXd> factor_means;  // G of q (xi_g)
  std::vector<Eigen::VectorXd> factor_skews;  // G of q (zeta_g)
  std::vector<Eigen::MatrixXd> factor_covs;   // G of q x q SPD (Omega_g)
  Eigen::VectorXd noise_diag;                // p, positive (Psi)
  Eigen::VectorXd dof;                       // G, > 0 (nu_g)

  int n_components() const { return static_cast<int>(weights.size()); }
  int p() const { return static_cast<int>(loadings.rows()); }
  int q() const { return static_cast<int>(loadings.cols()); }
  void validate() const;
};

// Read-only view of one component in observed coordinates.
struct ComponentView {
  Eigen::VectorXd mean;             // Lambda xi_g
  densities::LowRankScale scale;    // Lambda Omega_g Lambda' + Psi
  Eigen::VectorXd skew;             // Lambda zeta_g
  double nu;
};

ComponentView component_view(const MixtureParams& params, int g);

double mixture_log_density(const Eigen::VectorXd& x,
                           const MixtureParams& params);

// Posterior membership probabilities, n x G, each row sums to 1. Computed
// in log space.
Eigen::MatrixXd posterior_responsibilities(const DataMatrix& data,
                                           const MixtureParams& params);

// Re-orthonormalize Lambda in place and absorb the transformation into
// xi_g, zeta_g, Omega_g so the mixture density is unchanged.
void orthonormalize_loadings(MixtureParams& params);

// Sort components by the first coordinate of Lambda xi_g; returns the
// permutation applied (new index -> old index).
std::vector<int> sort_components(MixtureParams& params);

enum class ModelId { MCStFA, CCC, CCU, CUC, CUU, UCC, UCU, UUC, UUU };

std::optional<ModelId> parse_model_id(const std::string& name);
std::string model_id_name(ModelId id);

long count_free_parameters(ModelId id, int p, int q, int G);

struct ParsimonyRow {
  ModelId model;
  int p, q, G;
  long count;
};

std::vector<ParsimonyRow> parsimony_table(int p_min, int p_max, int q, int G,
                                          const std::vector<ModelId>& models);

}  // namespace mcstfa::model
