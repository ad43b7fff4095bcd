#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mcstfa/model.hpp"

namespace fixtures {

inline Eigen::MatrixXd random_spd(int q, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) a(i, j) = nd(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(q, q);
}

inline Eigen::MatrixXd random_orthonormal(int p, int q, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(p, q);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) a(i, j) = nd(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd thin =
      qr.householderQ() * Eigen::MatrixXd::Identity(p, q);
  return thin;
}

// A valid random parameter set with orthonormal loadings.
inline mcstfa::model::MixtureParams random_params(int p, int q, int G,
                                                  unsigned seed,
                                                  bool skew = true) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.2, 1.0);

  mcstfa::model::MixtureParams params;
  params.weights.resize(G);
  for (int g = 0; g < G; ++g) params.weights(g) = ud(rng);
  params.weights /= params.weights.sum();

  params.loadings = random_orthonormal(p, q, rng);
  params.noise_diag.resize(p);
  for (int j = 0; j < p; ++j) params.noise_diag(j) = ud(rng);
  params.dof.resize(G);
  for (int g = 0; g < G; ++g) params.dof(g) = 4.0 + 20.0 * ud(rng);

  for (int g = 0; g < G; ++g) {
    Eigen::VectorXd xi(q), zeta(q);
    for (int j = 0; j < q; ++j) {
      xi(j) = 3.0 * nd(rng);
      zeta(j) = skew ? nd(rng) : 0.0;
    }
    params.factor_means.push_back(xi);
    params.factor_skews.push_back(zeta);
    params.factor_covs.push_back(random_spd(q, rng));
  }
  params.validate();
  return params;
}

inline mcstfa::model::DataMatrix random_data(int n, int p, unsigned seed,
                                             double spread = 2.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd(0.0, spread);
  mcstfa::model::DataMatrix data;
  data.values.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) data.values(i, j) = nd(rng);
  return data;
}

}  // namespace fixtures
