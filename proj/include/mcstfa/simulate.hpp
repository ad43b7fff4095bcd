#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mcstfa/model.hpp"

namespace mcstfa::simulate {

// Seedable, platform-independent generator: mt19937_64 words with fixed
// transforms (so std::distribution implementation differences cannot
// change the output stream).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // (0, 1)
  double normal();   // standard normal, Box-Muller
  double gamma(double shape, double scale);  // Marsaglia-Tsang
  double inverse_gamma(double shape, double rate);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct SimSpec {
  int n = 0, p = 0, q = 0, G = 0;
  Eigen::VectorXd weights;                    // G, sums to 1
  Eigen::VectorXd dof;                        // G
  std::vector<Eigen::VectorXd> factor_means;  // G of q
  std::vector<Eigen::VectorXd> factor_skews;  // G of q
  std::vector<Eigen::MatrixXd> factor_covs;   // G of q x q
  Eigen::VectorXd noise_diag;                 // p; empty means unit noise
  std::uint64_t seed = 1;
  std::optional<Eigen::MatrixXd> loadings;  // absent: standard-normal draws

  void validate() const;
};

struct SimResult {
  model::DataMatrix data;
  std::vector<int> labels;
  model::MixtureParams params;  // the generating parameter set
};

// The built-in simulation design: n=200, p=15, q=2, G=4, pi_g=1/4,
// nu=(5,2,40,40), zeta_1=(10,10)', zeta_2=zeta_3=0, zeta_4=(50,45)',
// standard-normal loadings; separated lattice factor means and
// Omega_g = I are defaults and are emitted with the data.
SimSpec reference_sim_spec(std::uint64_t seed);

// Draw from the generative law x = Lambda xi_g + y Lambda zeta_g
// + sqrt(y) N(0, Lambda Omega_g Lambda' + Psi), y ~ InvGamma(nu_g/2, nu_g/2).
SimResult run(const SimSpec& spec);

}  // namespace mcstfa::simulate
