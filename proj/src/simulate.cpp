#include "mcstfa/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace mcstfa::simulate {

namespace {
using Eigen::MatrixXd;
using Eigen::VectorXd;
constexpr double kTwoPi = 6.28318530717958647692;
}  // namespace

double Rng::uniform() {
  // 53-bit mantissa; strictly inside (0, 1).
  const double u = ((engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  return u;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform(), u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("Rng::gamma: invalid parameters");
  if (shape < 1.0) {
    // Boost to shape + 1 and scale back.
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return scale * d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

double Rng::inverse_gamma(double shape, double rate) {
  return 1.0 / gamma(shape, 1.0 / rate);
}

void SimSpec::validate() const {
  if (n < 1 || p < 1 || q < 1 || G < 1 || q > p)
    throw std::invalid_argument("SimSpec: invalid dimensions");
  if (weights.size() != G || std::fabs(weights.sum() - 1.0) > 1e-8 ||
      (weights.array() <= 0.0).any())
    throw std::invalid_argument("SimSpec: weights must be positive and sum to 1");
  if (dof.size() != G || (dof.array() <= 0.0).any())
    throw std::invalid_argument("SimSpec: invalid dof");
  if (static_cast<int>(factor_means.size()) != G ||
      static_cast<int>(factor_skews.size()) != G ||
      static_cast<int>(factor_covs.size()) != G)
    throw std::invalid_argument("SimSpec: component list size mismatch");
  for (int g = 0; g < G; ++g)
    if (factor_means[g].size() != q || factor_skews[g].size() != q ||
        factor_covs[g].rows() != q || factor_covs[g].cols() != q)
      throw std::invalid_argument("SimSpec: factor dimension mismatch");
  if (noise_diag.size() != 0 &&
      (noise_diag.size() != p || (noise_diag.array() <= 0.0).any()))
    throw std::invalid_argument("SimSpec: invalid noise_diag");
  if (loadings && (loadings->rows() != p || loadings->cols() != q))
    throw std::invalid_argument("SimSpec: loadings dimension mismatch");
}

SimSpec reference_sim_spec(std::uint64_t seed) {
  SimSpec spec;
  spec.n = 200;
  spec.p = 15;
  spec.q = 2;
  spec.G = 4;
  spec.seed = seed;
  spec.weights = VectorXd::Constant(4, 0.25);
  spec.dof = (VectorXd(4) << 5.0, 2.0, 40.0, 40.0).finished();
  spec.factor_skews = {(VectorXd(2) << 10.0, 10.0).finished(),
                       VectorXd::Zero(2), VectorXd::Zero(2),
                       (VectorXd(2) << 50.0, 45.0).finished()};
  // Separated factor means; the third group sits behind the origin of
  // the first group's skew direction, inside the region a symmetric fit
  // of that group spills into.
  spec.factor_means = {(VectorXd(2) << 0.0, 0.0).finished(),
                       (VectorXd(2) << -60.0, 40.0).finished(),
                       (VectorXd(2) << -6.0, -6.0).finished(),
                       (VectorXd(2) << 40.0, -70.0).finished()};
  spec.factor_covs.assign(4, MatrixXd::Identity(2, 2));
  spec.factor_covs[2] = 4.0 * MatrixXd::Identity(2, 2);
  spec.noise_diag = VectorXd::Ones(15);
  return spec;
}

SimResult run(const SimSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  MatrixXd lambda;
  if (spec.loadings) {
    lambda = *spec.loadings;
  } else {
    lambda.resize(spec.p, spec.q);
    for (int i = 0; i < spec.p; ++i)
      for (int j = 0; j < spec.q; ++j) lambda(i, j) = rng.normal();
  }
  const VectorXd psi = spec.noise_diag.size() == spec.p
                           ? spec.noise_diag
                           : VectorXd::Ones(spec.p);
  const VectorXd psi_sqrt = psi.cwiseSqrt();

  std::vector<Eigen::LLT<MatrixXd>> omega_chol;
  for (const auto& omega : spec.factor_covs) {
    omega_chol.emplace_back(omega);
    if (omega_chol.back().info() != Eigen::Success)
      throw std::invalid_argument("SimSpec: factor covariance is not SPD");
  }

  VectorXd cum(spec.G);
  double acc = 0.0;
  for (int g = 0; g < spec.G; ++g) cum(g) = (acc += spec.weights(g));

  SimResult result;
  result.data.values.resize(spec.n, spec.p);
  result.labels.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const double u = rng.uniform();
    int g = 0;
    while (g + 1 < spec.G && u > cum(g)) ++g;
    result.labels[i] = g;

    const double y = rng.inverse_gamma(spec.dof(g) / 2.0, spec.dof(g) / 2.0);
    VectorXd zq(spec.q), zp(spec.p);
    for (int j = 0; j < spec.q; ++j) zq(j) = rng.normal();
    for (int j = 0; j < spec.p; ++j) zp(j) = rng.normal();

    const VectorXd noise =
        lambda * (omega_chol[g].matrixL() * zq) + psi_sqrt.cwiseProduct(zp);
    result.data.values.row(i) =
        (lambda * (spec.factor_means[g] + y * spec.factor_skews[g]) +
         std::sqrt(y) * noise)
            .transpose();
  }

  result.params.weights = spec.weights;
  result.params.loadings = lambda;
  result.params.factor_means = spec.factor_means;
  result.params.factor_skews = spec.factor_skews;
  result.params.factor_covs = spec.factor_covs;
  result.params.noise_diag = psi;
  result.params.dof = spec.dof;
  return result;
}

}  // namespace mcstfa::simulate
