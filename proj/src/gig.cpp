#include "mcstfa/gig.hpp"

#include <cmath>
#include <stdexcept>

#include "mcstfa/specfun.hpp"

namespace mcstfa::gig {

GigMoments gig_moments(const GigParams& params) {
  const double psi = params.psi, chi = params.chi, lambda = params.lambda;
  if (!(chi > 0.0) || psi < 0.0 || !std::isfinite(lambda))
    throw std::domain_error("gig_moments: requires chi > 0 and psi >= 0");

  if (psi < 1e-12 * std::max(1.0, chi)) {
    // Inverse-gamma boundary: Y ~ InvGamma(-lambda, chi/2).
    if (lambda >= 0.0)
      throw std::domain_error(
          "gig_moments: psi = 0 requires lambda < 0 (inverse-gamma branch)");
    if (lambda >= -1.0)
      throw std::domain_error(
          "gig_moments: E[Y] does not exist for psi = 0, lambda >= -1");
    GigMoments m;
    m.e_y = chi / (-2.0 * lambda - 2.0);
    m.e_inv_y = -2.0 * lambda / chi;
    m.e_log_y = std::log(chi / 2.0) - specfun::digamma(-lambda);
    return m;
  }

  const double s = std::sqrt(psi * chi);
  const double lk = specfun::log_bessel_k(lambda, s);
  const double lk_up = specfun::log_bessel_k(lambda + 1.0, s);
  // K_{lambda-1} evaluated directly; the recurrence through K_{lambda+1}
  // cancels catastrophically for large lambda at small argument.
  const double lk_down = specfun::log_bessel_k(lambda - 1.0, s);
  const double half_log_chi_psi = 0.5 * (std::log(chi) - std::log(psi));

  GigMoments m;
  m.e_y = std::exp(half_log_chi_psi + lk_up - lk);
  m.e_inv_y = std::exp(-half_log_chi_psi + lk_down - lk);
  m.e_log_y = half_log_chi_psi + specfun::dlog_bessel_k_dorder(lambda, s);
  return m;
}

GigParams posterior_y_params(double alpha_quad, double mahalanobis, double nu,
                             int p) {
  if (alpha_quad < 0.0 || mahalanobis < 0.0 || !(nu > 0.0) || p < 1)
    throw std::domain_error("posterior_y_params: invalid inputs");
  return GigParams{alpha_quad, nu + mahalanobis, -(nu + p) / 2.0};
}

}  // namespace mcstfa::gig
