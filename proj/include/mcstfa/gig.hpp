#pragma once

namespace mcstfa::gig {

// (psi, chi, lambda) triple of a generalized inverse Gaussian law. The
// boundary psi = 0 with lambda < 0 is the inverse-gamma case.
struct GigParams {
  double psi = 0.0;
  double chi = 0.0;
  double lambda = 0.0;
};

struct GigMoments {
  double e_y = 0.0;      // E[Y]
  double e_inv_y = 0.0;  // E[1/Y]
  double e_log_y = 0.0;  // E[log Y]
};

// All three GIG expectations from a shared pair of log-Bessel evaluations.
// Routes psi ~ 0 to the inverse-gamma closed forms; the E-step with
// near-zero skewness lands exactly there.
GigMoments gig_moments(const GigParams& params);

// Posterior law of the latent scale Y given an observation of the skew-t:
// Y | x ~ GIG(alpha' Sigma^-1 alpha, nu + delta, -(nu+p)/2).
GigParams posterior_y_params(double alpha_quad, double mahalanobis, double nu,
                             int p);

}  // namespace mcstfa::gig
