#pragma once

// Scalar special functions backing the GIG and skew-t formulas.
// Everything here is a pure function of scalars and thread-safe.

namespace mcstfa::specfun {

// log K_nu(x), the modified Bessel function of the third kind with real
// order, evaluated in log space. Valid for any finite order and x > 0;
// accurate to ~1e-13 relative on 1e-6 <= x <= 1e4, |order| <= 500.
// Even in the order: log_bessel_k(-nu, x) == log_bessel_k(nu, x).
double log_bessel_k(double order, double x);

// d/dnu log K_nu(x), central finite difference on log_bessel_k.
double dlog_bessel_k_dorder(double order, double x);

// Digamma function, x > 0. ~1e-13 relative.
double digamma(double x);

// log Gamma(x), x > 0.
double log_gamma(double x);

}  // namespace mcstfa::specfun
