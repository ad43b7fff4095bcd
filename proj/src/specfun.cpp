#include "mcstfa/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcstfa::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = 3.14159265358979323846;

// Taylor coefficients of 1/Gamma(1+u) = sum c[k] u^k (Abramowitz & Stegun 6.1.34).
constexpr double kInvGammaCoef[] = {
    1.00000000000000000000,  0.57721566490153286061, -0.65587807152025388108,
    -0.04200263503409523553, 0.16653861138229148950, -0.04219773455554433675,
    -0.00962197152787697356, 0.00721894324666309954, -0.00116516759185906511,
    -0.00021524167411495097, 0.00012805028238811619, -0.00002013485478078824,
    -0.00000125049348214267, 0.00000113302723198170, -0.00000020563384169776,
    0.00000000611609510448,  0.00000000500200764447, -0.00000000118127457049,
    0.00000000010434267117,  0.00000000000778226344};

double inv_gamma_1p(double u) {  // 1/Gamma(1+u), |u| <= 0.5
  double s = 0.0, up = 1.0;
  for (double c : kInvGammaCoef) {
    s += c * up;
    up *= u;
  }
  return s;
}

// Temme's Gamma1(mu) = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and
// Gamma2(mu) = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2, stable through mu = 0.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                  double& gammi) {
  gampl = inv_gamma_1p(mu);
  gammi = inv_gamma_1p(-mu);
  // Odd/even splits of the same Taylor series avoid the mu -> 0 cancellation.
  double s1 = 0.0, s2 = 0.0, u2 = mu * mu, up = 1.0;
  for (int k = 0; 2 * k + 1 < static_cast<int>(std::size(kInvGammaCoef));
       ++k) {
    s1 += kInvGammaCoef[2 * k + 1] * up;
    s2 += kInvGammaCoef[2 * k] * up;
    up *= u2;
  }
  gam1 = -s1;
  gam2 = s2;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2 and 0 < x <= 2 (Temme's series).
void bessel_k_small_x(double mu, double x, double& kmu, double& kmu1) {
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact = (std::fabs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = (std::fabs(e) < kEps) ? 1.0 : std::sinh(e) / e;
  double gam1, gam2, gampl, gammi;
  temme_gammas(mu, gam1, gam2, gampl, gammi);
  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  for (int i = 1; i <= 500; ++i) {
    ff = (i * ff + p + q) / (i * i - mu * mu);
    c *= d / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - i * ff);
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  kmu = sum;
  kmu1 = sum1 * (2.0 / x);
}

// log K_mu(x) and log K_{mu+1}(x) for |mu| <= 1/2 and x > 2
// (Steed/Thompson-Barnett continued fraction, e^x-scaled).
void log_bessel_k_large_x(double mu, double x, double& lkmu, double& lkmu1) {
  const double a1 = 0.25 - mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double a = -a1;
  double q = a1, c = a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 10000; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < kEps) break;
  }
  h = a1 * h;
  lkmu = 0.5 * std::log(kPi / (2.0 * x)) - x - std::log(s);
  lkmu1 = lkmu + std::log((mu + x + 0.5 - h) / x);
}

}  // namespace

double log_bessel_k(double order, double x) {
  if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(order))
    throw std::domain_error("log_bessel_k: requires finite order and x > 0");
  const double nu = std::fabs(order);  // K is even in the order
  const int n = static_cast<int>(nu + 0.5);
  const double mu = nu - n;  // |mu| <= 1/2
  double lk0, lk1;
  if (x <= 2.0) {
    double kmu, kmu1;
    bessel_k_small_x(mu, x, kmu, kmu1);
    lk0 = std::log(kmu);
    lk1 = std::log(kmu1);
  } else {
    log_bessel_k_large_x(mu, x, lk0, lk1);
  }
  if (n == 0) return lk0;
  // Upward recurrence K_{v+1} = K_{v-1} + (2v/x) K_v, carried in log space.
  for (int j = 1; j < n; ++j) {
    const double v = mu + j;
    const double lk2 =
        lk1 + std::log(2.0 * v / x + std::exp(lk0 - lk1));
    lk0 = lk1;
    lk1 = lk2;
  }
  return lk1;
}

double dlog_bessel_k_dorder(double order, double x) {
  if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(order))
    throw std::domain_error(
        "dlog_bessel_k_dorder: requires finite order and x > 0");
  const double h = std::max(1e-5, 1e-7 * std::fabs(order));
  return (log_bessel_k(order + h, x) - log_bessel_k(order - h, x)) / (2.0 * h);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("digamma: requires x > 0");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series with Bernoulli-number coefficients.
  const double inv = 1.0 / x, inv2 = inv * inv;
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0 -
                  inv2 * (1.0 / 12.0)))))));
  return result + std::log(x) - 0.5 * inv - series;
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("log_gamma: requires x > 0");
  return std::lgamma(x);
}

}  // namespace mcstfa::specfun
