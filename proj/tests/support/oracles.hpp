#pragma once

// Independent numerical oracles used by the test suites. Nothing here may
// call into the implementation paths under test (quadrature and direct
// series only).

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12,
                               int depth = 60) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integral of f over the whole real line via x = tan(theta).
inline double integrate_real_line(const std::function<double(double)>& f,
                                  double tol = 1e-10) {
  const double half_pi = 1.57079632679489661923;
  auto g = [&](double th) {
    const double c = std::cos(th);
    const double x = std::tan(th);
    const double v = f(x) / (c * c);
    return std::isfinite(v) ? v : 0.0;
  };
  return adaptive_simpson(g, -half_pi + 1e-12, half_pi - 1e-12, tol);
}

// Composite Simpson on a uniform grid (n_steps must be even).
inline double composite_simpson(const std::function<double(double)>& f,
                                double a, double b, int n_steps) {
  const double h = (b - a) / n_steps;
  double sum = f(a) + f(b);
  for (int k = 1; k < n_steps; ++k) {
    const double v = f(a + k * h);
    sum += (k % 2 == 1 ? 4.0 : 2.0) * v;
  }
  return sum * h / 3.0;
}

// Total mass of a 1-D density with possibly polynomial tails: Simpson on
// a core interval plus log-substituted tails (x = +-e^u), which turn a
// |x|^-a tail into a smooth exponentially decaying integrand. The
// tan-compactification alternative loses the fat-tail mass to double
// rounding near the interval ends. u_max stops where the callee's own
// rounding noise would dominate (heavy-tail mass beyond e^32 is ~3e-7,
// below the tolerances this oracle backs).
inline double density_mass_1d(const std::function<double(double)>& f,
                              double core = 60.0, double u_max = 32.0) {
  const double log_core = std::log(core);
  auto tail = [&](double sign) {
    return composite_simpson(
        [&](double u) {
          const double x = std::exp(u);
          const double v = f(sign * x) * x;
          return std::isfinite(v) ? v : 0.0;
        },
        log_core, u_max, 200000);
  };
  return composite_simpson(f, -core, core, 400000) + tail(1.0) + tail(-1.0);
}

// log K_lambda(x) by quadrature of the integral representation
// K_lambda(x) = int_0^inf exp(-x cosh t) cosh(lambda t) dt, carried with
// an exponent shift so large orders do not overflow.
inline double log_bessel_k_quadrature(double lambda, double x) {
  lambda = std::fabs(lambda);
  auto log_integrand = [&](double t) {
    const double lc = lambda * t > 30.0
                          ? lambda * t - std::log(2.0)
                          : std::log(std::cosh(lambda * t));
    return -x * std::cosh(t) + lc;
  };
  // Locate the maximum of the exponent on a coarse grid, then refine.
  double tmax = 0.0, gmax = log_integrand(0.0);
  for (double t = 0.0; t < 50.0; t += 0.01) {
    const double g = log_integrand(t);
    if (g > gmax) {
      gmax = g;
      tmax = t;
    }
  }
  double lo = tmax, hi = tmax + 1.0;
  while (lo > 0.0 && log_integrand(lo) - gmax > -760.0) lo -= 0.05;
  lo = std::max(0.0, lo);
  while (log_integrand(hi) - gmax > -760.0 && hi < 800.0) hi += 0.05;
  // Fine trapezoid; the integrand can be sharply peaked far from 0 and
  // defeats interval-halving quadrature there.
  const int n_steps = 400000;
  const double h = (hi - lo) / n_steps;
  double integral = 0.0;
  for (int k = 0; k <= n_steps; ++k) {
    double w = std::exp(log_integrand(lo + k * h) - gmax);
    if (k == 0 || k == n_steps) w *= 0.5;
    integral += w;
  }
  return gmax + std::log(integral * h);
}

struct GigOracleMoments {
  double e_y, e_inv_y, e_log_y;
};

// GIG moments by quadrature of the unnormalized density in u = log y:
// exp(lambda u - (psi e^u + chi e^-u) / 2). Normalization is computed
// numerically as well, so no Bessel evaluation is involved.
inline GigOracleMoments gig_moments_quadrature(double psi, double chi,
                                               double lambda) {
  auto g = [&](double u) {
    return lambda * u - 0.5 * (psi * std::exp(u) + chi * std::exp(-u));
  };
  double umax = 0.0, gmax = g(0.0);
  for (double u = -60.0; u < 60.0; u += 0.005) {
    const double v = g(u);
    if (v > gmax) {
      gmax = v;
      umax = u;
    }
  }
  double lo = umax, hi = umax;
  while (g(lo) - gmax > -760.0 && lo > -1400.0) lo -= 0.5;
  while (g(hi) - gmax > -760.0 && hi < 1400.0) hi += 0.5;

  // Trapezoid on a fine grid; spectrally accurate for this smooth,
  // rapidly decaying integrand.
  const int n_steps = 200000;
  const double h = (hi - lo) / n_steps;
  double z = 0.0, my = 0.0, minv = 0.0, mlog = 0.0;
  for (int k = 0; k <= n_steps; ++k) {
    const double u = lo + k * h;
    double w = std::exp(g(u) - gmax);
    if (k == 0 || k == n_steps) w *= 0.5;
    z += w;
    my += w * std::exp(u);
    minv += w * std::exp(-u);
    mlog += w * u;
  }
  if (!(z > 0.0)) throw std::runtime_error("gig oracle: zero mass");
  return {my / z, minv / z, mlog / z};
}

}  // namespace oracles
