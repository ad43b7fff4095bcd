// Times the low-rank (optionally multi-threaded) E-step against the
// dense serial reference over a range of problem sizes and checks that
// the two agree.
#include <chrono>
#include <cstdio>
#include <random>

#include "mcstfa/aecm.hpp"
#include "mcstfa/reference.hpp"
#include "mcstfa/simulate.hpp"

namespace {

mcstfa::simulate::SimSpec make_spec(int n, int p, int q, int G,
                                    unsigned seed) {
  mcstfa::simulate::SimSpec spec;
  spec.n = n;
  spec.p = p;
  spec.q = q;
  spec.G = G;
  spec.seed = seed;
  spec.weights = Eigen::VectorXd::Constant(G, 1.0 / G);
  spec.dof = Eigen::VectorXd::Constant(G, 8.0);
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  for (int g = 0; g < G; ++g) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(q);
    xi(g % q) = 8.0 * (g + 1);
    spec.factor_means.push_back(xi);
    Eigen::VectorXd zeta(q);
    for (int j = 0; j < q; ++j) zeta(j) = nd(rng);
    spec.factor_skews.push_back(zeta);
    spec.factor_covs.push_back(Eigen::MatrixXd::Identity(q, q));
  }
  return spec;
}

template <typename F>
double time_ms(F&& body, int reps) {
  // One warm-up call, then the best of `reps` timed calls.
  body();
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    if (ms < best) best = ms;
  }
  return best;
}

}  // namespace

int main() {
  struct Case {
    int n, p, q, G;
  };
  const Case cases[] = {{200, 15, 2, 4},   {500, 50, 3, 3},
                        {1000, 100, 5, 3}, {500, 400, 4, 2},
                        {2000, 60, 4, 4}};

  std::printf("%6s %5s %3s %3s | %12s %12s %8s | %10s\n", "n", "p", "q", "G",
              "dense (ms)", "lowrank (ms)", "speedup", "max |dz|");
  for (const auto& c : cases) {
    const auto sim = mcstfa::simulate::run(
        make_spec(c.n, c.p, c.q, c.G, 1234));

    mcstfa::aecm::EStepQuantities dense, fast;
    const double t_dense = time_ms(
        [&] { dense = mcstfa::reference::e_step(sim.data, sim.params); }, 3);
    const double t_fast = time_ms(
        [&] { fast = mcstfa::aecm::e_step(sim.data, sim.params, 0); }, 3);
    const double dz = (dense.z - fast.z).cwiseAbs().maxCoeff();
    std::printf("%6d %5d %3d %3d | %12.2f %12.2f %7.2fx | %10.2e\n", c.n,
                c.p, c.q, c.G, t_dense, t_fast, t_dense / t_fast, dz);
    if (dz > 1e-9) {
      std::fprintf(stderr, "E-step mismatch above tolerance\n");
      return 1;
    }
  }
  return 0;
}
