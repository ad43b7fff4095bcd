#include <cmath>

#include <doctest.h>

#include "mcstfa/model.hpp"
#include "mcstfa/reference.hpp"
#include "support/fixtures.hpp"

using namespace mcstfa;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("parameter validation rejects malformed sets") {
  model::MixtureParams params = fixtures::random_params(6, 2, 3, 1);
  CHECK_NOTHROW(params.validate());

  auto bad = params;
  bad.weights(0) = -bad.weights(0);
  CHECK_THROWS(bad.validate());

  bad = params;
  bad.noise_diag(2) = 0.0;
  CHECK_THROWS(bad.validate());

  bad = params;
  bad.factor_means.pop_back();
  CHECK_THROWS(bad.validate());

  bad = params;
  bad.dof(1) = -3.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("mixture log density matches the dense serial path") {
  const model::MixtureParams params = fixtures::random_params(10, 3, 3, 5);
  const model::DataMatrix data = fixtures::random_data(25, 10, 6);
  for (int i = 0; i < data.n(); ++i) {
    const VectorXd x = data.values.row(i).transpose();
    CHECK(model::mixture_log_density(x, params) ==
          doctest::Approx(reference::mixture_log_density(x, params))
              .epsilon(1e-11));
  }
}

TEST_CASE("responsibility rows sum to one and match density ratios") {
  const model::MixtureParams params = fixtures::random_params(8, 2, 4, 9);
  const model::DataMatrix data = fixtures::random_data(40, 8, 10);
  const MatrixXd z = model::posterior_responsibilities(data, params);
  REQUIRE(z.rows() == 40);
  REQUIRE(z.cols() == 4);
  for (int i = 0; i < z.rows(); ++i) {
    CHECK(z.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(z.row(i).minCoeff() >= 0.0);
  }
  // Direct ratio of weighted component densities on one row.
  const VectorXd x = data.values.row(3).transpose();
  VectorXd wd(4);
  for (int g = 0; g < 4; ++g) {
    const auto v = model::component_view(params, g);
    wd(g) = params.weights(g) *
            std::exp(densities::log_density_skew_t(
                x, v.mean, densities::ScaleOps(v.scale), v.skew, v.nu));
  }
  wd /= wd.sum();
  CHECK((z.row(3).transpose() - wd).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-component responsibilities are all one") {
  const model::MixtureParams params = fixtures::random_params(5, 2, 1, 2);
  const model::DataMatrix data = fixtures::random_data(10, 5, 3);
  const MatrixXd z = model::posterior_responsibilities(data, params);
  CHECK((z.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("orthonormalization leaves the mixture density unchanged") {
  model::MixtureParams params = fixtures::random_params(12, 3, 3, 13);
  // Skew the loadings away from orthonormality by a random invertible mix.
  std::mt19937 rng(17);
  MatrixXd t = fixtures::random_spd(3, rng);
  for (int g = 0; g < 3; ++g) {
    params.factor_means[g] = t.inverse() * params.factor_means[g];
    params.factor_skews[g] = t.inverse() * params.factor_skews[g];
    params.factor_covs[g] =
        t.inverse() * params.factor_covs[g] * t.inverse().transpose();
  }
  params.loadings = params.loadings * t;

  const model::DataMatrix probes = fixtures::random_data(20, 12, 19);
  VectorXd before(20);
  for (int i = 0; i < 20; ++i)
    before(i) = model::mixture_log_density(probes.values.row(i).transpose(),
                                           params);

  model::orthonormalize_loadings(params);
  CHECK((params.loadings.transpose() * params.loadings -
         MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  for (int j = 0; j < 3; ++j) {
    int lead = 0;
    while (std::fabs(params.loadings(lead, j)) <= 1e-12) ++lead;
    CHECK(params.loadings(lead, j) > 0.0);
  }
  for (int i = 0; i < 20; ++i)
    CHECK(model::mixture_log_density(probes.values.row(i).transpose(),
                                     params) ==
          doctest::Approx(before(i)).epsilon(1e-10));
}

TEST_CASE("component sorting orders by first mean coordinate") {
  model::MixtureParams params = fixtures::random_params(7, 2, 4, 21);
  model::MixtureParams original = params;
  const std::vector<int> order = model::sort_components(params);
  double prev = -1e300;
  for (int g = 0; g < 4; ++g) {
    const double key = params.loadings.row(0).dot(params.factor_means[g]);
    CHECK(key >= prev);
    prev = key;
    CHECK(params.weights(g) ==
          doctest::Approx(original.weights(order[g])));
    CHECK(params.dof(g) == doctest::Approx(original.dof(order[g])));
  }
}

TEST_CASE("free-parameter counts match frozen hand evaluations") {
  using model::ModelId;
  CHECK(model::count_free_parameters(ModelId::MCStFA, 15, 2, 4) == 76);
  CHECK(model::count_free_parameters(ModelId::CCC, 15, 2, 4) == 157);
  // q = p, G = 1 boundary: p(p+1)/2 + p(p+2-p) + 2 + p - 1.
  CHECK(model::count_free_parameters(ModelId::MCStFA, 4, 4, 1) ==
        4 * 5 / 2 + 4 * 2 + 2 + 4 - 1);
  CHECK_THROWS(model::count_free_parameters(ModelId::MCStFA, 5, 0, 2));
  CHECK_THROWS(model::count_free_parameters(ModelId::MCStFA, 3, 4, 2));
}

TEST_CASE("full-model count equals independent accounting") {
  for (int p = 1; p <= 50; ++p)
    for (int q = 1; q <= p; ++q)
      for (int G = 1; G <= 10; ++G) {
        const long weights = G - 1;
        const long loadings = static_cast<long>(p) * q -
                              static_cast<long>(q) * q;
        const long means = static_cast<long>(G) * q;
        const long skews = static_cast<long>(G) * q;
        const long covs = static_cast<long>(G) * q * (q + 1) / 2;
        const long noise = p;
        const long dof = G;
        const long total =
            weights + loadings + means + skews + covs + noise + dof;
        REQUIRE(model::count_free_parameters(model::ModelId::MCStFA, p, q,
                                             G) == total);
      }
}

TEST_CASE("count ordering across the model family for large p") {
  using model::ModelId;
  for (auto [q, G] :
       {std::pair{2, 3}, {3, 3}, {5, 8}, {5, 9}}) {
    for (int p = 50; p <= 250; p += 25) {
      const long shared = model::count_free_parameters(ModelId::MCStFA, p, q, G);
      const long ccc = model::count_free_parameters(ModelId::CCC, p, q, G);
      const long cuu = model::count_free_parameters(ModelId::CUU, p, q, G);
      const long uuu = model::count_free_parameters(ModelId::UUU, p, q, G);
      CHECK(shared < ccc);
      CHECK(ccc < cuu);
      CHECK(cuu < uuu);
    }
  }
}

TEST_CASE("parsimony table is consistent with single counts") {
  const auto rows = model::parsimony_table(
      10, 14, 2, 3,
      {model::ModelId::MCStFA, model::ModelId::UUU});
  REQUIRE(rows.size() == 10);
  for (const auto& row : rows)
    CHECK(row.count == model::count_free_parameters(row.model, row.p, row.q,
                                                    row.G));
}

TEST_CASE("model id names round-trip") {
  for (auto id :
       {model::ModelId::MCStFA, model::ModelId::CCC, model::ModelId::CUU,
        model::ModelId::UUU}) {
    const auto back = model::parse_model_id(model::model_id_name(id));
    REQUIRE(back.has_value());
    CHECK(*back == id);
  }
  CHECK(!model::parse_model_id("bogus").has_value());
  CHECK(model::parse_model_id("mcstfa").has_value());
}
