#include <algorithm>
#include <random>

#include <doctest.h>

#include "mcstfa/init.hpp"
#include "mcstfa/simulate.hpp"
#include "support/fixtures.hpp"

using namespace mcstfa;

namespace {
model::DataMatrix line_points() {
  model::DataMatrix data;
  data.values.resize(6, 1);
  data.values << 0.0, 1.0, 4.0, 5.0, 10.0, 11.0;
  return data;
}
}  // namespace

TEST_CASE("complete linkage reproduces a hand-worked dendrogram") {
  const model::DataMatrix data = line_points();
  // Three pairs merge at distance 1 each; the cut at G = 3 yields them.
  const auto at3 = init::hierarchical_labels(data, 3);
  CHECK(at3 == std::vector<int>{0, 0, 1, 1, 2, 2});
  // Complete-linkage gap {0,1}-{4,5} is 5 versus {4,5}-{10,11} at 7, so
  // the left two pairs merge first.
  const auto at2 = init::hierarchical_labels(data, 2);
  CHECK(at2 == std::vector<int>{0, 0, 0, 0, 1, 1});
  const auto at1 = init::hierarchical_labels(data, 1);
  CHECK(at1 == std::vector<int>(6, 0));
  // G = n: every point its own cluster, numbered by position.
  CHECK(init::hierarchical_labels(data, 6) ==
        std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("hierarchical clustering is deterministic and label-normalized") {
  const model::DataMatrix data = fixtures::random_data(60, 4, 99);
  for (auto linkage :
       {init::Linkage::Complete, init::Linkage::Ward, init::Linkage::Average}) {
    const auto a = init::hierarchical_labels(data, 4, linkage);
    const auto b = init::hierarchical_labels(data, 4, linkage);
    CHECK(a == b);
    REQUIRE(a.size() == 60);
    // Labels appear in first-occurrence order.
    int seen = 0;
    for (int label : a) {
      CHECK(label <= seen);
      if (label == seen) ++seen;
    }
    CHECK(seen == 4);
  }
}

TEST_CASE("linkage choices recover well-separated blobs identically") {
  // Three tight, well-separated clusters: any linkage must find them.
  model::DataMatrix data;
  data.values.resize(30, 2);
  std::mt19937 rng(5);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (int i = 0; i < 30; ++i) {
    const int g = i / 10;
    data.values(i, 0) = 20.0 * g + nd(rng);
    data.values(i, 1) = -10.0 * g + nd(rng);
  }
  const std::vector<int> want = [&] {
    std::vector<int> v(30);
    for (int i = 0; i < 30; ++i) v[i] = i / 10;
    return v;
  }();
  for (auto linkage :
       {init::Linkage::Complete, init::Linkage::Ward, init::Linkage::Average})
    CHECK(init::hierarchical_labels(data, 3, linkage) == want);
}

TEST_CASE("robust labels absorb outlier singletons into real clusters") {
  // Three tight blobs plus two extreme outliers. The plain G = 3 cut
  // isolates the outliers; the robust variant keeps three full-sized
  // clusters and attaches the outliers to the nearest one.
  model::DataMatrix data;
  data.values.resize(32, 2);
  std::mt19937 rng(5);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (int i = 0; i < 30; ++i) {
    const int g = i / 10;
    data.values(i, 0) = 20.0 * g + nd(rng);
    data.values(i, 1) = -10.0 * g + nd(rng);
  }
  data.values.row(30) << 500.0, 500.0;
  data.values.row(31) << -400.0, 300.0;

  const auto plain = init::hierarchical_labels(data, 3);
  std::vector<int> plain_counts(3, 0);
  for (int l : plain) ++plain_counts[l];
  CHECK(*std::min_element(plain_counts.begin(), plain_counts.end()) <= 2);

  for (auto linkage :
       {init::Linkage::Complete, init::Linkage::Ward, init::Linkage::Average}) {
    const auto robust = init::robust_hierarchical_labels(data, 3, linkage, 4);
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 32; ++i) {
      REQUIRE(robust[i] >= 0);
      REQUIRE(robust[i] < 3);
      ++counts[robust[i]];
    }
    CHECK(*std::min_element(counts.begin(), counts.end()) >= 4);
    // The blobs themselves stay intact.
    for (int i = 0; i < 30; ++i) CHECK(robust[i] == robust[10 * (i / 10)]);
    // Identical inputs give identical labels.
    CHECK(robust == init::robust_hierarchical_labels(data, 3, linkage, 4));
  }

  // With no undersized clusters the robust variant is the plain cut.
  model::DataMatrix clean;
  clean.values = data.values.topRows(30);
  CHECK(init::robust_hierarchical_labels(clean, 3, init::Linkage::Ward, 4) ==
        init::hierarchical_labels(clean, 3, init::Linkage::Ward));
}

TEST_CASE("initial parameters are valid and follow the conventions") {
  const auto spec = simulate::reference_sim_spec(4);
  const auto sim = simulate::run(spec);
  const auto labels = init::robust_hierarchical_labels(sim.data, 4);
  const auto params = init::initial_params(sim.data, labels, 2);

  CHECK_NOTHROW(params.validate());
  CHECK(params.p() == 15);
  CHECK(params.q() == 2);
  CHECK(params.n_components() == 4);
  CHECK((params.loadings.transpose() * params.loadings -
         Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (int g = 0; g < 4; ++g) {
    CHECK(params.dof(g) == doctest::Approx(50.0));
    CHECK((params.factor_skews[g].array() == 1.0).all());
    // Weights reflect the partition proportions.
    const int count = static_cast<int>(
        std::count(labels.begin(), labels.end(), g));
    CHECK(params.weights(g) ==
          doctest::Approx(static_cast<double>(count) / sim.data.n()));
  }
}

TEST_CASE("initial parameters respect the init configuration") {
  const model::DataMatrix data = fixtures::random_data(50, 6, 123);
  const auto labels = init::hierarchical_labels(data, 2);
  init::InitConfig config;
  config.nu0 = 30.0;
  config.skew0 = 0.0;
  const auto params = init::initial_params(data, labels, 3, config);
  CHECK(params.dof(0) == doctest::Approx(30.0));
  CHECK(params.factor_skews[1].cwiseAbs().maxCoeff() == 0.0);
  CHECK(params.q() == 3);
}

TEST_CASE("initialization rejects impossible requests") {
  const model::DataMatrix data = fixtures::random_data(10, 3, 7);
  CHECK_THROWS(init::hierarchical_labels(data, 0));
  CHECK_THROWS(init::hierarchical_labels(data, 11));
  const auto labels = init::hierarchical_labels(data, 2);
  CHECK_THROWS(init::initial_params(data, labels, 4));  // q > p
}
