#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "mcstfa/io.hpp"
#include "mcstfa/reference.hpp"
#include "mcstfa/simulate.hpp"
#include "support/fixtures.hpp"

using namespace mcstfa;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mcstfa_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}
}  // namespace

TEST_CASE("CSV header auto-detection and round trip") {
  TempDir dir;
  write_text(dir.file("with_header.csv"),
             "gene_a,gene_b,gene_c\n1.5,2.5,-3\n0,1e-2,4.25\n");
  const auto with = io::read_data_csv(dir.file("with_header.csv"));
  CHECK(with.n() == 2);
  CHECK(with.p() == 3);
  REQUIRE(with.column_names.size() == 3);
  CHECK(with.column_names[1] == "gene_b");
  CHECK(with.values(0, 2) == doctest::Approx(-3.0));
  CHECK(with.values(1, 1) == doctest::Approx(0.01));

  write_text(dir.file("no_header.csv"), "1,2\n3,4\n5,6\n");
  const auto without = io::read_data_csv(dir.file("no_header.csv"));
  CHECK(without.n() == 3);
  CHECK(without.column_names.empty());

  io::write_data_csv(dir.file("round.csv"), with);
  const auto back = io::read_data_csv(dir.file("round.csv"));
  CHECK(back.column_names == with.column_names);
  CHECK((back.values - with.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("CSV errors carry coordinates") {
  TempDir dir;
  write_text(dir.file("ragged.csv"), "1,2,3\n4,5\n");
  CHECK_THROWS_WITH_AS(io::read_data_csv(dir.file("ragged.csv")),
                       doctest::Contains("row 2"), io::InputError);

  write_text(dir.file("na.csv"), "a,b\n1,NA\n");
  try {
    io::read_data_csv(dir.file("na.csv"));
    FAIL("expected InputError");
  } catch (const io::InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }

  write_text(dir.file("bad.csv"), "1,2\n3,abc\n");
  CHECK_THROWS_AS(io::read_data_csv(dir.file("bad.csv")), io::InputError);
  write_text(dir.file("empty.csv"), "");
  CHECK_THROWS_AS(io::read_data_csv(dir.file("empty.csv")), io::InputError);
  CHECK_THROWS_AS(io::read_data_csv(dir.file("missing.csv")),
                  io::InputError);
}

TEST_CASE("label files: string labels encode by first occurrence") {
  TempDir dir;
  write_text(dir.file("labels.csv"), "AML\nALL\nAML\nMLL\nALL\n");
  const auto labels = io::read_labels(dir.file("labels.csv"));
  CHECK(labels == std::vector<int>{0, 1, 0, 2, 1});

  io::write_labels(dir.file("out.csv"), labels);
  CHECK(io::read_labels(dir.file("out.csv")) == labels);
}

TEST_CASE("model files round-trip and preserve the density") {
  TempDir dir;
  const auto params = fixtures::random_params(9, 2, 3, 77);
  io::ModelFileMeta meta;
  meta.model = "mcstfa";
  meta.loglik = -1234.5;
  meta.bic = -2600.25;
  meta.iterations = 42;
  meta.converged = true;
  meta.seed = 99;
  io::save_model(dir.file("model.json"), params, meta);

  const auto [loaded, meta2] = io::load_model(dir.file("model.json"));
  CHECK(meta2.model == "mcstfa");
  CHECK(meta2.loglik == doctest::Approx(-1234.5));
  CHECK(meta2.bic == doctest::Approx(-2600.25));
  CHECK(meta2.iterations == 42);
  CHECK(meta2.converged);
  CHECK(meta2.seed == 99);

  CHECK_NOTHROW(loaded.validate());
  const auto probes = fixtures::random_data(15, 9, 3);
  for (int i = 0; i < probes.n(); ++i) {
    const Eigen::VectorXd x = probes.values.row(i).transpose();
    CHECK(reference::mixture_log_density(x, loaded) ==
          doctest::Approx(reference::mixture_log_density(x, params))
              .epsilon(1e-12));
  }
}

TEST_CASE("malformed model files are rejected") {
  TempDir dir;
  write_text(dir.file("junk.json"), "{ not json");
  CHECK_THROWS_AS(io::load_model(dir.file("junk.json")), io::InputError);
  write_text(dir.file("wrong.json"), "{\"schema_version\": 999}");
  CHECK_THROWS_AS(io::load_model(dir.file("wrong.json")), io::InputError);
}

TEST_CASE("simulation specs round-trip and regenerate the same data") {
  TempDir dir;
  auto spec = simulate::reference_sim_spec(23);
  const auto original = simulate::run(spec);
  io::save_sim_spec(dir.file("spec.json"), spec);
  const auto loaded = io::load_sim_spec(dir.file("spec.json"));
  CHECK(loaded.n == spec.n);
  CHECK(loaded.seed == spec.seed);
  const auto redo = simulate::run(loaded);
  CHECK((redo.data.values - original.data.values).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(redo.labels == original.labels);

  // Explicit loadings survive the round trip and pin the draw too.
  auto pinned = spec;
  pinned.loadings = original.params.loadings;
  const auto direct = simulate::run(pinned);
  io::save_sim_spec(dir.file("pinned.json"), pinned);
  const auto redo2 = simulate::run(io::load_sim_spec(dir.file("pinned.json")));
  CHECK((redo2.data.values - direct.data.values).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("grid CSV layout") {
  TempDir dir;
  auto spec = simulate::reference_sim_spec(31);
  spec.n = 100;
  const auto sim = simulate::run(spec);
  metrics::GridConfig config;
  config.fit.max_iter = 40;
  const auto grid = metrics::select_model(sim.data, {2, 3}, {1}, config);
  io::write_grid_csv(dir.file("grid.csv"), grid);

  std::ifstream in(dir.file("grid.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header == "G,q,loglik,n_params,bic,converged,iterations");
  int rows = 0;
  for (std::string line; std::getline(in, line) && !line.empty();) ++rows;
  CHECK(rows == 2);

  std::vector<double> ari(grid.cells.size(), 0.5);
  io::write_grid_csv(dir.file("grid_ari.csv"), grid, &ari);
  std::ifstream in2(dir.file("grid_ari.csv"));
  std::getline(in2, header);
  CHECK(header == "G,q,loglik,n_params,bic,converged,iterations,ari");
}
