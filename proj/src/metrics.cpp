#include "mcstfa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "mcstfa/simulate.hpp"

namespace mcstfa::metrics {

double bic(double loglik, long n_params, int n) {
  if (n < 1 || n_params < 0) throw std::domain_error("bic: invalid inputs");
  return 2.0 * loglik - n_params * std::log(static_cast<double>(n));
}

double adjusted_rand_index(const std::vector<int>& labels_a,
                           const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size())
    throw std::invalid_argument("adjusted_rand_index: length mismatch");
  const auto n = static_cast<long long>(labels_a.size());
  if (n == 0) throw std::invalid_argument("adjusted_rand_index: empty input");

  std::map<std::pair<int, int>, long long> table;
  std::map<int, long long> row_sums, col_sums;
  for (size_t i = 0; i < labels_a.size(); ++i) {
    ++table[{labels_a[i], labels_b[i]}];
    ++row_sums[labels_a[i]];
    ++col_sums[labels_b[i]];
  }
  auto choose2 = [](long long k) { return 0.5 * k * (k - 1); };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : table) sum_cells += choose2(count);
  for (const auto& [key, count] : row_sums) sum_rows += choose2(count);
  for (const auto& [key, count] : col_sums) sum_cols += choose2(count);

  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (std::fabs(denom) < 1e-12) return 1.0;  // both partitions degenerate
  return (sum_cells - expected) / denom;
}

namespace {

std::vector<int> perturb_labels(const std::vector<int>& labels, int G,
                                std::uint64_t seed) {
  simulate::Rng rng(seed);
  std::vector<int> out = labels;
  // Reassign roughly 15% of the points at random.
  for (auto& l : out)
    if (rng.uniform() < 0.15)
      l = static_cast<int>(rng.uniform() * G) % G;
  return out;
}

}  // namespace

aecm::FitResult fit_cell(const model::DataMatrix& data, int G, int q,
                         const GridConfig& config) {
  std::vector<std::vector<int>> candidates;
  if (config.init_labels) {
    int max_label = 0;
    for (int l : *config.init_labels) max_label = std::max(max_label, l);
    if (max_label + 1 != G)
      throw std::invalid_argument(
          "fit_cell: supplied starting labels have wrong group count");
    candidates.push_back(*config.init_labels);
  } else {
    // Configured linkage first, then the other linkages as fallbacks;
    // heavy tails often break one tree but not all three.
    const int min_size = std::max(3, q + 2);
    std::vector<init::Linkage> order = {config.init.linkage};
    for (init::Linkage l : {init::Linkage::Complete, init::Linkage::Ward,
                            init::Linkage::Average})
      if (l != config.init.linkage) order.push_back(l);
    for (init::Linkage l : order) {
      auto labels = init::robust_hierarchical_labels(data, G, l, min_size);
      if (std::find(candidates.begin(), candidates.end(), labels) ==
          candidates.end())
        candidates.push_back(std::move(labels));
    }
    for (int r = 1; r <= config.restarts; ++r)
      candidates.push_back(perturb_labels(candidates.front(), G,
                                          config.seed + 7919ull * r));
  }

  auto run = [&](const std::vector<int>& ls, const aecm::FitConfig& fit) {
    model::MixtureParams start =
        init::initial_params(data, ls, q, config.init);
    return aecm::fit(data, start, fit);
  };

  if (candidates.size() == 1) return run(candidates.front(), config.fit);

  // Short screening runs rank the candidates by loglik; only the winner
  // is polished to full convergence.
  aecm::FitConfig screen = config.fit;
  screen.max_iter = std::min(config.fit.max_iter, 75);
  int best_idx = -1;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::exception_ptr first_error;
  for (size_t i = 0; i < candidates.size(); ++i) {
    try {
      const aecm::FitResult r = run(candidates[i], screen);
      if (r.loglik > best_ll) {
        best_ll = r.loglik;
        best_idx = static_cast<int>(i);
      }
    } catch (const std::exception&) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (best_idx < 0) std::rethrow_exception(first_error);
  return run(candidates[best_idx], config.fit);
}

const GridCell& SelectionGrid::best() const {
  if (best_index < 0)
    throw std::runtime_error("SelectionGrid: no converged fit");
  return cells[static_cast<size_t>(best_index)];
}

SelectionGrid select_model(const model::DataMatrix& data,
                           const std::vector<int>& g_values,
                           const std::vector<int>& q_values,
                           const GridConfig& config) {
  if (g_values.empty() || q_values.empty())
    throw std::invalid_argument("select_model: empty grid");

  SelectionGrid grid;
  for (int G : g_values)
    for (int q : q_values) {
      GridCell cell;
      cell.G = G;
      cell.q = q;
      grid.cells.push_back(std::move(cell));
    }
  std::sort(grid.cells.begin(), grid.cells.end(),
            [](const GridCell& a, const GridCell& b) {
              return std::make_pair(a.G, a.q) < std::make_pair(b.G, b.q);
            });

  const int n_cells = static_cast<int>(grid.cells.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(config.grid_threads > 0 ? config.grid_threads : 1)
#endif
  for (int idx = 0; idx < n_cells; ++idx) {
    GridCell& cell = grid.cells[idx];
    try {
      cell.result = fit_cell(data, cell.G, cell.q, config);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }

  for (int idx = 0; idx < n_cells; ++idx) {
    const GridCell& cell = grid.cells[idx];
    if (!cell.ok || !cell.result.converged) continue;
    if (grid.best_index < 0 ||
        cell.result.bic > grid.cells[grid.best_index].result.bic)
      grid.best_index = idx;
  }
  if (std::none_of(grid.cells.begin(), grid.cells.end(),
                   [](const GridCell& c) { return c.ok; }))
    throw std::runtime_error("select_model: every grid cell failed");
  return grid;
}

}  // namespace mcstfa::metrics
