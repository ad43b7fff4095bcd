#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcstfa/aecm.hpp"
#include "mcstfa/init.hpp"
#include "mcstfa/model.hpp"

namespace mcstfa::metrics {

// BIC = 2 loglik - n_params log n; larger is better.
double bic(double loglik, long n_params, int n);

// Hubert-Arabie adjusted Rand index. Returns 1 for the degenerate
// all-one-cluster case by convention.
double adjusted_rand_index(const std::vector<int>& labels_a,
                           const std::vector<int>& labels_b);

struct GridConfig {
  aecm::FitConfig fit;
  init::InitConfig init;
  int restarts = 0;           // extra fits from perturbed starting labels
  std::uint64_t seed = 1;
  std::optional<std::vector<int>> init_labels;  // user-supplied partition
  int grid_threads = 0;       // concurrent (G, q) cells; 0 = all available
};

struct GridCell {
  int G = 0, q = 0;
  bool ok = false;            // fit completed without error
  std::string error;
  aecm::FitResult result;
};

struct SelectionGrid {
  std::vector<GridCell> cells;  // ordered by (G, q)
  int best_index = -1;          // best BIC among converged fits, -1 if none

  const GridCell& best() const;
};

// Fit every (G, q) cell; cells are independent and run concurrently.
// Non-converged fits are recorded but excluded from "best".
SelectionGrid select_model(const model::DataMatrix& data,
                           const std::vector<int>& g_values,
                           const std::vector<int>& q_values,
                           const GridConfig& config);

// Single-cell fit with initialization and optional restarts; the building
// block of select_model.
aecm::FitResult fit_cell(const model::DataMatrix& data, int G, int q,
                         const GridConfig& config);

}  // namespace mcstfa::metrics
