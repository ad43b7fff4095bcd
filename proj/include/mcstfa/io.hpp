#pragma once

#include <string>
#include <vector>

#include "mcstfa/aecm.hpp"
#include "mcstfa/metrics.hpp"
#include "mcstfa/model.hpp"
#include "mcstfa/simulate.hpp"

namespace mcstfa::io {

// Thrown for malformed input files; carries row/column coordinates where
// applicable.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV ingestion: header auto-detection (non-numeric first row), UTF-8,
// decimal-point format only. Ragged rows and NA/blank cells are rejected
// with coordinates.
model::DataMatrix read_data_csv(const std::string& path);
void write_data_csv(const std::string& path, const model::DataMatrix& data);

// Single-column label files with arbitrary string labels; integer codes
// are assigned by first occurrence.
std::vector<std::string> read_label_strings(const std::string& path);
std::vector<int> encode_labels(const std::vector<std::string>& raw);
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

struct ModelFileMeta {
  std::string model = "mcstfa";  // "mcstfa" | "mctfa"
  double loglik = 0.0;
  double bic = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::string config_json = "{}";  // fit configuration, verbatim
};

void save_model(const std::string& path, const model::MixtureParams& params,
                const ModelFileMeta& meta);
std::pair<model::MixtureParams, ModelFileMeta> load_model(
    const std::string& path);

void save_sim_spec(const std::string& path, const simulate::SimSpec& spec);
simulate::SimSpec load_sim_spec(const std::string& path);

// Grid CSV: G,q,loglik,n_params,bic,converged,iterations[,ari]. Rows are
// sorted by (G, q); ARI column present when true labels were supplied.
void write_grid_csv(const std::string& path,
                    const metrics::SelectionGrid& grid,
                    const std::vector<double>* ari_per_cell = nullptr);

}  // namespace mcstfa::io
