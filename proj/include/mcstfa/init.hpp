#pragma once

#include <vector>

#include "mcstfa/model.hpp"

namespace mcstfa::init {

enum class Linkage { Complete, Ward, Average };

struct InitConfig {
  Linkage linkage = Linkage::Complete;
  double nu0 = 50.0;    // starting degrees of freedom
  double skew0 = 1.0;   // starting factor-space skewness entry
};

// Deterministic agglomerative clustering on Euclidean distances, cut at
// G groups. Ties in merge distance break by smallest pair index. Labels
// are numbered by first occurrence.
std::vector<int> hierarchical_labels(const model::DataMatrix& data, int G,
                                     Linkage linkage = Linkage::Complete);

// Variant for fitting starts: if the G-cut leaves clusters smaller than
// min_size (heavy-tailed data often isolates a couple of outliers), the
// tree is cut progressively deeper until G adequately sized clusters
// exist; the remaining points join the nearest kept centroid.
std::vector<int> robust_hierarchical_labels(const model::DataMatrix& data,
                                            int G,
                                            Linkage linkage = Linkage::Complete,
                                            int min_size = 3);

// Starting values from a label partition: principal axes of the pooled
// within-cluster covariance for Lambda, per-cluster factor moments,
// nu_g = nu0, zeta_g = skew0 * ones(q).
model::MixtureParams initial_params(const model::DataMatrix& data,
                                    const std::vector<int>& labels, int q,
                                    const InitConfig& config = {});

}  // namespace mcstfa::init
