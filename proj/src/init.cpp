#include "mcstfa/init.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcstfa::init {

namespace {
using Eigen::MatrixXd;
using Eigen::VectorXd;
}  // namespace

std::vector<int> hierarchical_labels(const model::DataMatrix& data, int G,
                                     Linkage linkage) {
  data.validate();
  const int n = data.n();
  if (G < 1 || G > n)
    throw std::invalid_argument("hierarchical_labels: requires 1 <= G <= n");

  // Pairwise dissimilarities; Ward works on squared Euclidean distances.
  MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double sq =
          (data.values.row(i) - data.values.row(j)).squaredNorm();
      d(i, j) = linkage == Linkage::Ward ? sq : std::sqrt(sq);
    }

  std::vector<int> cluster_of(n);
  std::vector<int> size(n, 1);
  std::vector<bool> active(n, true);
  for (int i = 0; i < n; ++i) cluster_of[i] = i;

  for (int merges = 0; merges < n - G; ++merges) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (d(i, j) < best) {
          best = d(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    // Merge bj into bi (Lance-Williams updates).
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double nd = 0.0;
      switch (linkage) {
        case Linkage::Complete:
          nd = std::max(d(bi, k), d(bj, k));
          break;
        case Linkage::Average:
          nd = (size[bi] * d(bi, k) + size[bj] * d(bj, k)) /
               (size[bi] + size[bj]);
          break;
        case Linkage::Ward: {
          const double denom = size[bi] + size[bj] + size[k];
          nd = ((size[bi] + size[k]) * d(bi, k) +
                (size[bj] + size[k]) * d(bj, k) - size[k] * d(bi, bj)) /
               denom;
          break;
        }
      }
      d(bi, k) = d(k, bi) = nd;
    }
    size[bi] += size[bj];
    active[bj] = false;
    for (int i = 0; i < n; ++i)
      if (cluster_of[i] == bj) cluster_of[i] = bi;
  }

  // Relabel clusters 0..G-1 by first occurrence.
  std::vector<int> labels(n), remap(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (remap[cluster_of[i]] < 0) remap[cluster_of[i]] = next++;
    labels[i] = remap[cluster_of[i]];
  }
  return labels;
}

std::vector<int> robust_hierarchical_labels(const model::DataMatrix& data,
                                            int G, Linkage linkage,
                                            int min_size) {
  const int n = data.n();
  if (G < 1 || G > n)
    throw std::invalid_argument(
        "robust_hierarchical_labels: requires 1 <= G <= n");
  min_size = std::max(min_size, 2);

  for (int cut = G; cut <= std::min(n, G + 12); ++cut) {
    const std::vector<int> raw = hierarchical_labels(data, cut, linkage);
    std::vector<int> counts(cut, 0);
    for (int l : raw) ++counts[l];

    std::vector<int> big;
    for (int c = 0; c < cut; ++c)
      if (counts[c] >= min_size) big.push_back(c);
    if (static_cast<int>(big.size()) < G) continue;

    // Keep the G largest adequate clusters (ties: smaller label first).
    std::stable_sort(big.begin(), big.end(), [&](int a, int b) {
      return counts[a] > counts[b];
    });
    big.resize(G);
    std::sort(big.begin(), big.end());

    const int p = data.p();
    std::vector<int> keep_index(cut, -1);
    std::vector<VectorXd> centroids(G, VectorXd::Zero(p));
    for (int k = 0; k < G; ++k) keep_index[big[k]] = k;
    for (int i = 0; i < n; ++i)
      if (keep_index[raw[i]] >= 0)
        centroids[keep_index[raw[i]]] += data.values.row(i).transpose();
    for (int k = 0; k < G; ++k) centroids[k] /= counts[big[k]];

    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      if (keep_index[raw[i]] >= 0) {
        labels[i] = keep_index[raw[i]];
        continue;
      }
      int nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < G; ++k) {
        const double dist =
            (data.values.row(i).transpose() - centroids[k]).squaredNorm();
        if (dist < best) {
          best = dist;
          nearest = k;
        }
      }
      labels[i] = nearest;
    }
    // Renumber by first occurrence, matching hierarchical_labels.
    std::vector<int> remap(G, -1), out(n);
    int next = 0;
    for (int i = 0; i < n; ++i) {
      if (remap[labels[i]] < 0) remap[labels[i]] = next++;
      out[i] = remap[labels[i]];
    }
    return out;
  }
  return hierarchical_labels(data, G, linkage);
}

model::MixtureParams initial_params(const model::DataMatrix& data,
                                    const std::vector<int>& labels, int q,
                                    const InitConfig& config) {
  data.validate();
  const int n = data.n(), p = data.p();
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("initial_params: label length mismatch");
  if (q < 1 || q >= p)
    throw std::invalid_argument("initial_params: requires 1 <= q < p");
  int G = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("initial_params: negative label");
    G = std::max(G, l + 1);
  }

  std::vector<int> counts(G, 0);
  for (int l : labels) ++counts[l];
  for (int g = 0; g < G; ++g)
    if (counts[g] < 2)
      throw std::invalid_argument("initial_params: cluster " +
                                  std::to_string(g) + " has fewer than 2 members");

  std::vector<VectorXd> means(G, VectorXd::Zero(p));
  for (int i = 0; i < n; ++i) means[labels[i]] += data.values.row(i).transpose();
  for (int g = 0; g < G; ++g) means[g] /= counts[g];

  std::vector<MatrixXd> covs(G, MatrixXd::Zero(p, p));
  MatrixXd pooled = MatrixXd::Zero(p, p);
  for (int i = 0; i < n; ++i) {
    const VectorXd c = data.values.row(i).transpose() - means[labels[i]];
    covs[labels[i]] += c * c.transpose();
  }
  for (int g = 0; g < G; ++g) {
    pooled += covs[g];
    covs[g] /= counts[g];
  }
  pooled /= n;

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(pooled);
  // Top-q principal axes (eigenvalues ascending in Eigen), sign convention:
  // first nonzero entry of each column positive.
  MatrixXd lambda(p, q);
  for (int j = 0; j < q; ++j) {
    VectorXd v = es.eigenvectors().col(p - 1 - j);
    int lead = 0;
    while (lead + 1 < p && std::fabs(v(lead)) <= 1e-12) ++lead;
    if (v(lead) < 0.0) v = -v;
    lambda.col(j) = v;
  }

  const double var_scale =
      std::max(pooled.diagonal().mean(), 1e-12);
  const double psi_min = 1e-6 * var_scale;

  model::MixtureParams params;
  params.loadings = lambda;
  params.weights.resize(G);
  params.dof = VectorXd::Constant(G, config.nu0);
  params.noise_diag =
      (pooled.diagonal() -
       (lambda * (lambda.transpose() * pooled * lambda) * lambda.transpose())
           .diagonal())
          .cwiseMax(psi_min);
  params.factor_means.resize(G);
  params.factor_skews.resize(G);
  params.factor_covs.resize(G);
  for (int g = 0; g < G; ++g) {
    params.weights(g) = static_cast<double>(counts[g]) / n;
    params.factor_means[g] = lambda.transpose() * means[g];
    params.factor_skews[g] = VectorXd::Constant(q, config.skew0);
    MatrixXd omega = lambda.transpose() * covs[g] * lambda;
    omega = 0.5 * (omega + omega.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> oes(omega);
    const double floor =
        std::max(1e-8 * var_scale,
                 1e-10 * std::max(1.0, oes.eigenvalues().maxCoeff()));
    params.factor_covs[g] = oes.eigenvectors() *
                            oes.eigenvalues().cwiseMax(floor).asDiagonal() *
                            oes.eigenvectors().transpose();
  }
  params.validate();
  return params;
}

}  // namespace mcstfa::init
