#include "mcstfa/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcstfa::model {

void DataMatrix::validate() const {
  if (n() < 1 || p() < 1)
    throw std::invalid_argument("DataMatrix: requires n >= 1 and p >= 1");
  if (!values.allFinite())
    throw std::invalid_argument("DataMatrix: non-finite values present");
  if (!column_names.empty() &&
      static_cast<int>(column_names.size()) != p())
    throw std::invalid_argument("DataMatrix: column name count mismatch");
}

void MixtureParams::validate() const {
  const int G = n_components();
  if (G < 1) throw std::invalid_argument("MixtureParams: empty mixture");
  if ((weights.array() <= 0.0).any() ||
      std::fabs(weights.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("MixtureParams: weights must be positive and sum to 1");
  if (q() < 1 || q() > p())
    throw std::invalid_argument("MixtureParams: requires 1 <= q <= p");
  if (static_cast<int>(factor_means.size()) != G ||
      static_cast<int>(factor_skews.size()) != G ||
      static_cast<int>(factor_covs.size()) != G || dof.size() != G)
    throw std::invalid_argument("MixtureParams: component count mismatch");
  if ((noise_diag.array() <= 0.0).any())
    throw std::invalid_argument("MixtureParams: noise variances must be positive");
  if ((dof.array() <= 0.0).any())
    throw std::invalid_argument("MixtureParams: dof must be positive");
  for (int g = 0; g < G; ++g) {
    if (factor_means[g].size() != q() || factor_skews[g].size() != q() ||
        factor_covs[g].rows() != q() || factor_covs[g].cols() != q())
      throw std::invalid_argument("MixtureParams: factor dimension mismatch");
  }
}

ComponentView component_view(const MixtureParams& params, int g) {
  ComponentView v;
  v.mean = params.loadings * params.factor_means[g];
  v.scale = densities::LowRankScale{params.loadings, params.factor_covs[g],
                                    params.noise_diag};
  v.skew = params.loadings * params.factor_skews[g];
  v.nu = params.dof(g);
  return v;
}

namespace {

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::VectorXd component_log_densities(const Eigen::VectorXd& x,
                                        const MixtureParams& params) {
  const int G = params.n_components();
  Eigen::VectorXd out(G);
  for (int g = 0; g < G; ++g) {
    const ComponentView v = component_view(params, g);
    const densities::ScaleOps ops(v.scale);
    try {
      out(g) = densities::log_density_skew_t(x, v.mean, ops, v.skew, v.nu);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("component " + std::to_string(g) + ": " +
                               e.what());
    }
  }
  return out;
}

}  // namespace

double mixture_log_density(const Eigen::VectorXd& x,
                           const MixtureParams& params) {
  Eigen::VectorXd lds = component_log_densities(x, params) +
                        params.weights.array().log().matrix();
  return log_sum_exp(lds);
}

Eigen::MatrixXd posterior_responsibilities(const DataMatrix& data,
                                           const MixtureParams& params) {
  const int n = data.n(), G = params.n_components();
  Eigen::MatrixXd z(n, G);
  const Eigen::VectorXd log_w = params.weights.array().log();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd lds =
        component_log_densities(data.values.row(i).transpose(), params) +
        log_w;
    z.row(i) = (lds.array() - log_sum_exp(lds)).exp();
  }
  return z;
}

void orthonormalize_loadings(MixtureParams& params) {
  const int q = params.q();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(params.loadings);
  Eigen::MatrixXd qmat =
      qr.householderQ() * Eigen::MatrixXd::Identity(params.p(), q);
  Eigen::MatrixXd r = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  // Pin the R diagonal positive, then fix the column sign convention
  // (first nonzero entry of each column positive).
  for (int j = 0; j < q; ++j) {
    if (r(j, j) < 0.0) {
      r.row(j) = -r.row(j);
      qmat.col(j) = -qmat.col(j);
    }
  }
  for (int j = 0; j < q; ++j) {
    int lead = 0;
    while (lead + 1 < params.p() && std::fabs(qmat(lead, j)) <= 1e-12) ++lead;
    if (qmat(lead, j) < 0.0) {
      qmat.col(j) = -qmat.col(j);
      r.row(j) = -r.row(j);
    }
  }
  params.loadings = qmat;
  for (int g = 0; g < params.n_components(); ++g) {
    params.factor_means[g] = r * params.factor_means[g];
    params.factor_skews[g] = r * params.factor_skews[g];
    params.factor_covs[g] = r * params.factor_covs[g] * r.transpose();
    params.factor_covs[g] =
        0.5 * (params.factor_covs[g] + params.factor_covs[g].transpose());
  }
}

std::vector<int> sort_components(MixtureParams& params) {
  const int G = params.n_components();
  std::vector<int> order(G);
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd keys(G);
  for (int g = 0; g < G; ++g)
    keys(g) = params.loadings.row(0).dot(params.factor_means[g]);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys(a) < keys(b); });

  MixtureParams sorted = params;
  for (int g = 0; g < G; ++g) {
    sorted.weights(g) = params.weights(order[g]);
    sorted.factor_means[g] = params.factor_means[order[g]];
    sorted.factor_skews[g] = params.factor_skews[order[g]];
    sorted.factor_covs[g] = params.factor_covs[order[g]];
    sorted.dof(g) = params.dof(order[g]);
  }
  params = std::move(sorted);
  return order;
}

std::optional<ModelId> parse_model_id(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(c));
  if (s == "mcstfa") return ModelId::MCStFA;
  if (s == "ccc") return ModelId::CCC;
  if (s == "ccu") return ModelId::CCU;
  if (s == "cuc") return ModelId::CUC;
  if (s == "cuu") return ModelId::CUU;
  if (s == "ucc") return ModelId::UCC;
  if (s == "ucu") return ModelId::UCU;
  if (s == "uuc") return ModelId::UUC;
  if (s == "uuu") return ModelId::UUU;
  return std::nullopt;
}

std::string model_id_name(ModelId id) {
  switch (id) {
    case ModelId::MCStFA: return "MCStFA";
    case ModelId::CCC: return "CCC";
    case ModelId::CCU: return "CCU";
    case ModelId::CUC: return "CUC";
    case ModelId::CUU: return "CUU";
    case ModelId::UCC: return "UCC";
    case ModelId::UCU: return "UCU";
    case ModelId::UUC: return "UUC";
    case ModelId::UUU: return "UUU";
  }
  return "?";
}

long count_free_parameters(ModelId id, int p, int q, int G) {
  if (q < 1 || q > p || G < 1)
    throw std::domain_error("count_free_parameters: requires 1 <= q <= p, G >= 1");
  const long lp = p, lq = q, lg = G;
  const long load = lp * lq - lq * (lq - 1) / 2;  // per constrained Lambda
  switch (id) {
    case ModelId::MCStFA:
      return lg * lq * (lq + 1) / 2 + lq * (lp + 2 * lg - lq) + 2 * lg + lp - 1;
    case ModelId::CCC: return load + 2 * lg * lp + 2 * lg;
    case ModelId::CCU: return load + 2 * lg * lp + 2 * lg + lp - 1;
    case ModelId::CUC: return load + 2 * lg * lp + 3 * lg - 1;
    case ModelId::CUU: return load + 3 * lg * lp + 2 * lg - 1;
    case ModelId::UCC: return lg * load + 2 * lg * lp + 2 * lg;
    case ModelId::UCU: return lg * load + 2 * lg * lp + 2 * lg + lp - 1;
    case ModelId::UUC: return lg * load + 2 * lg * lp + 3 * lg - 1;
    case ModelId::UUU: return lg * load + 3 * lg * lp + 2 * lg - 1;
  }
  throw std::domain_error("count_free_parameters: unknown model");
}

std::vector<ParsimonyRow> parsimony_table(int p_min, int p_max, int q, int G,
                                          const std::vector<ModelId>& models) {
  if (p_min < 1 || p_max < p_min)
    throw std::domain_error("parsimony_table: invalid p range");
  std::vector<ParsimonyRow> rows;
  for (ModelId id : models)
    for (int p = p_min; p <= p_max; ++p) {
      if (q > p) continue;
      rows.push_back({id, p, q, G, count_free_parameters(id, p, q, G)});
    }
  return rows;
}

}  // namespace mcstfa::model
