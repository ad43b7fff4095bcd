#include "mcstfa/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcstfa::io {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  return out;
}

json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_to_json(const MatrixXd& m) {  // row-major flat
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

VectorXd vec_from_json(const json& a) {
  VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(static_cast<int>(i)) = a[i];
  return v;
}

MatrixXd mat_from_json(const json& a, int rows, int cols) {
  if (static_cast<int>(a.size()) != rows * cols)
    throw InputError("matrix field has wrong length");
  MatrixXd m(rows, cols);
  size_t k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = a[k++];
  return m;
}

}  // namespace

model::DataMatrix read_data_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  model::DataMatrix data;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  size_t width = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (first_content_row) {
      // Header auto-detection: a non-numeric first row is column names.
      bool numeric = true;
      double tmp;
      for (const auto& f : fields)
        if (!parse_double(f, tmp)) {
          numeric = false;
          break;
        }
      width = fields.size();
      first_content_row = false;
      if (!numeric) {
        data.column_names = fields;
        continue;
      }
    }
    if (fields.size() != width)
      throw InputError(path + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(width));
    std::vector<double> row(width);
    for (size_t j = 0; j < width; ++j) {
      if (fields[j].empty() || fields[j] == "NA" || fields[j] == "nan")
        throw InputError(path + ": missing value at row " +
                         std::to_string(line_no) + ", column " +
                         std::to_string(j + 1));
      if (!parse_double(fields[j], row[j]))
        throw InputError(path + ": non-numeric value '" + fields[j] +
                         "' at row " + std::to_string(line_no) + ", column " +
                         std::to_string(j + 1));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path + ": no data rows");
  data.values.resize(static_cast<int>(rows.size()), static_cast<int>(width));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < width; ++j)
      data.values(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  data.validate();
  return data;
}

void write_data_csv(const std::string& path, const model::DataMatrix& data) {
  std::ofstream out = open_out(path);
  if (!data.column_names.empty()) {
    for (int j = 0; j < data.p(); ++j)
      out << (j ? "," : "") << data.column_names[j];
    out << "\n";
  }
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j)
      out << (j ? "," : "") << fmt_double(data.values(i, j));
    out << "\n";
  }
}

std::vector<std::string> read_label_strings(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (!t.empty()) labels.push_back(t);
  }
  if (labels.empty()) throw InputError(path + ": empty label file");
  return labels;
}

std::vector<int> encode_labels(const std::vector<std::string>& raw) {
  std::vector<int> out;
  std::vector<std::string> seen;
  out.reserve(raw.size());
  for (const auto& s : raw) {
    int code = -1;
    for (size_t k = 0; k < seen.size(); ++k)
      if (seen[k] == s) {
        code = static_cast<int>(k);
        break;
      }
    if (code < 0) {
      code = static_cast<int>(seen.size());
      seen.push_back(s);
    }
    out.push_back(code);
  }
  return out;
}

std::vector<int> read_labels(const std::string& path) {
  return encode_labels(read_label_strings(path));
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out = open_out(path);
  for (int l : labels) out << l << "\n";
}

void save_model(const std::string& path, const model::MixtureParams& params,
                const ModelFileMeta& meta) {
  params.validate();
  json j;
  j["schema_version"] = 1;
  j["model"] = meta.model;
  j["p"] = params.p();
  j["q"] = params.q();
  j["G"] = params.n_components();
  j["weights"] = vec_to_json(params.weights);
  j["loadings"] = mat_to_json(params.loadings);
  j["factor_means"] = json::array();
  j["factor_skews"] = json::array();
  j["factor_covs"] = json::array();
  for (int g = 0; g < params.n_components(); ++g) {
    j["factor_means"].push_back(vec_to_json(params.factor_means[g]));
    j["factor_skews"].push_back(vec_to_json(params.factor_skews[g]));
    j["factor_covs"].push_back(mat_to_json(params.factor_covs[g]));
  }
  j["noise_diag"] = vec_to_json(params.noise_diag);
  j["dof"] = vec_to_json(params.dof);
  j["fit"] = {{"loglik", meta.loglik},   {"bic", meta.bic},
              {"iterations", meta.iterations}, {"converged", meta.converged},
              {"seed", meta.seed},
              {"config", json::parse(meta.config_json)}};
  open_out(path) << j.dump(2) << "\n";
}

std::pair<model::MixtureParams, ModelFileMeta> load_model(
    const std::string& path) {
  json j;
  try {
    open_in(path) >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
  try {
    const int p = j.at("p"), q = j.at("q"), G = j.at("G");
    model::MixtureParams params;
    params.weights = vec_from_json(j.at("weights"));
    params.loadings = mat_from_json(j.at("loadings"), p, q);
    for (int g = 0; g < G; ++g) {
      params.factor_means.push_back(vec_from_json(j.at("factor_means")[g]));
      params.factor_skews.push_back(vec_from_json(j.at("factor_skews")[g]));
      params.factor_covs.push_back(mat_from_json(j.at("factor_covs")[g], q, q));
    }
    params.noise_diag = vec_from_json(j.at("noise_diag"));
    params.dof = vec_from_json(j.at("dof"));
    params.validate();

    ModelFileMeta meta;
    meta.model = j.at("model");
    const json& fit = j.at("fit");
    meta.loglik = fit.at("loglik");
    meta.bic = fit.at("bic");
    meta.iterations = fit.at("iterations");
    meta.converged = fit.at("converged");
    meta.seed = fit.at("seed");
    meta.config_json = fit.at("config").dump();
    return {std::move(params), std::move(meta)};
  } catch (const json::exception& e) {
    throw InputError(path + ": bad model file: " + e.what());
  }
}

void save_sim_spec(const std::string& path, const simulate::SimSpec& spec) {
  spec.validate();
  json j;
  j["schema_version"] = 1;
  j["generator"] = "mt19937_64";
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["G"] = spec.G;
  j["seed"] = spec.seed;
  j["weights"] = vec_to_json(spec.weights);
  j["dof"] = vec_to_json(spec.dof);
  j["factor_means"] = json::array();
  j["factor_skews"] = json::array();
  j["factor_covs"] = json::array();
  for (int g = 0; g < spec.G; ++g) {
    j["factor_means"].push_back(vec_to_json(spec.factor_means[g]));
    j["factor_skews"].push_back(vec_to_json(spec.factor_skews[g]));
    j["factor_covs"].push_back(mat_to_json(spec.factor_covs[g]));
  }
  j["noise_diag"] = vec_to_json(spec.noise_diag.size() ? spec.noise_diag
                                                       : VectorXd::Ones(spec.p));
  if (spec.loadings) {
    j["loadings_source"] = "file";
    j["loadings"] = mat_to_json(*spec.loadings);
  } else {
    j["loadings_source"] = "standard-normal";
  }
  open_out(path) << j.dump(2) << "\n";
}

simulate::SimSpec load_sim_spec(const std::string& path) {
  json j;
  try {
    open_in(path) >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
  try {
    simulate::SimSpec spec;
    spec.n = j.at("n");
    spec.p = j.at("p");
    spec.q = j.at("q");
    spec.G = j.at("G");
    spec.seed = j.at("seed");
    spec.weights = vec_from_json(j.at("weights"));
    spec.dof = vec_from_json(j.at("dof"));
    for (int g = 0; g < spec.G; ++g) {
      spec.factor_means.push_back(vec_from_json(j.at("factor_means")[g]));
      spec.factor_skews.push_back(vec_from_json(j.at("factor_skews")[g]));
      spec.factor_covs.push_back(
          mat_from_json(j.at("factor_covs")[g], spec.q, spec.q));
    }
    if (j.contains("noise_diag"))
      spec.noise_diag = vec_from_json(j.at("noise_diag"));
    if (j.value("loadings_source", "standard-normal") == "file")
      spec.loadings = mat_from_json(j.at("loadings"), spec.p, spec.q);
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw InputError(path + ": bad simulation spec: " + e.what());
  }
}

void write_grid_csv(const std::string& path,
                    const metrics::SelectionGrid& grid,
                    const std::vector<double>* ari_per_cell) {
  std::ofstream out = open_out(path);
  out << "G,q,loglik,n_params,bic,converged,iterations";
  if (ari_per_cell) out << ",ari";
  out << "\n";
  for (size_t idx = 0; idx < grid.cells.size(); ++idx) {
    const metrics::GridCell& cell = grid.cells[idx];
    out << cell.G << "," << cell.q << ",";
    if (cell.ok) {
      out << fmt_double(cell.result.loglik) << ","
          << cell.result.n_free_parameters << ","
          << fmt_double(cell.result.bic) << ","
          << (cell.result.converged ? 1 : 0) << "," << cell.result.iterations;
    } else {
      out << "NA,NA,NA,0,0";
    }
    if (ari_per_cell) {
      const double ari = (*ari_per_cell)[idx];
      out << "," << (std::isfinite(ari) ? fmt_double(ari) : "NA");
    }
    out << "\n";
  }
}

}  // namespace mcstfa::io
