// Batch command-line interface: fitting, simulation, evaluation, and
// parsimony tables. Exit codes: 0 ok, 2 input error, 3 numerical
// failure, 4 no grid cell converged.
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcstfa/io.hpp"
#include "mcstfa/metrics.hpp"
#include "mcstfa/model.hpp"
#include "mcstfa/simulate.hpp"

namespace {

using mcstfa::io::InputError;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoConvergence = 4;

// "3" or "1..5" -> inclusive integer range.
std::vector<int> parse_range(const std::string& text, const char* what) {
  int lo = 0, hi = 0;
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, dots));
      hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": expected N or MIN..MAX, got '" +
                     text + "'");
  }
  if (lo < 1 || hi < lo)
    throw InputError(std::string(what) + ": invalid range '" + text + "'");
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

mcstfa::init::Linkage parse_linkage(const std::string& name) {
  if (name == "complete") return mcstfa::init::Linkage::Complete;
  if (name == "ward") return mcstfa::init::Linkage::Ward;
  if (name == "average") return mcstfa::init::Linkage::Average;
  throw InputError("--init: unknown linkage '" + name + "'");
}

struct FitOptions {
  std::string data_path;
  std::string components = "2..4";
  std::string factors = "1..3";
  std::string model = "mcstfa";
  double tol = 1e-5;
  int max_iter = 2000;
  double min_dof = 0.5;
  std::uint64_t seed = 1;
  std::string init_linkage = "complete";
  int restarts = 0;
  std::string labels_path;
  std::string out = "model.json";
  std::string grid_out = "grid.csv";
  std::string labels_out = "labels_pred.csv";
  int threads = 0;
};

int cmd_fit(const FitOptions& opt) {
  const auto data = mcstfa::io::read_data_csv(opt.data_path);
  const auto g_values = parse_range(opt.components, "--components");
  const auto q_values = parse_range(opt.factors, "--factors");
  if (opt.model != "mcstfa" && opt.model != "mctfa")
    throw InputError("--model: expected mcstfa or mctfa");

  std::optional<std::vector<int>> truth;
  if (!opt.labels_path.empty()) {
    truth = mcstfa::io::read_labels(opt.labels_path);
    if (static_cast<int>(truth->size()) != data.n())
      throw InputError("--labels: length does not match the data");
  }

  mcstfa::metrics::GridConfig config;
  config.fit.epsilon = opt.tol;
  config.fit.max_iter = opt.max_iter;
  config.fit.min_dof = opt.min_dof;
  config.fit.skew = opt.model == "mcstfa";
  config.fit.threads = opt.threads;
  config.init.linkage = parse_linkage(opt.init_linkage);
  config.restarts = opt.restarts;
  config.seed = opt.seed;
  config.grid_threads = opt.threads;

  const auto grid =
      mcstfa::metrics::select_model(data, g_values, q_values, config);

  std::vector<double> ari_per_cell;
  if (truth) {
    for (const auto& cell : grid.cells)
      ari_per_cell.push_back(
          cell.ok ? mcstfa::metrics::adjusted_rand_index(
                        cell.result.hard_labels, *truth)
                  : std::numeric_limits<double>::quiet_NaN());
  }
  mcstfa::io::write_grid_csv(opt.grid_out, grid,
                             truth ? &ari_per_cell : nullptr);
  for (const auto& cell : grid.cells)
    if (!cell.ok)
      std::fprintf(stderr, "cell G=%d q=%d failed: %s\n", cell.G, cell.q,
                   cell.error.c_str());

  if (grid.best_index < 0) {
    std::fprintf(stderr, "no grid cell converged\n");
    return kExitNoConvergence;
  }
  const auto& best = grid.best();

  mcstfa::io::ModelFileMeta meta;
  meta.model = opt.model;
  meta.loglik = best.result.loglik;
  meta.bic = best.result.bic;
  meta.iterations = best.result.iterations;
  meta.converged = best.result.converged;
  meta.seed = opt.seed;
  nlohmann::json cfg_json = {{"tol", opt.tol},
                             {"max_iter", opt.max_iter},
                             {"min_dof", opt.min_dof},
                             {"init", opt.init_linkage},
                             {"restarts", opt.restarts},
                             {"threads", opt.threads}};
  meta.config_json = cfg_json.dump();
  mcstfa::io::save_model(opt.out, best.result.params, meta);
  mcstfa::io::write_labels(opt.labels_out, best.result.hard_labels);

  std::printf("best: G=%d q=%d loglik=%.4f bic=%.4f iterations=%d\n", best.G,
              best.q, best.result.loglik, best.result.bic,
              best.result.iterations);
  if (truth)
    std::printf("ARI=%.4f\n", mcstfa::metrics::adjusted_rand_index(
                                  best.result.hard_labels, *truth));
  return kExitOk;
}

struct SimulateOptions {
  std::string spec_path;
  bool reference_design = false;
  std::optional<std::uint64_t> seed;
  std::string out_prefix = "sim_";
};

int cmd_simulate(const SimulateOptions& opt) {
  if (opt.reference_design != opt.spec_path.empty())
    throw InputError(
        "simulate: provide exactly one of --spec and --reference-design");
  mcstfa::simulate::SimSpec spec =
      opt.reference_design
          ? mcstfa::simulate::reference_sim_spec(opt.seed.value_or(1))
          : mcstfa::io::load_sim_spec(opt.spec_path);
  if (opt.seed) spec.seed = *opt.seed;
  spec.validate();

  const auto sim = mcstfa::simulate::run(spec);
  mcstfa::io::write_data_csv(opt.out_prefix + "data.csv", sim.data);
  mcstfa::io::write_labels(opt.out_prefix + "labels.csv", sim.labels);
  mcstfa::io::ModelFileMeta meta;
  meta.model = "mcstfa";
  meta.seed = spec.seed;
  mcstfa::io::save_model(opt.out_prefix + "params.json", sim.params, meta);
  mcstfa::io::save_sim_spec(opt.out_prefix + "spec.json", spec);
  std::printf("wrote %sdata.csv (%d x %d), %slabels.csv, %sparams.json, "
              "%sspec.json\n",
              opt.out_prefix.c_str(), sim.data.n(), sim.data.p(),
              opt.out_prefix.c_str(), opt.out_prefix.c_str(),
              opt.out_prefix.c_str());
  return kExitOk;
}

int cmd_eval(const std::string& pred_path, const std::string& true_path) {
  const auto pred = mcstfa::io::read_labels(pred_path);
  const auto truth = mcstfa::io::read_labels(true_path);
  if (pred.size() != truth.size())
    throw InputError("eval: label files have different lengths");

  std::set<int> pred_ids(pred.begin(), pred.end());
  std::set<int> true_ids(truth.begin(), truth.end());
  std::map<std::pair<int, int>, long> table;
  for (size_t i = 0; i < pred.size(); ++i) ++table[{truth[i], pred[i]}];

  // Confusion table: rows = true, cols = predicted.
  std::printf("true\\pred");
  for (int c : pred_ids) std::printf("\t%d", c);
  std::printf("\n");
  for (int r : true_ids) {
    std::printf("%d", r);
    for (int c : pred_ids) {
      const auto it = table.find({r, c});
      std::printf("\t%ld", it == table.end() ? 0L : it->second);
    }
    std::printf("\n");
  }
  std::printf("ARI=%.4f\n",
              mcstfa::metrics::adjusted_rand_index(pred, truth));
  return kExitOk;
}

struct TableOptions {
  std::string p_range;
  int q = 2;
  int G = 3;
  std::string models = "MCStFA,CCC,CUU,UUU";
  std::string out = "params_table.csv";
};

int cmd_params_table(const TableOptions& opt) {
  const auto p_values = parse_range(opt.p_range, "--p-range");
  std::vector<mcstfa::model::ModelId> ids;
  std::string token;
  for (size_t i = 0; i <= opt.models.size(); ++i) {
    if (i < opt.models.size() && opt.models[i] != ',') {
      token += opt.models[i];
      continue;
    }
    if (token.empty()) continue;
    const auto id = mcstfa::model::parse_model_id(token);
    if (!id) throw InputError("--models: unknown model '" + token + "'");
    ids.push_back(*id);
    token.clear();
  }
  if (ids.empty()) throw InputError("--models: empty list");

  const auto rows = mcstfa::model::parsimony_table(
      p_values.front(), p_values.back(), opt.q, opt.G, ids);
  std::FILE* out = std::fopen(opt.out.c_str(), "w");
  if (!out) throw InputError("cannot open " + opt.out + " for writing");
  std::fprintf(out, "model,p,q,G,n_params\n");
  for (const auto& row : rows)
    std::fprintf(out, "%s,%d,%d,%d,%ld\n",
                 mcstfa::model::model_id_name(row.model).c_str(), row.p,
                 row.q, row.G, row.count);
  std::fclose(out);
  std::printf("wrote %s (%zu rows)\n", opt.out.c_str(), rows.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixtures of common skew-t factor analyzers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file");
  app.get_config_formatter_base()->section("");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a (G, q) model grid");
  fit_cmd->fallthrough();
  fit_cmd->add_option("data", fit.data_path, "observations CSV")->required();
  fit_cmd->add_option("--components", fit.components, "G or Gmin..Gmax");
  fit_cmd->add_option("--factors", fit.factors, "q or qmin..qmax");
  fit_cmd->add_option("--model", fit.model, "mcstfa | mctfa");
  fit_cmd->add_option("--tol", fit.tol, "Aitken stopping threshold");
  fit_cmd->add_option("--max-iter", fit.max_iter, "cycle limit per fit");
  fit_cmd->add_option("--min-dof", fit.min_dof, "lower dof bound");
  fit_cmd->add_option("--seed", fit.seed, "restart-perturbation seed");
  fit_cmd->add_option("--init", fit.init_linkage,
                      "starting linkage: complete | ward | average");
  fit_cmd->add_option("--restarts", fit.restarts,
                      "extra perturbed starting partitions");
  fit_cmd->add_option("--labels", fit.labels_path,
                      "true labels CSV; adds ARI to output");
  fit_cmd->add_option("--out", fit.out, "best-model JSON path");
  fit_cmd->add_option("--grid-out", fit.grid_out, "grid CSV path");
  fit_cmd->add_option("--labels-out", fit.labels_out,
                      "predicted labels CSV path");
  fit_cmd->add_option("--threads", fit.threads, "0 = all available");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic data set");
  sim_cmd->fallthrough();
  sim_cmd->add_option("--spec", sim.spec_path, "simulation spec JSON");
  sim_cmd->add_flag("--reference-design", sim.reference_design,
                    "use the built-in 200 x 15 four-group design");
  std::uint64_t sim_seed = 0;
  auto* seed_opt = sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--out-prefix", sim.out_prefix, "output file prefix");

  std::string eval_pred, eval_true;
  auto* eval_cmd =
      app.add_subcommand("eval", "Compare two label files with the ARI");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--pred", eval_pred, "predicted labels CSV")
      ->required();
  eval_cmd->add_option("--true", eval_true, "true labels CSV")->required();

  TableOptions table;
  auto* table_cmd =
      app.add_subcommand("params-table", "Free-parameter counts by p");
  table_cmd->fallthrough();
  table_cmd->add_option("--p-range", table.p_range, "p or pmin..pmax")
      ->required();
  table_cmd->add_option("--q", table.q, "latent factors");
  table_cmd->add_option("--g", table.G, "components");
  table_cmd->add_option("--models", table.models, "comma-separated list");
  table_cmd->add_option("--out", table.out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*sim_cmd) {
      if (seed_opt->count() > 0) sim.seed = sim_seed;
      return cmd_simulate(sim);
    }
    if (*eval_cmd) return cmd_eval(eval_pred, eval_true);
    if (*table_cmd) return cmd_params_table(table);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
