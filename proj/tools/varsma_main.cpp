#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "varsma/errors.hpp"
#include "varsma/gls.hpp"
#include "varsma/io.hpp"
#include "varsma/optimizer.hpp"
#include "varsma/simulate.hpp"
#include "varsma/stability.hpp"
#include "varsma/verify.hpp"

namespace {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r > 0 ? rows[0].size() : 0;
  Eigen::MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw varsma::ValidationError("ragged matrix in JSON document");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

struct CommonArgs {
  std::string input;
  std::string output;
  int p = 0;
  int q = 0;
  bool trend = true;
  int starts = 0;
  std::uint64_t seed = 0;
  std::string bounds;
  int resolution = 25;
  int jobs = 1;
  double tol = 1e-6;
};

varsma::GeneratorParams params_from_json(const json& doc) {
  varsma::GeneratorParams params;
  params.spec.k = doc.at("k").get<int>();
  params.spec.p = doc.at("p").get<int>();
  params.spec.q = doc.at("q").get<int>();
  params.mu = vector_from_json(doc.at("mu")).transpose();
  for (const auto& phi : doc.at("phis")) params.phis.push_back(matrix_from_json(phi));
  params.theta = varsma::make_theta(vector_from_json(doc.at("theta")));
  params.omega = matrix_from_json(doc.at("omega"));
  if (doc.contains("burn_in")) params.burn_in = doc.at("burn_in").get<int>();
  if (doc.contains("seed")) params.seed = doc.at("seed").get<std::uint64_t>();
  return params;
}

json params_to_json(const varsma::GeneratorParams& params) {
  json doc;
  doc["k"] = params.spec.k;
  doc["p"] = params.spec.p;
  doc["q"] = params.spec.q;
  doc["mu"] = to_json(Eigen::VectorXd(params.mu.transpose()));
  json phis = json::array();
  for (const auto& phi : params.phis) phis.push_back(to_json(phi));
  doc["phis"] = std::move(phis);
  doc["theta"] = to_json(params.theta.coeffs());
  doc["omega"] = to_json(params.omega);
  doc["burn_in"] = params.burn_in;
  doc["seed"] = params.seed;
  return doc;
}

int cmd_simulate(const CommonArgs& args, const std::string& params_path, int rows, int k_flag) {
  varsma::GeneratorParams params;
  bool sampled = false;
  if (!params_path.empty()) {
    std::ifstream in(params_path);
    if (!in) throw varsma::ValidationError("cannot open '" + params_path + "'");
    params = params_from_json(json::parse(in));
    if (args.seed != 0) params.seed = args.seed;
  } else {
    sampled = true;
    std::mt19937_64 rng(args.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    params.spec = {k_flag, args.p, args.q, true};
    params.mu.resize(k_flag);
    for (int i = 0; i < k_flag; ++i) params.mu(i) = gauss(rng);
    if (args.p > 0) params.phis = varsma::random_stationary_ar(k_flag, args.p, rng);
    if (args.q > 0) params.theta = varsma::sample_stable(args.q, rng);
    params.omega = varsma::random_spd(k_flag, rng);
    params.seed = args.seed;
  }

  const varsma::SeriesMatrix data = varsma::gen_varsma(params, rows);
  std::vector<std::string> header;
  for (int j = 0; j < params.spec.k; ++j) header.push_back("x" + std::to_string(j + 1));
  varsma::write_csv(args.output, data, header);

  if (sampled) {
    std::ofstream side(args.output + ".params.json");
    if (!side) throw varsma::ValidationError("cannot write parameter sidecar");
    side << params_to_json(params).dump(2) << '\n';
  }
  std::cout << "wrote " << rows << " rows x " << params.spec.k << " columns to " << args.output
            << (sampled ? " (sampled parameters echoed to sidecar)" : "") << '\n';
  return 0;
}

json fit_to_json(const varsma::ModelSpec& spec, const varsma::FitResult& result) {
  const varsma::GlsFit& fit = result.fit;
  const int r = spec.n_regressors();
  const int n_params = spec.q + r * spec.k + spec.k * (spec.k + 1) / 2;
  const double t_eff = fit.aux.t_effective;

  json doc;
  doc["model"] = spec.q == 0 ? "VAR (OLS)" : "VARsMA";
  doc["k"] = spec.k;
  doc["p"] = spec.p;
  doc["q"] = spec.q;
  doc["trend"] = spec.trend;
  doc["t_effective"] = fit.aux.t_effective;
  doc["theta"] = to_json(result.theta.coeffs());
  if (spec.trend) doc["mu"] = to_json(Eigen::VectorXd(fit.mu.transpose()));
  json phis = json::array();
  for (const auto& phi : fit.phis) phis.push_back(to_json(phi));
  doc["phis"] = std::move(phis);
  doc["coefficient_convention"] =
      "x_t = mu + x_{t-1} phi_1 + ... + x_{t-p} phi_p + ma(q) noise; "
      "rows are time points and coefficient matrices right-multiply";
  doc["omega"] = to_json(fit.omega);
  doc["nllk"] = fit.nllk;
  doc["grad_norm"] = result.grad_norm;
  doc["converged"] = result.converged;
  doc["starts_used"] = result.starts_used;
  doc["n_params"] = n_params;
  doc["aic"] = 2.0 * fit.nllk + 2.0 * n_params;
  doc["bic"] = 2.0 * fit.nllk + std::log(t_eff) * n_params;
  doc["omega_floored"] = fit.aux.omega_floored;
  doc["gram_condition"] = fit.aux.gram_condition;
  json starts = json::array();
  for (const auto& s : result.per_start) {
    json entry;
    entry["theta_init"] = to_json(s.theta_init);
    entry["theta_final"] = to_json(s.theta_final);
    entry["nllk"] = s.nllk;
    entry["status"] = s.status;
    starts.push_back(std::move(entry));
  }
  doc["per_start"] = std::move(starts);
  return doc;
}

int cmd_fit(const CommonArgs& args) {
  const varsma::CsvTable table = varsma::read_csv(args.input);
  const varsma::ModelSpec spec{static_cast<int>(table.values.cols()), args.p, args.q, args.trend};
  varsma::FitOptions options;
  options.n_starts = args.starts;
  options.seed = args.seed;
  options.jobs = args.jobs;
  options.grad_tol = args.tol;

  const varsma::FitResult result = varsma::fit(spec, table.values, options);
  const json doc = fit_to_json(spec, result);
  if (!args.output.empty()) {
    std::ofstream out(args.output);
    if (!out) throw varsma::ValidationError("cannot open '" + args.output + "' for writing");
    out << doc.dump(2) << '\n';
  }
  std::cout << doc.dump(2) << '\n';
  return result.converged ? 0 : 2;
}

int cmd_grid(const CommonArgs& args) {
  const varsma::CsvTable table = varsma::read_csv(args.input);
  const varsma::ModelSpec spec{static_cast<int>(table.values.cols()), args.p, args.q, args.trend};
  varsma::GridOptions options;
  options.resolution = args.resolution;
  options.jobs = args.jobs;
  if (!args.bounds.empty()) {
    std::vector<double> vals;
    std::stringstream ss(args.bounds);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != 2 * args.q)
      throw varsma::ValidationError("--bounds needs lo,hi per theta coordinate");
    options.lo.resize(args.q);
    options.hi.resize(args.q);
    for (int d = 0; d < args.q; ++d) {
      options.lo(d) = vals[2 * d];
      options.hi(d) = vals[2 * d + 1];
    }
  }

  const varsma::LikelihoodGrid grid = varsma::grid_nllk(spec, table.values, options);

  std::ofstream out(args.output);
  if (!out) throw varsma::ValidationError("cannot open '" + args.output + "' for writing");
  out << (args.q == 2 ? "theta1,theta2,stable,nllk" : "theta1,stable,nllk") << '\n';
  for (Eigen::Index i = 0; i < grid.nllk.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.nllk.cols(); ++j) {
      out << varsma::format_g17(grid.axes[0](i));
      if (args.q == 2) out << ',' << varsma::format_g17(grid.axes[1](j));
      out << ',' << (grid.mask(i, j) ? 1 : 0) << ',';
      if (grid.mask(i, j)) out << varsma::format_g17(grid.nllk(i, j));
      out << '\n';
    }
  }
  std::cout << "wrote " << grid.nllk.size() << " grid points to " << args.output << '\n';
  return 0;
}

int cmd_verify(double tol, std::uint64_t seed, bool inject) {
  varsma::VerifyOptions options;
  options.tol_identity = tol;
  options.tol_log_det = tol;
  if (seed != 0) options.seed = seed;
  options.inject_sign_error = inject;
  const varsma::VerifyReport report = varsma::run_verify_battery(options, &std::cout);
  double worst = 0.0;
  for (const auto& line : report.lines) worst = std::max(worst, line.deviation);
  std::cout << (report.all_pass ? "all checks passed" : "CHECKS FAILED") << "  (worst deviation "
            << worst << ")\n";
  return report.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VARsMA: vector autoregression with a scalar moving-average polynomial"};
  app.require_subcommand(1);
  CommonArgs args;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic sample path as CSV");
  std::string params_path;
  int rows = 500;
  int k_flag = 1;
  sim->add_option("--output", args.output, "output CSV path")->required();
  sim->add_option("--params", params_path, "JSON parameter file (sampled when absent)");
  sim->add_option("-n,--rows", rows, "total rows to generate");
  sim->add_option("-k", k_flag, "series count when sampling parameters");
  sim->add_option("-p", args.p, "AR order when sampling parameters");
  sim->add_option("-q", args.q, "MA order when sampling parameters");
  sim->add_option("--seed", args.seed, "RNG seed");

  auto* fit_cmd = app.add_subcommand("fit", "estimate a VARsMA model from CSV data");
  fit_cmd->add_option("--input", args.input, "input CSV (rows = time, columns = series)")
      ->required();
  fit_cmd->add_option("--output", args.output, "write the JSON result document here");
  fit_cmd->add_option("-p", args.p, "AR order");
  fit_cmd->add_option("-q", args.q, "MA order");
  fit_cmd->add_flag("--trend,!--no-trend", args.trend, "include the intercept (default on)");
  fit_cmd->add_option("--starts", args.starts, "optimizer starts (default 5, 10 for q >= 3)");
  fit_cmd->add_option("--seed", args.seed, "RNG seed for the start sampler");
  fit_cmd->add_option("--tol", args.tol, "gradient-norm convergence tolerance");
  fit_cmd->add_option("--jobs", args.jobs, "concurrent starts");

  auto* grid_cmd = app.add_subcommand("grid", "tabulate the concentrated NLLK on a theta grid");
  grid_cmd->add_option("--input", args.input, "input CSV")->required();
  grid_cmd->add_option("--output", args.output, "output table path")->required();
  grid_cmd->add_option("-p", args.p, "AR order");
  grid_cmd->add_option("-q", args.q, "MA order (1 or 2)");
  grid_cmd->add_flag("--trend,!--no-trend", args.trend, "include the intercept (default on)");
  grid_cmd->add_option("--bounds", args.bounds, "lo,hi per coordinate, e.g. -2,2,-1,1");
  grid_cmd->add_option("--resolution", args.resolution, "points per axis");
  grid_cmd->add_option("--jobs", args.jobs, "concurrent evaluations");

  auto* verify_cmd = app.add_subcommand("verify", "run the built-in identity battery");
  double verify_tol = 1e-10;
  bool inject = false;
  std::uint64_t verify_seed = 0;
  verify_cmd->add_option("--tol", verify_tol, "identity tolerance");
  verify_cmd->add_option("--seed", verify_seed, "battery RNG seed");
  verify_cmd->add_flag("--inject-sign-error", inject, "self-test: force one failing entry")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(args, params_path, rows, k_flag);
    if (fit_cmd->parsed()) return cmd_fit(args);
    if (grid_cmd->parsed()) return cmd_grid(args);
    if (verify_cmd->parsed()) return cmd_verify(verify_tol, verify_seed, inject);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
