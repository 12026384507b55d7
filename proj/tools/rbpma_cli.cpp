// Command-line front end: solve single instances, run the synthetic
// block-model benchmark, build Gaussian kernels, cluster, and evaluate
// labelings. Exit codes: 0 success/converged, 2 solver hit max_iter,
// 64 usage or unreadable input, 65 bad data, 70 numerical failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbpma/rbpma.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMaxIter = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNumeric = 70;

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct ManifestWriter {
  json body;
  Clock::time_point start = Clock::now();

  explicit ManifestWriter(const std::string& command) {
    body["command"] = command;
    body["tool_version"] = rbpma::version();
  }

  void finish(const std::vector<std::string>& outputs) {
    body["outputs"] = outputs;
    body["wall_clock_seconds"] =
        std::chrono::duration<double>(Clock::now() - start).count();
    for (const std::string& path : outputs) {
      std::ofstream out(path + ".manifest.json");
      if (!out) throw rbpma::IoError("cannot write '" + path + ".manifest.json'");
      out << body.dump(2) << '\n';
    }
  }
};

rbpma::SymmetricMatrix load_symmetric(const std::string& path) {
  Eigen::MatrixXd m = rbpma::read_matrix_csv(path);
  if (m.rows() != m.cols())
    throw rbpma::IoError(path + ": matrix is not square");
  // CSV round-trips are exact, so exact symmetry is required of inputs.
  return rbpma::SymmetricMatrix(std::move(m));
}

std::vector<std::string> split_csv_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) items.push_back(item);
  return items;
}

std::string default_out(const std::string& x_out, const std::string& suffix) {
  const auto dot = x_out.rfind(".csv");
  const std::string stem =
      dot == std::string::npos || dot + 4 != x_out.size() ? x_out
                                                          : x_out.substr(0, dot);
  return stem + suffix;
}

// ---------------------------------------------------------------- solve ----

struct SolveArgs {
  std::string matrix_path;
  Eigen::Index k = 1;
  double alpha = 0.0;
  double beta = 1.0;
  double lambda = 1e8;
  std::optional<double> rho;
  int max_iter = 500;
  double tol = 1e-6;
  double tol_change = 1e-8;
  std::string x_out;
  std::string diagnostics_out;
  std::string summary_out;
};

int run_solve(const SolveArgs& args) {
  ManifestWriter manifest("solve");
  manifest.body["parameters"] = {
      {"matrix_path", args.matrix_path}, {"k", args.k},
      {"alpha", args.alpha},             {"beta", args.beta},
      {"lambda", args.lambda},           {"max_iter", args.max_iter},
      {"tol", args.tol},                 {"tol_change", args.tol_change},
  };
  if (args.rho) manifest.body["parameters"]["rho"] = *args.rho;

  const rbpma::SymmetricMatrix a = load_symmetric(args.matrix_path);
  rbpma::SolverConfig cfg{args.k, rbpma::BoxBounds(args.alpha, args.beta)};
  cfg.lambda = args.lambda;
  cfg.rho = args.rho;
  cfg.max_iter = args.max_iter;
  cfg.tol_primal = args.tol;
  cfg.tol_change = args.tol_change;
  cfg.validate(a.n());

  rbpma::SolveResult result = rbpma::solve(a, cfg);
  const rbpma::SolverState& state = result.state;
  const rbpma::KktResiduals kkt = rbpma::kkt_residuals(
      a, state.x.as_symmetric(), state.y, state.dual, cfg);
  const double objective =
      (a.mat() - state.x.mat()).squaredNorm() +
      cfg.lambda * rbpma::penalty_sum(state.x.as_symmetric(), cfg.bounds);

  const std::string diag_out = args.diagnostics_out.empty()
                                   ? default_out(args.x_out, ".diagnostics.csv")
                                   : args.diagnostics_out;
  const std::string summary_out = args.summary_out.empty()
                                      ? default_out(args.x_out, ".summary.json")
                                      : args.summary_out;

  rbpma::write_matrix_csv(args.x_out, state.x.mat());
  rbpma::write_diagnostics_csv(diag_out, state.history);
  {
    std::ofstream out(summary_out);
    if (!out) throw rbpma::IoError("cannot write '" + summary_out + "'");
    out << rbpma::summary_json(a.n(), cfg, state.iter, result.reason, objective,
                               kkt)
               .dump(2)
        << '\n';
  }
  manifest.body["inputs"] = {args.matrix_path};
  manifest.finish({args.x_out, diag_out, summary_out});

  std::cout << "stop_reason=" << rbpma::to_string(result.reason)
            << " iters=" << state.iter
            << " objective=" << rbpma::format_double(objective) << '\n';
  switch (result.reason) {
    case rbpma::StopReason::converged: return kExitOk;
    case rbpma::StopReason::max_iter: return kExitMaxIter;
    case rbpma::StopReason::descent_violation: return kExitNumeric;
  }
  return kExitNumeric;
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
  std::string model_path;
  std::string sizes;
  double psi_diag = -1.0;
  double psi_offdiag = -1.0;
  std::uint64_t seed = 1;
  int reps = 20;
  std::string methods = "rbpma,spectral";
  double alpha = 0.0;
  std::string beta = "auto";
  double lambda = 1e8;
  double rho = 12.0;  // benchmark-calibrated step size; 4*lambda anchors the
                      // iteration to its initialization at this lambda
  int max_iter = 500;
  int kmeans_restarts = 20;
  std::string out;
};

int run_synth(const SynthArgs& args) {
  ManifestWriter manifest("synth");

  std::optional<rbpma::BlockModel> model;
  std::uint64_t seed = args.seed;
  int reps = args.reps;
  if (!args.model_path.empty()) {
    rbpma::ModelFile file = rbpma::parse_model_file(args.model_path);
    model = std::move(file.model);
    if (file.seed) seed = *file.seed;
    if (file.reps) reps = *file.reps;
    manifest.body["inputs"] = {args.model_path};
  } else {
    if (args.sizes.empty() || args.psi_diag < 0.0 || args.psi_offdiag < 0.0)
      throw rbpma::IoError(
          "synth: need --model or --sizes, --psi-diag, --psi-offdiag");
    std::vector<Eigen::Index> sizes;
    for (const std::string& f : split_csv_list(args.sizes))
      sizes.push_back(static_cast<Eigen::Index>(std::stol(f)));
    model = rbpma::BlockModel::uniform(std::move(sizes), args.psi_diag,
                                       args.psi_offdiag);
    manifest.body["inputs"] = json::array();
  }
  if (reps < 1) throw std::invalid_argument("synth: reps must be >= 1");

  std::vector<std::string> methods = split_csv_list(args.methods);
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  if (methods.empty())
    throw std::invalid_argument("synth: no methods selected");
  for (const std::string& m : methods)
    if (m != "rbpma" && m != "spectral")
      throw std::invalid_argument("synth: unknown method '" + m + "'");

  const double beta = args.beta == "auto" ? rbpma::beta_rule(*model)
                                          : std::stod(args.beta);
  const rbpma::BoxBounds bounds(args.alpha, beta);
  const Eigen::Index k = model->k();

  manifest.body["parameters"] = {
      {"sizes", model->sizes},   {"seed", seed},
      {"reps", reps},            {"methods", methods},
      {"alpha", args.alpha},     {"beta", beta},
      {"lambda", args.lambda},   {"rho", args.rho},
      {"max_iter", args.max_iter},
      {"kmeans_restarts", args.kmeans_restarts},
  };

  const rbpma::LabelVector truth = rbpma::ground_truth_labels(*model);

  struct Row {
    int rep;
    std::string method;
    double acc, nmi;
    int iters;
  };
  std::vector<Row> rows;

  for (int rep = 0; rep < reps; ++rep) {
    // replicate r draws its adjacency from seed + r; both methods see the
    // same sample (paired comparison)
    const std::uint64_t rep_seed = seed + static_cast<std::uint64_t>(rep);
    const rbpma::SymmetricMatrix a = rbpma::sample_adjacency(*model, rep_seed);

    rbpma::KMeansConfig km;
    km.restarts = args.kmeans_restarts;
    km.seed = rep_seed;

    for (const std::string& method : methods) {
      if (method == "spectral") {
        const rbpma::LabelVector pred = rbpma::spectral_cluster(a, k, km);
        rows.push_back(Row{rep, method, rbpma::accuracy(pred, truth),
                           rbpma::nmi(pred, truth), 0});
      } else {
        rbpma::SolverConfig scfg{k, bounds};
        scfg.lambda = args.lambda;
        scfg.rho = args.rho;
        scfg.max_iter = args.max_iter;
        rbpma::RbpmaClusterResult res =
            rbpma::rbpma_cluster(a, k, bounds, scfg, km);
        rows.push_back(Row{rep, method, rbpma::accuracy(res.labels, truth),
                           rbpma::nmi(res.labels, truth), res.state.iter});
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.rep, a.method) < std::tie(b.rep, b.method);
  });

  std::ofstream out(args.out);
  if (!out) throw rbpma::IoError("cannot write '" + args.out + "'");
  out << "rep,method,acc,nmi,iters\n";
  for (const Row& r : rows)
    out << r.rep << ',' << r.method << ',' << rbpma::format_double(r.acc) << ','
        << rbpma::format_double(r.nmi) << ',' << r.iters << '\n';
  for (const std::string& method : methods) {
    double acc = 0.0, nmi_sum = 0.0, iters = 0.0;
    int count = 0;
    for (const Row& r : rows) {
      if (r.method != method) continue;
      acc += r.acc;
      nmi_sum += r.nmi;
      iters += r.iters;
      ++count;
    }
    out << "mean," << method << ',' << rbpma::format_double(acc / count) << ','
        << rbpma::format_double(nmi_sum / count) << ','
        << rbpma::format_double(iters / count) << '\n';
  }
  out.close();

  manifest.finish({args.out});
  return kExitOk;
}

// --------------------------------------------------------------- kernel ----

struct KernelArgs {
  std::string vectors_path;
  std::string out;
};

int run_kernel(const KernelArgs& args) {
  ManifestWriter manifest("kernel");
  manifest.body["parameters"] = {{"vectors_path", args.vectors_path}};
  manifest.body["inputs"] = {args.vectors_path};
  const Eigen::MatrixXd samples = rbpma::read_matrix_csv(args.vectors_path);
  const rbpma::SymmetricMatrix a = rbpma::gaussian_kernel(samples);
  rbpma::write_matrix_csv(args.out, a.mat());
  manifest.finish({args.out});
  return kExitOk;
}

// -------------------------------------------------------------- cluster ----

struct ClusterArgs {
  std::string matrix_path;
  Eigen::Index k = 1;
  std::string method;
  std::optional<double> alpha;
  std::string beta;
  double beta_c = 1.0;
  std::uint64_t seed = 0;
  double lambda = 1e8;
  double rho = 12.0;
  int max_iter = 500;
  int kmeans_restarts = 20;
  std::string labels_out;
};

int run_cluster(const ClusterArgs& args) {
  ManifestWriter manifest("cluster");
  const rbpma::SymmetricMatrix a = load_symmetric(args.matrix_path);

  rbpma::KMeansConfig km;
  km.restarts = args.kmeans_restarts;
  km.seed = args.seed;

  rbpma::LabelVector labels;
  json params = {{"matrix_path", args.matrix_path},
                 {"k", args.k},
                 {"method", args.method},
                 {"seed", args.seed}};

  if (args.method == "spectral") {
    labels = rbpma::spectral_cluster(a, args.k, km);
  } else if (args.method == "rbpma") {
    if (!args.alpha || args.beta.empty())
      throw rbpma::IoError("cluster: method rbpma requires --alpha and --beta");
    // sizes are unknown here, so beta=auto means c*K/n
    const double beta = args.beta == "auto"
                            ? rbpma::beta_rule(a.n(), args.k, args.beta_c)
                            : std::stod(args.beta);
    const rbpma::BoxBounds bounds(*args.alpha, beta);
    rbpma::SolverConfig scfg{args.k, bounds};
    scfg.lambda = args.lambda;
    scfg.rho = args.rho;
    scfg.max_iter = args.max_iter;
    labels = rbpma::rbpma_cluster(a, args.k, bounds, scfg, km).labels;
    params["alpha"] = *args.alpha;
    params["beta"] = beta;
    params["lambda"] = args.lambda;
  } else {
    throw rbpma::IoError("cluster: unknown method '" + args.method + "'");
  }

  rbpma::write_labels_csv(args.labels_out, labels);
  manifest.body["parameters"] = params;
  manifest.body["inputs"] = {args.matrix_path};
  manifest.finish({args.labels_out});
  return kExitOk;
}

// ----------------------------------------------------------------- eval ----

struct EvalArgs {
  std::string labels_path;
  std::string truth_path;
  std::string out;
};

int run_eval(const EvalArgs& args) {
  const rbpma::LabelVector pred = rbpma::read_labels_csv(args.labels_path);
  const rbpma::LabelVector truth = rbpma::read_labels_csv(args.truth_path);
  const rbpma::ContingencyTable table = rbpma::contingency(pred, truth);
  const json result = {{"acc", rbpma::accuracy(pred, truth)},
                       {"nmi", rbpma::nmi(pred, truth)},
                       {"n", table.n},
                       {"k_pred", table.k_pred()},
                       {"k_truth", table.k_truth()}};
  std::cout << result.dump(2) << '\n';
  if (!args.out.empty()) {
    ManifestWriter manifest("eval");
    manifest.body["parameters"] = {{"labels_path", args.labels_path},
                                   {"truth_path", args.truth_path}};
    manifest.body["inputs"] = {args.labels_path, args.truth_path};
    std::ofstream out(args.out);
    if (!out) throw rbpma::IoError("cannot write '" + args.out + "'");
    out << result.dump(2) << '\n';
    manifest.finish({args.out});
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded projection matrix approximation toolkit"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve", "Solve one instance and dump X*, diagnostics, and a summary");
  solve->add_option("--matrix-path", solve_args.matrix_path, "similarity CSV")
      ->required();
  solve->add_option("--k", solve_args.k, "target rank")->required();
  solve->add_option("--alpha", solve_args.alpha, "lower bound")->required();
  solve->add_option("--beta", solve_args.beta, "upper bound")->required();
  solve->add_option("--lambda", solve_args.lambda, "penalty weight");
  solve->add_option("--rho", solve_args.rho, "augmentation weight (default 4*lambda)");
  solve->add_option("--max-iter", solve_args.max_iter, "iteration cap");
  solve->add_option("--tol", solve_args.tol, "primal tolerance per sqrt(n)");
  solve->add_option("--tol-change", solve_args.tol_change,
                    "Y-change tolerance per sqrt(n)");
  solve->add_option("--x-out", solve_args.x_out, "output CSV for X*")->required();
  solve->add_option("--diagnostics-out", solve_args.diagnostics_out,
                    "per-iteration CSV");
  solve->add_option("--summary-out", solve_args.summary_out, "summary JSON");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Sample block models and benchmark the clustering methods");
  synth->add_option("--model", synth_args.model_path, "model description file");
  synth->add_option("--sizes", synth_args.sizes, "group sizes, e.g. 30,20,30");
  synth->add_option("--psi-diag", synth_args.psi_diag, "within-group probability");
  synth->add_option("--psi-offdiag", synth_args.psi_offdiag,
                    "across-group probability");
  synth->add_option("--seed", synth_args.seed, "base seed; replicate r uses seed+r");
  synth->add_option("--reps", synth_args.reps, "number of replicates");
  synth->add_option("--methods", synth_args.methods, "subset of rbpma,spectral");
  synth->add_option("--alpha", synth_args.alpha, "lower bound");
  synth->add_option("--beta", synth_args.beta, "upper bound or 'auto'");
  synth->add_option("--lambda", synth_args.lambda, "penalty weight");
  synth->add_option("--rho", synth_args.rho, "augmentation weight");
  synth->add_option("--max-iter", synth_args.max_iter, "solver iteration cap");
  synth->add_option("--kmeans-restarts", synth_args.kmeans_restarts,
                    "k-means restarts");
  synth->add_option("--out", synth_args.out, "results CSV")->required();

  KernelArgs kernel_args;
  CLI::App* kernel = app.add_subcommand(
      "kernel", "Build a Gaussian kernel similarity matrix from sample vectors");
  kernel->add_option("--vectors-path", kernel_args.vectors_path,
                     "samples CSV, one vector per row")
      ->required();
  kernel->add_option("--out", kernel_args.out, "kernel CSV")->required();

  ClusterArgs cluster_args;
  CLI::App* cluster = app.add_subcommand(
      "cluster", "Cluster a similarity matrix with spectral or rbpma");
  cluster->add_option("--matrix-path", cluster_args.matrix_path, "similarity CSV")
      ->required();
  cluster->add_option("--k", cluster_args.k, "cluster count")->required();
  cluster->add_option("--method", cluster_args.method, "spectral or rbpma")
      ->required();
  cluster->add_option("--alpha", cluster_args.alpha, "lower bound (rbpma)");
  cluster->add_option("--beta", cluster_args.beta, "upper bound or 'auto' (rbpma)");
  cluster->add_option("--beta-c", cluster_args.beta_c, "constant for auto beta");
  cluster->add_option("--seed", cluster_args.seed, "k-means seed");
  cluster->add_option("--lambda", cluster_args.lambda, "penalty weight");
  cluster->add_option("--rho", cluster_args.rho, "augmentation weight");
  cluster->add_option("--max-iter", cluster_args.max_iter, "solver iteration cap");
  cluster->add_option("--kmeans-restarts", cluster_args.kmeans_restarts,
                      "k-means restarts");
  cluster->add_option("--labels-out", cluster_args.labels_out, "labels CSV")
      ->required();

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Compare a predicted labeling against ground truth");
  eval->add_option("--labels-path", eval_args.labels_path, "predicted labels")
      ->required();
  eval->add_option("--truth-path", eval_args.truth_path, "true labels")
      ->required();
  eval->add_option("--out", eval_args.out, "optional JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (synth->parsed()) return run_synth(synth_args);
    if (kernel->parsed()) return run_kernel(kernel_args);
    if (cluster->parsed()) return run_cluster(cluster_args);
    if (eval->parsed()) return run_eval(eval_args);
  } catch (const rbpma::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rbpma::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
