// Command-line front end: data simulation, model fitting, transforms,
// eigenvalue reports and the replicate/bandwidth-sweep benchmark.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mnpca/eval.hpp"
#include "mnpca/io.hpp"

namespace {

using namespace mnpca;

struct SimulateArgs {
  int n = 100;
  double alpha = 0.125;
  std::uint64_t seed = 1;
  std::string out;
};

struct FitArgs {
  std::string data;
  std::string kernel = "gaussian";
  std::string parity = "odd";
  std::optional<double> sigma2;
  bool sigma2_auto = false;
  int degree = 2;
  double offset = 0.0;
  int r = 2;
  int m = 1;
  double eps = 0.2;
  double tie_tol = 1e-10;
  bool pinv = false;
  std::optional<int> d1, d2;
  bool scree = false;
  std::string out_model;
};

int cmd_simulate(const SimulateArgs& args) {
  const LabeledSample data = generate_checkerboard(args.n, args.alpha, args.seed);
  io::write_matrix_sample(data.sample, args.out);
  io::write_labels(data.labels, args.out + "_labels.csv");
  std::cout << "wrote " << args.out << ".csv, " << args.out << ".json, " << args.out
            << "_labels.csv\n";
  return 0;
}

KernelSpec make_kernel(const FitArgs& args, const MatrixSample& sample) {
  KernelSpec spec;
  spec.base = kernel_base_from_string(args.kernel);
  spec.parity = parity_from_string(args.parity);
  spec.degree = args.degree;
  spec.offset = args.offset;
  if (spec.base == KernelBase::Gaussian) {
    if (args.sigma2) {
      spec.sigma2 = *args.sigma2;
    } else if (args.sigma2_auto) {
      const auto svds = compute_svds(sample, args.r, args.tie_tol);
      Eigen::MatrixXd first_left(sample.p1(), sample.n());
      for (int i = 0; i < sample.n(); ++i)
        first_left.col(i) = svds[i].left_vectors.col(0);
      spec.sigma2 = default_bandwidth(first_left);
      std::cerr << "sigma2 (auto): " << io::format_double(spec.sigma2) << "\n";
    } else {
      throw CLI::ValidationError("--sigma2 or --sigma2-auto is required for gaussian");
    }
  }
  spec.validate();
  return spec;
}

int cmd_fit(const FitArgs& args) {
  const MatrixSample sample = io::read_matrix_sample(args.data);
  const KernelSpec kernel = make_kernel(args, sample);

  FitOptions options;
  options.features.r = args.r;
  options.features.m = args.m;
  options.features.eps = args.eps;
  options.features.tie_tol = args.tie_tol;
  options.features.pseudo_inverse = args.pinv;
  if (args.d1 && args.d2) options.dims = {{*args.d1, *args.d2}};

  const MnpcaModel model = fit(sample, kernel, kernel, options);
  io::save_model(model, args.out_model);
  std::cout << "fitted model: n=" << model.features.n << " basis=" << model.features.basis_size()
            << " d1=" << model.d1 << " d2=" << model.d2 << " -> " << args.out_model << "\n";
  return 0;
}

int cmd_transform(const std::string& model_path, const std::string& data_prefix,
                  const std::string& out_prefix) {
  const MatrixSample sample = io::read_matrix_sample(data_prefix);
  MatrixSample latents;
  switch (io::peek_model_type(model_path)) {
    case io::ModelType::Mnpca: {
      const MnpcaModel model = io::load_mnpca_model(model_path);
      for (const auto& X : sample.observations)
        latents.observations.push_back(transform(model, X));
      break;
    }
    case io::ModelType::TwoDPca: {
      const TwoDPcaModel model = io::load_2d2pca_model(model_path);
      for (const auto& X : sample.observations)
        latents.observations.push_back(transform_2d2pca(model, X));
      break;
    }
    case io::ModelType::K2dpca: {
      const K2dpcaModel model = io::load_k2dpca_model(model_path);
      for (const auto& X : sample.observations)
        latents.observations.push_back(transform_k2dpca(model, X));
      break;
    }
  }
  io::write_matrix_sample(latents, out_prefix);
  std::cout << "wrote " << out_prefix << ".csv, " << out_prefix << ".json\n";
  return 0;
}

int cmd_scree(const std::string& model_path) {
  const MnpcaModel model = io::load_mnpca_model(model_path);
  std::cout << "side,index,eigenvalue\n";
  for (const auto& row : eigen_report(model))
    std::cout << row.side << ',' << row.index << ',' << io::format_double(row.eigenvalue)
              << '\n';
  return 0;
}

struct BenchmarkArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  int jobs = 1;
  bool summary = false;
};

int cmd_benchmark(const BenchmarkArgs& args) {
  ExperimentConfig config = io::read_experiment_config(args.config);
  if (args.seed) config.seed = *args.seed;
  if (args.replicates) config.replicates = *args.replicates;

  const AccuracyTable table = run_experiment(config, args.jobs);
  if (args.out.empty()) {
    io::write_accuracy_table(table, std::cout);
  } else {
    io::write_accuracy_table(table, args.out);
    std::cout << "wrote " << args.out << " (" << table.rows.size() << " rows)\n";
  }
  if (table.redraws > 0) std::cerr << "replicate redraws: " << table.redraws << "\n";
  if (args.summary) io::write_summary(summarize(table), std::cout);
  return 0;
}

int cmd_summary(const std::string& table_path) {
  const AccuracyTable table = io::read_accuracy_table(table_path);
  io::write_summary(summarize(table), std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sided non-linear PCA for matrix samples"};
  app.require_subcommand(1);

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Generate a two-group image sample");
  simulate->add_option("--n", simulate_args.n, "Sample size (even; half per group)")
      ->required();
  simulate->add_option("--alpha", simulate_args.alpha, "Group separation in (-1, 1)");
  simulate->add_option("--seed", simulate_args.seed, "RNG seed");
  simulate->add_option("--out", simulate_args.out, "Output path prefix")->required();

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a matrix sample");
  fit_cmd->add_option("--data", fit_args.data, "Input path prefix")->required();
  fit_cmd->add_option("--kernel", fit_args.kernel, "linear|gaussian|polynomial");
  fit_cmd->add_option("--parity", fit_args.parity, "odd|even|linear-raw");
  auto* sigma2_opt = fit_cmd->add_option("--sigma2", fit_args.sigma2, "Gaussian bandwidth");
  fit_cmd->add_flag("--sigma2-auto", fit_args.sigma2_auto,
                    "Bandwidth from the first left singular vectors")
      ->excludes(sigma2_opt);
  fit_cmd->add_option("--degree", fit_args.degree, "Polynomial degree");
  fit_cmd->add_option("--offset", fit_args.offset, "Polynomial offset");
  fit_cmd->add_option("--r", fit_args.r, "Truncation rank");
  fit_cmd->add_option("--m", fit_args.m, "Singular spaces per observation");
  fit_cmd->add_option("--eps", fit_args.eps, "Inverse regularization strength");
  fit_cmd->add_option("--tie-tol", fit_args.tie_tol, "Singular value tie tolerance");
  fit_cmd->add_flag("--pinv", fit_args.pinv, "Moore-Penrose inverses instead of ridge");
  auto* d1_opt = fit_cmd->add_option("--d1", fit_args.d1, "Left latent dimension");
  auto* d2_opt = fit_cmd->add_option("--d2", fit_args.d2, "Right latent dimension");
  fit_cmd->add_flag("--scree", fit_args.scree, "Pick latent dimensions by the scree rule")
      ->excludes(d1_opt)
      ->excludes(d2_opt);
  d1_opt->needs(d2_opt);
  d2_opt->needs(d1_opt);
  fit_cmd->add_option("--out-model", fit_args.out_model, "Model file")->required();

  std::string transform_model, transform_data, transform_out;
  auto* transform_cmd = app.add_subcommand("transform", "Map a sample to latent matrices");
  transform_cmd->add_option("--model", transform_model, "Model file")->required();
  transform_cmd->add_option("--data", transform_data, "Input path prefix")->required();
  transform_cmd->add_option("--out", transform_out, "Output path prefix")->required();

  std::string scree_model;
  auto* scree_cmd = app.add_subcommand("scree", "Print the eigenvalue table of a model");
  scree_cmd->add_option("--model", scree_model, "Model file")->required();

  BenchmarkArgs benchmark_args;
  auto* benchmark_cmd = app.add_subcommand("benchmark", "Run a replicate accuracy study");
  benchmark_cmd->add_option("--config", benchmark_args.config, "Experiment config JSON")
      ->required();
  benchmark_cmd->add_option("--out", benchmark_args.out, "Accuracy table CSV");
  benchmark_cmd->add_option("--seed", benchmark_args.seed, "Override the config seed");
  benchmark_cmd->add_option("--replicates", benchmark_args.replicates,
                            "Override the replicate count");
  benchmark_cmd->add_option("--jobs", benchmark_args.jobs, "Replicate-level threads");
  benchmark_cmd->add_flag("--summary", benchmark_args.summary,
                          "Also print the per-condition summary");

  std::string summary_table;
  auto* summary_cmd = app.add_subcommand("summary", "Summarize an accuracy table CSV");
  summary_cmd->add_option("--table", summary_table, "Accuracy table CSV")->required();

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(simulate_args);
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (transform_cmd->parsed())
      return cmd_transform(transform_model, transform_data, transform_out);
    if (scree_cmd->parsed()) return cmd_scree(scree_model);
    if (benchmark_cmd->parsed()) return cmd_benchmark(benchmark_args);
    if (summary_cmd->parsed()) return cmd_summary(summary_table);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
