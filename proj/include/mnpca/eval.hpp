#ifndef MNPCA_EVAL_HPP
#define MNPCA_EVAL_HPP

#include <Eigen/Cholesky>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mnpca/baselines.hpp"
#include "mnpca/mnpca.hpp"
#include "mnpca/rng.hpp"

namespace mnpca {

struct LabeledSample {
  MatrixSample sample;
  std::vector<int> labels;

  void validate() const;  // label count matches the sample size
};

// 10-point cosine curve; element j (0-based) is cos((1 - alpha)(x - pi + 2 pi j / 10)).
Eigen::VectorXd u_curve(double x, double alpha);

// Two-group 10 x 10 image sample. Each image is u(t1)u(t2)' + u(t3)u(t4)'
// with t1..t4 iid Uniform(-pi, pi); the first n/2 observations (label 1)
// use +alpha, the rest (label 2) use -alpha. Draw streams are keyed by the
// effective group sign, so generating at -alpha swaps the two groups
// image-for-image without correlating them within one call.
LabeledSample generate_checkerboard(int n, double alpha, std::uint64_t seed);

// Per-class Gaussian classifier over vectorized latents.
struct QdaClass {
  int label = 0;
  double prior = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // after the ridge
  Eigen::LLT<Eigen::MatrixXd> chol;
  double log_det = 0.0;
};

struct QdaModel {
  std::vector<QdaClass> classes;  // ascending label order
  int dim = 0;
};

// Ridge adds ridge * trace(cov)/dim to the diagonal (plain ridge when the
// trace vanishes), keeping every class covariance positive definite.
QdaModel qda_fit(const std::vector<Eigen::VectorXd>& points,
                 const std::vector<int>& labels, double ridge = 1e-6);

// Highest posterior class; ties go to the lowest label.
int qda_predict(const QdaModel& model, const Eigen::VectorXd& x);

enum class Method { MnpcaOdd, MnpcaEven, TwoDPca, K2dpca };
std::string to_string(Method method);
Method method_from_string(const std::string& s);

struct GeneratorSpec {
  enum class Kind { Checkerboard, FashionMnist };
  Kind kind = Kind::Checkerboard;
  double alpha = 0.125;       // checkerboard difficulty
  std::string path;           // fashion-mnist csv
  std::set<int> classes{5, 9};
};

struct ExperimentConfig {
  GeneratorSpec generator;
  int n_train = 100;
  int n_test = 50;
  int replicates = 50;
  std::vector<Method> methods{Method::MnpcaOdd, Method::MnpcaEven, Method::TwoDPca,
                              Method::K2dpca};
  std::vector<double> sigma_grid{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
  int d1 = 2, d2 = 2;
  int r = 2, m = 1;
  double eps = 0.2;
  double qda_ridge = 1e-6;
  std::uint64_t seed = 1;

  void validate() const;
};

struct AccuracyRow {
  int replicate;                    // 1-based
  std::string method;
  std::optional<double> exponent;   // absent for the linear baseline
  double accuracy;
};

struct AccuracyTable {
  std::vector<AccuracyRow> rows;
  int redraws = 0;  // replicate redraws forced by singular-spectrum failures
};

// Runs the replicate / bandwidth-sweep study. Within a replicate all
// methods share the same train/test draw; sigma0^2 is estimated per
// replicate and swept as sigma^2 = 2^a sigma0^2 over the grid. Replicates
// may run on `jobs` threads; the output ordering does not depend on jobs.
AccuracyTable run_experiment(const ExperimentConfig& config, int jobs = 1);

struct SummaryRow {
  std::string method;
  std::optional<double> exponent;
  double mean = 0.0;
  double std_error = 0.0;
  int count = 0;
};

std::vector<SummaryRow> summarize(const AccuracyTable& table);

// Kaggle-style CSV: header line, then label followed by 784 pixels in
// [0, 255] per row. Pixels are scaled to [0, 1]; rows filtered to `classes`.
LabeledSample load_fashion_mnist_csv(const std::string& path, const std::set<int>& classes);

}  // namespace mnpca

#endif  // MNPCA_EVAL_HPP
