#include "mnpca/baselines.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mnpca/mnpca.hpp"

namespace mnpca {

namespace {

constexpr double kRankRelTol = 1e-12;

// Leading d eigenvectors of a symmetric matrix, descending, sign-canonical.
Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& S, int d, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver((S + S.transpose()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
  const Eigen::Index size = S.rows();
  Eigen::MatrixXd V(size, d);
  for (int j = 0; j < d; ++j) V.col(j) = solver.eigenvectors().col(size - 1 - j);
  canonicalize_columns(V);
  return V;
}

// Base-family Gram matrix over the rows of `rows`.
Eigen::MatrixXd base_gram(const KernelSpec& kernel, const Eigen::MatrixXd& rows) {
  const Eigen::Index N = rows.rows();
  if (kernel.base == KernelBase::Gaussian) {
    // exp(-d2 / (2 sigma2)) through one gemm on the squared distances.
    const Eigen::VectorXd sq = rows.rowwise().squaredNorm();
    Eigen::MatrixXd G = -2.0 * rows * rows.transpose();
    G.colwise() += sq;
    G.rowwise() += sq.transpose();
    return (-G / (2.0 * kernel.sigma2)).array().exp();
  }
  Eigen::MatrixXd G(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = eval_base(kernel, rows.row(i).transpose(), rows.row(j).transpose());
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

}  // namespace

TwoDPcaModel fit_2d2pca(const MatrixSample& sample, int d1, int d2) {
  sample.validate();
  if (d1 < 1 || d1 > sample.p1() || d2 < 1 || d2 > sample.p2())
    throw std::invalid_argument("fit_2d2pca: need 1 <= d1 <= p1 and 1 <= d2 <= p2");

  const int n = sample.n();
  TwoDPcaModel model;
  model.d1 = d1;
  model.d2 = d2;

  model.X_bar = Eigen::MatrixXd::Zero(sample.p1(), sample.p2());
  for (const auto& X : sample.observations) model.X_bar += X;
  model.X_bar /= static_cast<double>(n);

  Eigen::MatrixXd left = Eigen::MatrixXd::Zero(sample.p1(), sample.p1());
  Eigen::MatrixXd right = Eigen::MatrixXd::Zero(sample.p2(), sample.p2());
  for (const auto& X : sample.observations) {
    left.noalias() += X * X.transpose();
    right.noalias() += X.transpose() * X;
  }
  left /= static_cast<double>(n);
  right /= static_cast<double>(n);
  left.noalias() -= model.X_bar * model.X_bar.transpose();
  right.noalias() -= model.X_bar.transpose() * model.X_bar;

  model.A = top_eigenvectors(left, d1, "fit_2d2pca");
  model.B = top_eigenvectors(right, d2, "fit_2d2pca");
  return model;
}

Eigen::MatrixXd transform_2d2pca(const TwoDPcaModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() != model.X_bar.rows() || X.cols() != model.X_bar.cols())
    throw std::invalid_argument("transform_2d2pca: dimension mismatch with the fitted sample");
  return model.A.transpose() * (X - model.X_bar) * model.B;
}

Eigen::MatrixXd double_center(const Eigen::MatrixXd& G) {
  const Eigen::VectorXd col_mean = G.colwise().mean();
  const Eigen::VectorXd row_mean = G.rowwise().mean();
  const double total = G.mean();
  Eigen::MatrixXd C = G;
  C.rowwise() -= col_mean.transpose();
  C.colwise() -= row_mean;
  C.array() += total;
  return C;
}

K2dpcaModel fit_k2dpca(const MatrixSample& sample, const KernelSpec& row_kernel,
                       int d1, int d2) {
  sample.validate();
  row_kernel.validate();
  const int n = sample.n();
  const int p1 = sample.p1();
  const int p2 = sample.p2();
  const Eigen::Index N = static_cast<Eigen::Index>(n) * p1;
  if (d1 < 1 || d1 > N)
    throw std::invalid_argument("fit_k2dpca: need 1 <= d1 <= n p1");
  if (d2 < 1 || d2 > p1)
    throw std::invalid_argument("fit_k2dpca: need 1 <= d2 <= p1");

  K2dpcaModel model;
  model.row_kernel = row_kernel;
  model.d1 = d1;
  model.d2 = d2;
  model.p1 = p1;
  model.p2 = p2;

  model.training_rows.resize(N, p2);
  for (int i = 0; i < n; ++i)
    model.training_rows.middleRows(static_cast<Eigen::Index>(i) * p1, p1) =
        sample.observations[i];

  Eigen::MatrixXd G = base_gram(row_kernel, model.training_rows);
  model.gram_col_mean = G.colwise().mean();
  model.gram_mean = G.mean();
  const Eigen::MatrixXd Gc = double_center(G);
  G.resize(0, 0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Gc);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("fit_k2dpca: eigendecomposition failed");
  const Eigen::VectorXd& lambda = solver.eigenvalues();  // ascending
  const double lambda_max = lambda(N - 1);
  if (!(lambda(N - d1) > kRankRelTol * lambda_max))
    throw std::runtime_error(
        "fit_k2dpca: Gram matrix numerically rank-deficient below d1 components");

  model.alpha.resize(N, d1);
  model.eigenvalues.resize(d1);
  for (int k = 0; k < d1; ++k) {
    const Eigen::Index idx = N - 1 - k;
    model.alpha.col(k) = solver.eigenvectors().col(idx) / std::sqrt(lambda(idx));
    model.eigenvalues(k) = lambda(idx) / static_cast<double>(N);
  }

  // Training scores, one observation per block of p1 rows.
  const Eigen::MatrixXd scores = Gc * model.alpha;  // N x d1

  model.stage1_mean = Eigen::MatrixXd::Zero(d1, p1);
  std::vector<Eigen::MatrixXd> latents;
  latents.reserve(n);
  for (int i = 0; i < n; ++i) {
    latents.push_back(
        scores.middleRows(static_cast<Eigen::Index>(i) * p1, p1).transpose());
    model.stage1_mean += latents.back();
  }
  model.stage1_mean /= static_cast<double>(n);

  Eigen::MatrixXd col_scatter = Eigen::MatrixXd::Zero(p1, p1);
  for (const auto& L : latents) {
    const Eigen::MatrixXd centered = L - model.stage1_mean;
    col_scatter.noalias() += centered.transpose() * centered;
  }
  col_scatter /= static_cast<double>(n);

  model.column_reducer = top_eigenvectors(col_scatter, d2, "fit_k2dpca");
  return model;
}

Eigen::MatrixXd k2dpca_stage1(const K2dpcaModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() != model.p1 || X.cols() != model.p2)
    throw std::invalid_argument("k2dpca_stage1: dimension mismatch with the fitted sample");
  const Eigen::Index N = model.training_rows.rows();
  Eigen::MatrixXd scores(model.p1, model.d1);
  Eigen::VectorXd k(N);
  for (int row = 0; row < model.p1; ++row) {
    for (Eigen::Index a = 0; a < N; ++a)
      k(a) = eval_base(model.row_kernel, X.row(row).transpose(),
                       model.training_rows.row(a).transpose());
    const double k_mean = k.mean();
    const Eigen::VectorXd centered =
        k - model.gram_col_mean - Eigen::VectorXd::Constant(N, k_mean - model.gram_mean);
    scores.row(row) = centered.transpose() * model.alpha;
  }
  return scores.transpose();
}

Eigen::MatrixXd transform_k2dpca(const K2dpcaModel& model, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd L = k2dpca_stage1(model, X);
  return (L - model.stage1_mean) * model.column_reducer;
}

double mean_squared_distance(const MatrixSample& sample) {
  sample.validate();
  const int n = sample.n();
  // (1/n^2) sum_ij |x_i - x_j|^2 = 2 (mean |x|^2 - |mean x|^2), i = j included.
  double mean_sq = 0.0;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(sample.p1(), sample.p2());
  for (const auto& X : sample.observations) {
    mean_sq += X.squaredNorm();
    mean += X;
  }
  mean_sq /= static_cast<double>(n);
  mean /= static_cast<double>(n);
  return 2.0 * (mean_sq - mean.squaredNorm());
}

}  // namespace mnpca
