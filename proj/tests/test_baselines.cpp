#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "mnpca/baselines.hpp"
#include "mnpca/mnpca.hpp"
#include "mnpca/rng.hpp"

using namespace mnpca;

namespace {

Eigen::MatrixXd random_matrix(RngStream& rng, int rows, int cols) {
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = rng.uniform(-1.0, 1.0);
  return M;
}

MatrixSample random_sample(RngStream& rng, int n, int p1, int p2) {
  MatrixSample sample;
  for (int i = 0; i < n; ++i) sample.observations.push_back(random_matrix(rng, p1, p2));
  return sample;
}

}  // namespace

TEST_CASE("2d2pca recovers a rank-one direction") {
  MatrixSample sample;
  for (double c : {1.0, -2.0, 3.0, 0.5}) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 3);
    X(0, 0) = c;
    sample.observations.push_back(X);
  }
  const TwoDPcaModel model = fit_2d2pca(sample, 1, 1);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1(0) = 1.0;
  CHECK((model.A.col(0) - e1).cwiseAbs().maxCoeff() <= 1e-10);  // canonical sign
}

TEST_CASE("2d2pca with a single column is ordinary PCA") {
  RngStream rng(211);
  MatrixSample sample;
  const int n = 12, p = 5;
  for (int i = 0; i < n; ++i) sample.observations.push_back(random_matrix(rng, p, 1));

  const TwoDPcaModel model = fit_2d2pca(sample, 3, 1);

  // oracle: covariance eigendecomposition of the vector sample
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const auto& X : sample.observations) mean += X.col(0);
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  for (const auto& X : sample.observations) {
    const Eigen::VectorXd c = X.col(0) - mean;
    cov += c * c.transpose();
  }
  cov /= n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::MatrixXd loadings(p, 3);
  for (int j = 0; j < 3; ++j) loadings.col(j) = eig.eigenvectors().col(p - 1 - j);
  canonicalize_columns(loadings);

  CHECK((model.A - loadings).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("2d2pca orthonormality and total variance") {
  RngStream rng(223);
  const MatrixSample sample = random_sample(rng, 10, 5, 4);
  const TwoDPcaModel model = fit_2d2pca(sample, 5, 4);  // full bases

  const Eigen::MatrixXd eye5 = Eigen::MatrixXd::Identity(5, 5);
  CHECK((model.A.transpose() * model.A - eye5).cwiseAbs().maxCoeff() <= 1e-10);

  // with d1 = p1, the quadratic forms a_j' S a_j exhaust trace(S)
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(5, 5);
  for (const auto& X : sample.observations) scatter += X * X.transpose();
  scatter /= sample.n();
  scatter -= model.X_bar * model.X_bar.transpose();
  double quad_sum = 0.0;
  for (int j = 0; j < 5; ++j)
    quad_sum += model.A.col(j).dot(scatter * model.A.col(j));
  CHECK(quad_sum == doctest::Approx(scatter.trace()).epsilon(1e-8));
}

TEST_CASE("transform_2d2pca closed forms") {
  RngStream rng(227);
  const MatrixSample sample = random_sample(rng, 6, 4, 3);
  const TwoDPcaModel fitted = fit_2d2pca(sample, 2, 2);
  CHECK(transform_2d2pca(fitted, fitted.X_bar).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(transform_2d2pca(fitted, Eigen::MatrixXd::Zero(3, 3)),
                  std::invalid_argument);

  // hand-built identity model reduces to centering
  TwoDPcaModel identity;
  identity.A = Eigen::MatrixXd::Identity(4, 4);
  identity.B = Eigen::MatrixXd::Identity(3, 3);
  identity.X_bar = fitted.X_bar;
  identity.d1 = 4;
  identity.d2 = 3;
  const Eigen::MatrixXd X = sample.observations[0];
  CHECK((transform_2d2pca(identity, X) - (X - fitted.X_bar)).cwiseAbs().maxCoeff() <=
        1e-14);
}

TEST_CASE("2d2pca is permutation invariant") {
  RngStream rng(229);
  const MatrixSample sample = random_sample(rng, 7, 4, 4);
  MatrixSample shuffled;
  for (int idx : {5, 2, 0, 6, 1, 4, 3})
    shuffled.observations.push_back(sample.observations[idx]);
  const TwoDPcaModel a = fit_2d2pca(sample, 2, 2);
  const TwoDPcaModel b = fit_2d2pca(shuffled, 2, 2);
  CHECK((a.A - b.A).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((a.B - b.B).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("double_center kills row and column sums") {
  RngStream rng(233);
  Eigen::MatrixXd G = random_matrix(rng, 8, 8);
  G = ((G + G.transpose()) / 2.0).eval();
  const Eigen::MatrixXd C = double_center(G);
  CHECK(C.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(C.colwise().sum().cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("k2dpca stage 1 with a linear kernel is pooled-row PCA") {
  RngStream rng(239);
  const int n = 6, p1 = 4, p2 = 5;
  const MatrixSample sample = random_sample(rng, n, p1, p2);
  const K2dpcaModel model = fit_k2dpca(sample, KernelSpec::linear(), 2, 2);

  // oracle: PCA of the n p1 pooled rows
  const int N = n * p1;
  Eigen::MatrixXd rows(N, p2);
  for (int i = 0; i < n; ++i) rows.middleRows(i * p1, p1) = sample.observations[i];
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered);
  Eigen::MatrixXd scores_oracle(N, 2);
  for (int k = 0; k < 2; ++k)
    scores_oracle.col(k) = centered * eig.eigenvectors().col(p2 - 1 - k);

  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd stage1 = k2dpca_stage1(model, sample.observations[i]);
    REQUIRE(stage1.rows() == 2);
    REQUIRE(stage1.cols() == p1);
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd got = stage1.row(k).transpose();
      const Eigen::VectorXd want = scores_oracle.block(i * p1, k, p1, 1);
      const double direct = (got - want).cwiseAbs().maxCoeff();
      const double flipped = (got + want).cwiseAbs().maxCoeff();
      CHECK(std::min(direct, flipped) <= 1e-8);
    }
  }
}

TEST_CASE("k2dpca training scores are uncorrelated across components") {
  RngStream rng(241);
  const MatrixSample sample = random_sample(rng, 5, 4, 4);
  const KernelSpec kernel = KernelSpec::gaussian(2.0, Parity::Even);
  const K2dpcaModel model = fit_k2dpca(sample, kernel, 3, 2);

  const int N = sample.n() * sample.p1();
  Eigen::MatrixXd scores(N, 3);
  for (int i = 0; i < sample.n(); ++i)
    scores.middleRows(i * sample.p1(), sample.p1()) =
        k2dpca_stage1(model, sample.observations[i]).transpose();

  const Eigen::RowVectorXd mean = scores.colwise().mean();
  const Eigen::MatrixXd centered = scores.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / double(N);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) CHECK(std::abs(cov(a, b)) <= 1e-6 * std::abs(cov(a, a)));

  // score variances match the stored covariance-operator eigenvalues
  for (int a = 0; a < 3; ++a)
    CHECK(cov(a, a) == doctest::Approx(model.eigenvalues(a)).epsilon(1e-8));
}

TEST_CASE("k2dpca transform has the d1 x d2 shape contract") {
  RngStream rng(251);
  const MatrixSample sample = random_sample(rng, 4, 5, 5);
  const KernelSpec kernel = KernelSpec::gaussian(3.0, Parity::Even);
  const K2dpcaModel model = fit_k2dpca(sample, kernel, 2, 2);
  const Eigen::MatrixXd Z = transform_k2dpca(model, sample.observations[0]);
  CHECK(Z.rows() == 2);
  CHECK(Z.cols() == 2);
  CHECK_THROWS_AS(transform_k2dpca(model, Eigen::MatrixXd::Zero(4, 5)),
                  std::invalid_argument);
}

TEST_CASE("k2dpca transforms are permutation invariant up to component signs") {
  RngStream rng(263);
  const MatrixSample sample = random_sample(rng, 5, 4, 4);
  MatrixSample shuffled;
  for (int idx : {3, 1, 4, 0, 2}) shuffled.observations.push_back(sample.observations[idx]);

  const KernelSpec kernel = KernelSpec::gaussian(2.5, Parity::Even);
  const K2dpcaModel a = fit_k2dpca(sample, kernel, 2, 2);
  const K2dpcaModel b = fit_k2dpca(shuffled, kernel, 2, 2);

  const Eigen::MatrixXd fresh = random_matrix(rng, 4, 4);
  const Eigen::MatrixXd Za = transform_k2dpca(a, fresh);
  const Eigen::MatrixXd Zb = transform_k2dpca(b, fresh);
  // stage-1 components and the column reducer are defined up to signs
  CHECK((Za.cwiseAbs() - Zb.cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("k2dpca rejects a rank-deficient component request") {
  // identical rows: the centered Gram matrix has rank 0
  MatrixSample sample;
  sample.observations.push_back(Eigen::MatrixXd::Ones(3, 3));
  sample.observations.push_back(Eigen::MatrixXd::Ones(3, 3));
  const KernelSpec kernel = KernelSpec::gaussian(1.0, Parity::Even);
  CHECK_THROWS_AS(fit_k2dpca(sample, kernel, 2, 2), std::runtime_error);
}

TEST_CASE("mean_squared_distance closed forms") {
  MatrixSample pair;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2);
  B(0, 0) = 2.0;  // squared distance 4
  pair.observations = {A, B};
  CHECK(mean_squared_distance(pair) == doctest::Approx(2.0).epsilon(1e-12));

  MatrixSample same;
  same.observations = {B, B, B};
  CHECK(mean_squared_distance(same) == doctest::Approx(0.0).epsilon(1e-14));

  RngStream rng(257);
  MatrixSample sample = random_sample(rng, 5, 3, 4);
  const double reference = mean_squared_distance(sample);
  MatrixSample shuffled;
  for (int idx : {4, 1, 3, 0, 2})
    shuffled.observations.push_back(sample.observations[idx]);
  CHECK(mean_squared_distance(shuffled) == doctest::Approx(reference).epsilon(1e-12));

  // brute-force double loop oracle
  double brute = 0.0;
  for (const auto& X : sample.observations)
    for (const auto& Y : sample.observations) brute += (X - Y).squaredNorm();
  brute /= 25.0;
  CHECK(reference == doctest::Approx(brute).epsilon(1e-12));
}
