#ifndef MNPCA_BASELINES_HPP
#define MNPCA_BASELINES_HPP

#include "mnpca/svd_features.hpp"

namespace mnpca {

// Linear two-sided PCA: Z = A'(X - X_bar)B with A, B the leading
// eigenvectors of the row and column scatter matrices of the sample.
struct TwoDPcaModel {
  Eigen::MatrixXd A;      // p1 x d1, orthonormal columns
  Eigen::MatrixXd B;      // p2 x d2
  Eigen::MatrixXd X_bar;  // p1 x p2
  int d1 = 0, d2 = 0;
};

TwoDPcaModel fit_2d2pca(const MatrixSample& sample, int d1, int d2);
Eigen::MatrixXd transform_2d2pca(const TwoDPcaModel& model, const Eigen::MatrixXd& X);

// Kernel 2DPCA chain. Stage 1 runs plain kernel PCA (base kernel family,
// double-centered Gram matrix) over the pooled rows of all observations and
// represents each observation by the d1 x p1 matrix of its rows' component
// scores. Stage 2 reduces the remaining side with a linear 2DPCA step,
// giving d1 x d2 latents.
struct K2dpcaModel {
  KernelSpec row_kernel;          // stage 1 evaluates the base family
  Eigen::MatrixXd training_rows;  // (n p1) x p2, pooled observation rows
  Eigen::MatrixXd alpha;          // (n p1) x d1, unit-RKHS-norm coefficients
  Eigen::VectorXd gram_col_mean;  // centering statistics of the training Gram
  double gram_mean = 0.0;
  Eigen::VectorXd eigenvalues;    // top d1 eigenvalues, covariance-operator scale
  Eigen::MatrixXd column_reducer; // p1 x d2 (p2 x d2 whenever p1 = p2)
  Eigen::MatrixXd stage1_mean;    // d1 x p1, mean stage-1 latent
  int d1 = 0, d2 = 0, p1 = 0, p2 = 0;
};

K2dpcaModel fit_k2dpca(const MatrixSample& sample, const KernelSpec& row_kernel,
                       int d1, int d2);

// Uncentered stage-1 latent of one observation: component scores of its rows,
// components along rows of the result.
Eigen::MatrixXd k2dpca_stage1(const K2dpcaModel& model, const Eigen::MatrixXd& X);

Eigen::MatrixXd transform_k2dpca(const K2dpcaModel& model, const Eigen::MatrixXd& X);

// H G H with H = I - (1/N) 11'; the kernel-PCA centering.
Eigen::MatrixXd double_center(const Eigen::MatrixXd& G);

// Mean squared pairwise distance between vectorized observations (the
// i = j zeros included); the bandwidth heuristic used for the kernel 2DPCA
// baseline.
double mean_squared_distance(const MatrixSample& sample);

}  // namespace mnpca

#endif  // MNPCA_BASELINES_HPP
