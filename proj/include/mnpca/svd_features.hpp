#ifndef MNPCA_SVD_FEATURES_HPP
#define MNPCA_SVD_FEATURES_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "mnpca/kernels.hpp"

namespace mnpca {

// Thrown when an observation's singular spectrum violates the fit
// preconditions (rank below the requested truncation, or a repeated
// singular value among the kept ones). The experiment harness treats
// these as redraw-able failures.
class SvdRankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sample of n real matrices sharing dimensions p1 x p2.
struct MatrixSample {
  std::vector<Eigen::MatrixXd> observations;

  int n() const { return static_cast<int>(observations.size()); }
  int p1() const { return observations.empty() ? 0 : static_cast<int>(observations[0].rows()); }
  int p2() const { return observations.empty() ? 0 : static_cast<int>(observations[0].cols()); }

  // n >= 1, common dimensions, finite entries.
  void validate() const;
};

// Top-r singular triplets of one observation. Singular values are strictly
// decreasing; each (u_j, v_j) pair is determined up to its joint sign.
struct TruncatedSvd {
  Eigen::VectorXd singular_values;  // length r, descending
  Eigen::MatrixXd left_vectors;     // p1 x r, orthonormal columns
  Eigen::MatrixXd right_vectors;    // p2 x r, orthonormal columns

  int rank() const { return static_cast<int>(singular_values.size()); }
};

// Top-r truncation of X. Throws SvdRankError when sigma_r <= tie_tol * sigma_1
// ("rank below requested r") or when two kept singular values are closer
// than tie_tol * sigma_1 ("repeated singular value").
TruncatedSvd truncated_svd(const Eigen::MatrixXd& X, int r, double tie_tol = 1e-10);

std::vector<TruncatedSvd> compute_svds(const MatrixSample& sample, int r,
                                       double tie_tol = 1e-10);

// (K + eps |K|_2 I)^-1 for symmetric K, |K|_2 the spectral norm. Throws when
// the regularized matrix is singular or conditioned worse than 1e12.
Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& K, double eps);

// Symmetric PSD square root of regularized_inverse(K, eps); computed from a
// single eigendecomposition of the regularized matrix.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& K, double eps);

// Moore-Penrose counterparts for symmetric PSD input; eigenvalues below a
// relative threshold are treated as exact zeros.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& K);
Eigen::MatrixXd pseudo_inverse_sqrt(const Eigen::MatrixXd& K);

struct FeatureOptions {
  int r = 2;           // truncation rank of each observation
  int m = 1;           // singular spaces per observation entering the basis
  double eps = 0.2;    // regularization strength of the Gram inverses
  double tie_tol = 1e-10;
  bool pseudo_inverse = false;  // Moore-Penrose inverses instead of the
                                // eps-regularized ones (eps is then unused)
};

// Rank-r factorization of a feature matrix: F = left_kvecs diag(sigma) right_kvecs'.
struct FeatureFactors {
  Eigen::MatrixXd left_kvecs;   // mn x r, column j = k1vec(u_j)
  Eigen::MatrixXd right_kvecs;  // mn x r, column j = k2vec(v_j)
  Eigen::VectorXd sigma;        // r singular values

  Eigen::MatrixXd matrix() const {
    return left_kvecs * sigma.asDiagonal() * right_kvecs.transpose();
  }
};

// Singular-vector bases, their Gram matrices under the two kernels, the
// (regularized) inverses and inverse square roots, and the n feature
// matrices F_i = sum_j sigma_ij k1vec(u_ij) k2vec(v_ij)'.
struct FeatureSet {
  KernelSpec k1, k2;
  FeatureOptions options;
  int n = 0, p1 = 0, p2 = 0;

  Eigen::MatrixXd left_basis;   // p1 x (m n); column (i*m + s) is u_{i,s+1}
  Eigen::MatrixXd right_basis;  // p2 x (m n)
  Eigen::MatrixXd K1, K2;       // mn x mn Gram matrices
  Eigen::MatrixXd K1_dag, K2_dag;
  Eigen::MatrixXd K1_dag_sqrt, K2_dag_sqrt;
  std::vector<Eigen::MatrixXd> F;  // n feature matrices, mn x mn
  Eigen::MatrixXd F_bar;           // (1/n) sum_i F_i

  // Rank-r factors of the F_i; the fit exploits them to stay quadratic in
  // the basis size instead of cubic per observation.
  std::vector<FeatureFactors> factors;

  int basis_size() const { return static_cast<int>(left_basis.cols()); }
};

FeatureFactors feature_factors(const KernelSpec& k1, const KernelSpec& k2,
                               const Eigen::MatrixXd& left_basis,
                               const Eigen::MatrixXd& right_basis,
                               const TruncatedSvd& svd);

// Feature matrix of one observation against fitted bases. Shared by the
// in-sample construction and the out-of-sample transform.
Eigen::MatrixXd feature_matrix(const KernelSpec& k1, const KernelSpec& k2,
                               const Eigen::MatrixXd& left_basis,
                               const Eigen::MatrixXd& right_basis,
                               const TruncatedSvd& svd);

// The joint sign of each singular pair is normalized before anything else
// is computed, so every admissible sign pattern of the inputs produces the
// same feature set.
FeatureSet build_feature_set(const MatrixSample& sample, const KernelSpec& k1,
                             const KernelSpec& k2, const FeatureOptions& options);

// Variant taking precomputed per-observation decompositions; used when the
// truncation is shared across several fits or manipulated by tests.
FeatureSet build_feature_set(const std::vector<TruncatedSvd>& svds,
                             const KernelSpec& k1, const KernelSpec& k2,
                             const FeatureOptions& options);

}  // namespace mnpca

#endif  // MNPCA_SVD_FEATURES_HPP
