#ifndef MNPCA_MNPCA_HPP
#define MNPCA_MNPCA_HPP

#include <optional>
#include <utility>

#include "mnpca/svd_features.hpp"

namespace mnpca {

struct FitOptions {
  FeatureOptions features;
  // Latent dimensions (d1, d2); when absent each side is selected by the
  // scree rule applied to its eigenvalues.
  std::optional<std::pair<int, int>> dims;
};

// A fitted two-sided non-linear PCA model. The latent matrix of an
// observation with feature matrix F is
//
//   Z = A' K1_dag_sqrt (F - F_bar) K2_dag_sqrt B,
//
// where A, B hold the leading eigenvectors of the two coordinate matrices
//
//   P1 = K1_dag_sqrt ((1/n) sum_i F_i K2_dag F_i' - F_bar K2_dag F_bar') K1_dag_sqrt
//   P2 = K2_dag_sqrt ((1/n) sum_i F_i' K1_dag F_i - F_bar' K1_dag F_bar) K2_dag_sqrt.
struct MnpcaModel {
  FeatureSet features;
  Eigen::VectorXd eigvals1, eigvals2;  // all mn eigenvalues per side, descending
  Eigen::MatrixXd A;                   // mn x d1, orthonormal columns
  Eigen::MatrixXd B;                   // mn x d2
  int d1 = 0, d2 = 0;
};

// Scree rule: the number of eigenvalues strictly above mean + 2 sd
// (sample standard deviation, divisor n-1), floored at one.
int scree_select(const Eigen::VectorXd& eigenvalues);

MnpcaModel fit(const MatrixSample& sample, const KernelSpec& k1, const KernelSpec& k2,
               const FitOptions& options = {});

// Variant taking precomputed truncated decompositions (shared truncations,
// sign-flip experiments).
MnpcaModel fit(const std::vector<TruncatedSvd>& svds, const KernelSpec& k1,
               const KernelSpec& k2, const FitOptions& options = {});

// d1 x d2 latent matrix of an arbitrary observation with the fitted model.
Eigen::MatrixXd transform(const MnpcaModel& model, const Eigen::MatrixXd& X);

// Latent matrices of the training observations, from the stored F_i.
std::vector<Eigen::MatrixXd> in_sample_latents(const MnpcaModel& model);

// Latent matrix for an explicit feature matrix; the single code path behind
// both transform and in_sample_latents.
Eigen::MatrixXd latent_from_feature(const MnpcaModel& model, const Eigen::MatrixXd& F);

struct EigenReportRow {
  int side;      // 1 = left, 2 = right
  int index;     // 1-based rank within the side
  double eigenvalue;
};

// All 2 mn eigenvalues of a fitted model, side 1 first, each descending.
std::vector<EigenReportRow> eigen_report(const MnpcaModel& model);

// Flips each column's sign so its largest-magnitude entry is positive
// (ties broken by the lowest index); makes eigenvector output reproducible.
void canonicalize_columns(Eigen::MatrixXd& M);

}  // namespace mnpca

#endif  // MNPCA_MNPCA_HPP
