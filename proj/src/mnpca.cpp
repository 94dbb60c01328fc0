#include "mnpca/mnpca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace mnpca {

namespace {

struct EigenPairs {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns ordered accordingly
};

EigenPairs descending_eig(const Eigen::MatrixXd& P) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(P);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("fit: eigendecomposition failed");
  const Eigen::Index size = P.rows();
  EigenPairs out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(size, size);
  for (Eigen::Index j = 0; j < size; ++j)
    out.vectors.col(j) = solver.eigenvectors().col(size - 1 - j);
  return out;
}

// (1/n) sum_i F_i M F_i' - F_bar M F_bar' through the rank-r factors of the
// F_i; quadratic in the basis size per observation.
Eigen::MatrixXd centered_second_moment(const std::vector<FeatureFactors>& factors,
                                       const Eigen::MatrixXd& M,
                                       const Eigen::MatrixXd& F_bar, bool left_side) {
  const Eigen::Index size = F_bar.rows();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(size, size);
  for (const auto& f : factors) {
    const Eigen::MatrixXd& outer = left_side ? f.left_kvecs : f.right_kvecs;
    const Eigen::MatrixXd& inner = left_side ? f.right_kvecs : f.left_kvecs;
    const Eigen::MatrixXd scaled = outer * f.sigma.asDiagonal();  // mn x r
    const Eigen::MatrixXd core = inner.transpose() * M * inner;   // r x r
    S.noalias() += scaled * core * scaled.transpose();
  }
  S /= static_cast<double>(factors.size());
  const Eigen::MatrixXd Fc = left_side ? F_bar : Eigen::MatrixXd(F_bar.transpose());
  S.noalias() -= Fc * M * Fc.transpose();
  return S;
}

}  // namespace

int scree_select(const Eigen::VectorXd& eigenvalues) {
  const Eigen::Index n = eigenvalues.size();
  if (n == 0) throw std::invalid_argument("scree_select: empty eigenvalue list");
  if (n == 1) return 1;
  const double mean = eigenvalues.mean();
  const double ss = (eigenvalues.array() - mean).square().sum();
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double threshold = mean + 2.0 * sd;
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (eigenvalues(i) > threshold) ++count;
  return std::max(count, 1);
}

void canonicalize_columns(Eigen::MatrixXd& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    Eigen::Index lead = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      const double a = std::abs(M(i, j));
      if (a > best) {
        best = a;
        lead = i;
      }
    }
    if (M(lead, j) < 0.0) M.col(j) = -M.col(j);
  }
}

MnpcaModel fit(const MatrixSample& sample, const KernelSpec& k1, const KernelSpec& k2,
               const FitOptions& options) {
  sample.validate();
  if (options.features.r > std::min(sample.p1(), sample.p2()))
    throw std::invalid_argument("fit: r exceeds min(p1, p2)");
  return fit(compute_svds(sample, options.features.r, options.features.tie_tol), k1, k2,
             options);
}

MnpcaModel fit(const std::vector<TruncatedSvd>& svds, const KernelSpec& k1,
               const KernelSpec& k2, const FitOptions& options) {
  MnpcaModel model;
  model.features = build_feature_set(svds, k1, k2, options.features);
  const FeatureSet& fs = model.features;
  const int size = fs.basis_size();

  if (options.dims) {
    const auto [d1, d2] = *options.dims;
    if (d1 < 1 || d2 < 1 || d1 > size || d2 > size)
      throw std::invalid_argument("fit: latent dimensions must lie in [1, mn]");
  }

  Eigen::MatrixXd P1 = fs.K1_dag_sqrt *
                       centered_second_moment(fs.factors, fs.K2_dag, fs.F_bar, true) *
                       fs.K1_dag_sqrt;
  Eigen::MatrixXd P2 = fs.K2_dag_sqrt *
                       centered_second_moment(fs.factors, fs.K1_dag, fs.F_bar, false) *
                       fs.K2_dag_sqrt;
  // Absorb the floating-point asymmetry of the inverse products.
  P1 = ((P1 + P1.transpose()) / 2.0).eval();
  P2 = ((P2 + P2.transpose()) / 2.0).eval();

  const EigenPairs e1 = descending_eig(P1);
  const EigenPairs e2 = descending_eig(P2);
  model.eigvals1 = e1.values;
  model.eigvals2 = e2.values;

  model.d1 = options.dims ? options.dims->first : scree_select(model.eigvals1);
  model.d2 = options.dims ? options.dims->second : scree_select(model.eigvals2);

  model.A = e1.vectors.leftCols(model.d1);
  model.B = e2.vectors.leftCols(model.d2);
  canonicalize_columns(model.A);
  canonicalize_columns(model.B);
  return model;
}

Eigen::MatrixXd latent_from_feature(const MnpcaModel& model, const Eigen::MatrixXd& F) {
  const FeatureSet& fs = model.features;
  return (model.A.transpose() * fs.K1_dag_sqrt) * (F - fs.F_bar) *
         (fs.K2_dag_sqrt * model.B);
}

Eigen::MatrixXd transform(const MnpcaModel& model, const Eigen::MatrixXd& X) {
  const FeatureSet& fs = model.features;
  if (X.rows() != fs.p1 || X.cols() != fs.p2)
    throw std::invalid_argument("transform: dimension mismatch with the fitted sample");
  const TruncatedSvd svd = truncated_svd(X, fs.options.r, fs.options.tie_tol);
  const Eigen::MatrixXd F0 =
      feature_matrix(fs.k1, fs.k2, fs.left_basis, fs.right_basis, svd);
  return latent_from_feature(model, F0);
}

std::vector<Eigen::MatrixXd> in_sample_latents(const MnpcaModel& model) {
  if (model.features.F.empty())
    throw std::runtime_error(
        "in_sample_latents: model holds no training feature matrices "
        "(loaded from file?)");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(model.features.F.size());
  for (const auto& F : model.features.F) out.push_back(latent_from_feature(model, F));
  return out;
}

std::vector<EigenReportRow> eigen_report(const MnpcaModel& model) {
  std::vector<EigenReportRow> rows;
  rows.reserve(model.eigvals1.size() + model.eigvals2.size());
  for (Eigen::Index i = 0; i < model.eigvals1.size(); ++i)
    rows.push_back({1, static_cast<int>(i) + 1, model.eigvals1(i)});
  for (Eigen::Index i = 0; i < model.eigvals2.size(); ++i)
    rows.push_back({2, static_cast<int>(i) + 1, model.eigvals2(i)});
  return rows;
}

}  // namespace mnpca
