#include "mnpca/svd_features.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace mnpca {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kPinvRelTol = 1e-12;

struct SymEig {
  Eigen::VectorXd lambda;  // ascending, as produced by the solver
  Eigen::MatrixXd Q;
};

SymEig sym_eig(const Eigen::MatrixXd& K, const char* what) {
  if (K.rows() != K.cols())
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  if (!K.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite input");
  const double scale = K.cwiseAbs().maxCoeff();
  const double tol = 1e-10 * std::max(1.0, scale);
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Eigenvalues of K + eps |K|_2 I reuse the eigenvectors of K.
Eigen::VectorXd regularized_eigenvalues(const SymEig& eig, double eps, const char* what) {
  const double spectral_norm = eig.lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd shifted = eig.lambda.array() + eps * spectral_norm;
  const double lo = shifted.minCoeff();
  const double hi = shifted.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition)
    throw std::runtime_error(std::string(what) +
                             ": regularized matrix is singular or ill-conditioned");
  return shifted;
}

Eigen::MatrixXd assemble(const SymEig& eig, const Eigen::VectorXd& d) {
  return eig.Q * d.asDiagonal() * eig.Q.transpose();
}

Eigen::VectorXd pinv_diagonal(const Eigen::VectorXd& lambda, bool sqrt_inverse) {
  const double cutoff = kPinvRelTol * lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > cutoff)
      d(i) = sqrt_inverse ? 1.0 / std::sqrt(lambda(i)) : 1.0 / lambda(i);
  }
  return d;
}

void check_kernel_pair(const KernelSpec& k1, const KernelSpec& k2) {
  k1.validate();
  k2.validate();
  if (k1.parity != k2.parity)
    throw std::invalid_argument(
        "kernel parity mismatch: the two kernels must be both odd, both even, "
        "or both linear-raw");
}

// Joint signs of singular pairs are arbitrary; pinning them (largest-
// magnitude entry of u_j positive, v_j flipped along) makes the coordinate
// representation identical for every input sign pattern. The parity of the
// kernels guarantees this is a pure renaming.
void canonicalize_pair_signs(TruncatedSvd& svd) {
  for (int j = 0; j < svd.rank(); ++j) {
    Eigen::Index lead = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < svd.left_vectors.rows(); ++i) {
      const double a = std::abs(svd.left_vectors(i, j));
      if (a > best) {
        best = a;
        lead = i;
      }
    }
    if (svd.left_vectors(lead, j) < 0.0) {
      svd.left_vectors.col(j) = -svd.left_vectors.col(j);
      svd.right_vectors.col(j) = -svd.right_vectors.col(j);
    }
  }
}

}  // namespace

void MatrixSample::validate() const {
  if (observations.empty())
    throw std::invalid_argument("matrix sample: need at least one observation");
  const Eigen::Index rows = observations[0].rows();
  const Eigen::Index cols = observations[0].cols();
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("matrix sample: observations must be non-empty matrices");
  for (const auto& X : observations) {
    if (X.rows() != rows || X.cols() != cols)
      throw std::invalid_argument("matrix sample: dimension mismatch across observations");
    if (!X.allFinite())
      throw std::invalid_argument("matrix sample: non-finite entry");
  }
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& X, int r, double tie_tol) {
  if (!X.allFinite()) throw std::invalid_argument("truncated_svd: non-finite input");
  if (r < 1 || r > std::min(X.rows(), X.cols()))
    throw std::invalid_argument("truncated_svd: need 1 <= r <= min(p1, p2)");
  if (tie_tol < 0.0) throw std::invalid_argument("truncated_svd: tie_tol must be nonnegative");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  const double sigma1 = sigma(0);
  if (!(sigma(r - 1) > tie_tol * sigma1))
    throw SvdRankError("rank below requested r");
  for (int j = 0; j + 1 < r; ++j) {
    if (sigma(j) - sigma(j + 1) <= tie_tol * sigma1)
      throw SvdRankError("repeated singular value");
  }

  TruncatedSvd out;
  out.singular_values = sigma.head(r);
  out.left_vectors = svd.matrixU().leftCols(r);
  out.right_vectors = svd.matrixV().leftCols(r);
  return out;
}

std::vector<TruncatedSvd> compute_svds(const MatrixSample& sample, int r, double tie_tol) {
  sample.validate();
  std::vector<TruncatedSvd> svds;
  svds.reserve(sample.observations.size());
  for (const auto& X : sample.observations) svds.push_back(truncated_svd(X, r, tie_tol));
  return svds;
}

Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& K, double eps) {
  if (eps < 0.0) throw std::invalid_argument("regularized_inverse: eps must be nonnegative");
  const SymEig eig = sym_eig(K, "regularized_inverse");
  const Eigen::VectorXd shifted = regularized_eigenvalues(eig, eps, "regularized_inverse");
  return assemble(eig, shifted.cwiseInverse());
}

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& K, double eps) {
  if (eps < 0.0) throw std::invalid_argument("inverse_sqrt: eps must be nonnegative");
  const SymEig eig = sym_eig(K, "inverse_sqrt");
  const Eigen::VectorXd shifted = regularized_eigenvalues(eig, eps, "inverse_sqrt");
  return assemble(eig, shifted.cwiseSqrt().cwiseInverse());
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& K) {
  const SymEig eig = sym_eig(K, "pseudo_inverse");
  return assemble(eig, pinv_diagonal(eig.lambda, /*sqrt_inverse=*/false));
}

Eigen::MatrixXd pseudo_inverse_sqrt(const Eigen::MatrixXd& K) {
  const SymEig eig = sym_eig(K, "pseudo_inverse_sqrt");
  return assemble(eig, pinv_diagonal(eig.lambda, /*sqrt_inverse=*/true));
}

FeatureFactors feature_factors(const KernelSpec& k1, const KernelSpec& k2,
                               const Eigen::MatrixXd& left_basis,
                               const Eigen::MatrixXd& right_basis,
                               const TruncatedSvd& svd) {
  if (svd.left_vectors.rows() != left_basis.rows() ||
      svd.right_vectors.rows() != right_basis.rows())
    throw std::invalid_argument("feature_matrix: dimension mismatch with the basis");
  FeatureFactors f;
  f.left_kvecs.resize(left_basis.cols(), svd.rank());
  f.right_kvecs.resize(right_basis.cols(), svd.rank());
  f.sigma = svd.singular_values;
  for (int j = 0; j < svd.rank(); ++j) {
    f.left_kvecs.col(j) = kernel_vector(k1, left_basis, svd.left_vectors.col(j));
    f.right_kvecs.col(j) = kernel_vector(k2, right_basis, svd.right_vectors.col(j));
  }
  return f;
}

Eigen::MatrixXd feature_matrix(const KernelSpec& k1, const KernelSpec& k2,
                               const Eigen::MatrixXd& left_basis,
                               const Eigen::MatrixXd& right_basis,
                               const TruncatedSvd& svd) {
  return feature_factors(k1, k2, left_basis, right_basis, svd).matrix();
}

FeatureSet build_feature_set(const MatrixSample& sample, const KernelSpec& k1,
                             const KernelSpec& k2, const FeatureOptions& options) {
  sample.validate();
  if (options.r > std::min(sample.p1(), sample.p2()))
    throw std::invalid_argument("build_feature_set: r exceeds min(p1, p2)");
  return build_feature_set(compute_svds(sample, options.r, options.tie_tol), k1, k2,
                           options);
}

FeatureSet build_feature_set(const std::vector<TruncatedSvd>& input_svds,
                             const KernelSpec& k1, const KernelSpec& k2,
                             const FeatureOptions& options) {
  check_kernel_pair(k1, k2);
  if (input_svds.empty()) throw std::invalid_argument("build_feature_set: empty sample");
  if (options.m < 1 || options.m > options.r)
    throw std::invalid_argument("build_feature_set: need 1 <= m <= r");
  if (options.eps < 0.0)
    throw std::invalid_argument("build_feature_set: eps must be nonnegative");

  std::vector<TruncatedSvd> svds = input_svds;
  for (auto& svd : svds) canonicalize_pair_signs(svd);

  const int n = static_cast<int>(svds.size());
  const int m = options.m;
  const Eigen::Index p1 = svds[0].left_vectors.rows();
  const Eigen::Index p2 = svds[0].right_vectors.rows();
  for (const auto& svd : svds) {
    if (svd.rank() < options.r)
      throw std::invalid_argument("build_feature_set: decomposition rank below r");
    if (svd.left_vectors.rows() != p1 || svd.right_vectors.rows() != p2)
      throw std::invalid_argument("build_feature_set: dimension mismatch across observations");
  }

  FeatureSet fs;
  fs.k1 = k1;
  fs.k2 = k2;
  fs.options = options;
  fs.n = n;
  fs.p1 = static_cast<int>(p1);
  fs.p2 = static_cast<int>(p2);

  fs.left_basis.resize(p1, static_cast<Eigen::Index>(m) * n);
  fs.right_basis.resize(p2, static_cast<Eigen::Index>(m) * n);
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < m; ++s) {
      fs.left_basis.col(static_cast<Eigen::Index>(i) * m + s) = svds[i].left_vectors.col(s);
      fs.right_basis.col(static_cast<Eigen::Index>(i) * m + s) = svds[i].right_vectors.col(s);
    }
  }

  fs.K1 = gram_matrix(k1, fs.left_basis);
  fs.K2 = gram_matrix(k2, fs.right_basis);

  if (options.pseudo_inverse) {
    fs.K1_dag = pseudo_inverse(fs.K1);
    fs.K2_dag = pseudo_inverse(fs.K2);
    fs.K1_dag_sqrt = pseudo_inverse_sqrt(fs.K1);
    fs.K2_dag_sqrt = pseudo_inverse_sqrt(fs.K2);
  } else {
    fs.K1_dag = regularized_inverse(fs.K1, options.eps);
    fs.K2_dag = regularized_inverse(fs.K2, options.eps);
    fs.K1_dag_sqrt = inverse_sqrt(fs.K1, options.eps);
    fs.K2_dag_sqrt = inverse_sqrt(fs.K2, options.eps);
  }

  fs.factors.reserve(n);
  fs.F.reserve(n);
  for (int i = 0; i < n; ++i) {
    fs.factors.push_back(feature_factors(k1, k2, fs.left_basis, fs.right_basis, svds[i]));
    fs.F.push_back(fs.factors.back().matrix());
  }

  fs.F_bar = Eigen::MatrixXd::Zero(fs.basis_size(), fs.basis_size());
  for (const auto& F : fs.F) fs.F_bar += F;
  fs.F_bar /= static_cast<double>(n);

  return fs;
}

}  // namespace mnpca
