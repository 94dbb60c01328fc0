#include "mnpca/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace mnpca {

KernelSpec KernelSpec::linear(Parity parity) {
  KernelSpec s;
  s.base = KernelBase::Linear;
  s.parity = parity;
  s.validate();
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma2, Parity parity) {
  KernelSpec s;
  s.base = KernelBase::Gaussian;
  s.parity = parity;
  s.sigma2 = sigma2;
  s.validate();
  return s;
}

KernelSpec KernelSpec::polynomial(int degree, double offset, Parity parity) {
  KernelSpec s;
  s.base = KernelBase::Polynomial;
  s.parity = parity;
  s.degree = degree;
  s.offset = offset;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (base == KernelBase::Gaussian && !(sigma2 > 0.0))
    throw std::invalid_argument("kernel spec: gaussian sigma2 must be positive");
  if (base == KernelBase::Polynomial && degree < 1)
    throw std::invalid_argument("kernel spec: polynomial degree must be >= 1");
  if (base == KernelBase::Polynomial && offset < 0.0)
    throw std::invalid_argument("kernel spec: polynomial offset must be nonnegative");
  if (parity == Parity::LinearRaw && base != KernelBase::Linear)
    throw std::invalid_argument("kernel spec: linear-raw parity requires the linear base");
}

namespace {

void check_pair(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel evaluation: dimension mismatch");
  if (!x.allFinite() || !y.allFinite())
    throw std::invalid_argument("kernel evaluation: non-finite input");
}

double eval_base_unchecked(const KernelSpec& spec,
                           const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y) {
  switch (spec.base) {
    case KernelBase::Linear:
      return x.dot(y);
    case KernelBase::Gaussian:
      return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma2));
    case KernelBase::Polynomial:
      return std::pow(x.dot(y) + spec.offset, spec.degree);
  }
  throw std::logic_error("kernel spec: unknown base");
}

}  // namespace

double eval_base(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y) {
  spec.validate();
  check_pair(x, y);
  return eval_base_unchecked(spec, x, y);
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  spec.validate();
  check_pair(x, y);
  switch (spec.parity) {
    case Parity::LinearRaw:
      return x.dot(y);
    case Parity::Odd:
      return eval_base_unchecked(spec, x, y) - eval_base_unchecked(spec, -x, y);
    case Parity::Even:
      return eval_base_unchecked(spec, x, y) + eval_base_unchecked(spec, -x, y);
  }
  throw std::logic_error("kernel spec: unknown parity");
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& basis) {
  const Eigen::Index n = basis.cols();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = eval_kernel(spec, basis.col(i), basis.col(j));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& basis,
                              const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd k(basis.cols());
  for (Eigen::Index a = 0; a < basis.cols(); ++a)
    k(a) = eval_kernel(spec, x, basis.col(a));
  return k;
}

double default_bandwidth(const Eigen::MatrixXd& basis_columns) {
  const Eigen::Index n = basis_columns.cols();
  if (n == 0) throw std::invalid_argument("default_bandwidth: empty basis");
  if (!basis_columns.allFinite())
    throw std::invalid_argument("default_bandwidth: non-finite input");
  const Eigen::MatrixXd gram = basis_columns.transpose() * basis_columns;
  return gram.norm() / static_cast<double>(n);
}

std::string to_string(KernelBase base) {
  switch (base) {
    case KernelBase::Linear: return "linear";
    case KernelBase::Gaussian: return "gaussian";
    case KernelBase::Polynomial: return "polynomial";
  }
  return "?";
}

std::string to_string(Parity parity) {
  switch (parity) {
    case Parity::Odd: return "odd";
    case Parity::Even: return "even";
    case Parity::LinearRaw: return "linear-raw";
  }
  return "?";
}

KernelBase kernel_base_from_string(const std::string& s) {
  if (s == "linear") return KernelBase::Linear;
  if (s == "gaussian") return KernelBase::Gaussian;
  if (s == "polynomial") return KernelBase::Polynomial;
  throw std::invalid_argument("unknown kernel base: " + s);
}

Parity parity_from_string(const std::string& s) {
  if (s == "odd") return Parity::Odd;
  if (s == "even") return Parity::Even;
  if (s == "linear-raw" || s == "linear_raw") return Parity::LinearRaw;
  throw std::invalid_argument("unknown kernel parity: " + s);
}

}  // namespace mnpca
