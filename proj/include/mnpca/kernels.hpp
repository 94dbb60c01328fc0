#ifndef MNPCA_KERNELS_HPP
#define MNPCA_KERNELS_HPP

#include <Eigen/Core>
#include <string>

namespace mnpca {

enum class KernelBase { Linear, Gaussian, Polynomial };

// Parity of the induced kernel. Odd/Even wrap a base kernel k as
//
//   odd:   k(x, y) - k(-x, y)
//   even:  k(x, y) + k(-x, y)
//
// so that jointly flipping the sign of a singular pair cancels out of
// every downstream quantity. LinearRaw is the plain dot product and is
// permitted only with the linear base: the induced odd linear kernel
// equals 2 x.y, and the unscaled form is the one under which the fit
// coincides with linear two-sided PCA without a factor of two.
enum class Parity { Odd, Even, LinearRaw };

struct KernelSpec {
  KernelBase base = KernelBase::Gaussian;
  Parity parity = Parity::Odd;
  double sigma2 = 1.0;  // Gaussian bandwidth
  int degree = 2;       // Polynomial degree
  double offset = 0.0;  // Polynomial offset

  static KernelSpec linear(Parity parity = Parity::LinearRaw);
  static KernelSpec gaussian(double sigma2, Parity parity = Parity::Odd);
  static KernelSpec polynomial(int degree, double offset, Parity parity = Parity::Odd);

  // Throws std::invalid_argument when parameters are out of range or the
  // parity is incompatible with the base family.
  void validate() const;
};

// Base family evaluation:
//   linear      x.y
//   gaussian    exp(-|x - y|^2 / (2 sigma2))
//   polynomial  (x.y + offset)^degree
double eval_base(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y);

// Parity-wrapped evaluation; symmetric in (x, y).
double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

// Gram matrix of the parity-wrapped kernel over the columns of basis.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& basis);

// Vector (k(x, basis_a))_a over the columns of basis.
Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& basis,
                              const Eigen::Ref<const Eigen::VectorXd>& x);

// Default Gaussian bandwidth heuristic: the Frobenius norm of the matrix
// of pairwise dot products of the given vectors, divided by their count.
// Invariant under flipping the sign of any individual column.
double default_bandwidth(const Eigen::MatrixXd& basis_columns);

std::string to_string(KernelBase base);
std::string to_string(Parity parity);
KernelBase kernel_base_from_string(const std::string& s);
Parity parity_from_string(const std::string& s);

}  // namespace mnpca

#endif  // MNPCA_KERNELS_HPP
