#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "mnpca/kernels.hpp"
#include "mnpca/rng.hpp"

using namespace mnpca;

namespace {

Eigen::VectorXd random_vector(RngStream& rng, int dim, double lo = -2.0, double hi = 2.0) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

Eigen::VectorXd random_unit(RngStream& rng, int dim) {
  Eigen::VectorXd v = random_vector(rng, dim);
  while (v.norm() < 1e-8) v = random_vector(rng, dim);
  return v / v.norm();
}

KernelSpec spec_for(KernelBase base, Parity parity) {
  switch (base) {
    case KernelBase::Linear:
      return KernelSpec::linear(parity);
    case KernelBase::Gaussian:
      return KernelSpec::gaussian(0.7, parity);
    case KernelBase::Polynomial:
      return KernelSpec::polynomial(3, 0.5, parity);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("eval_base matches the closed forms") {
  Eigen::VectorXd x(2), y(2);
  x << 1, 2;
  y << 3, 4;
  CHECK(eval_base(KernelSpec::linear(), x, y) == doctest::Approx(11.0).epsilon(1e-14));

  Eigen::VectorXd z(3);
  z << 0.3, -1.2, 0.5;
  CHECK(eval_base(KernelSpec::gaussian(1.0, Parity::Odd), z, z) ==
        doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd e1(2), e1b(2);
  e1 << 1, 0;
  e1b << 1, 0;
  CHECK(eval_base(KernelSpec::polynomial(2, 1.0, Parity::Odd), e1, e1b) ==
        doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("eval_base input validation") {
  Eigen::VectorXd x(2), y(3);
  x << 1, 2;
  y << 1, 2, 3;
  CHECK_THROWS_AS(eval_base(KernelSpec::linear(), x, y), std::invalid_argument);

  Eigen::VectorXd bad(2);
  bad << 1, std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd ok(2);
  ok << 1, 2;
  CHECK_THROWS_AS(eval_base(KernelSpec::linear(), bad, ok), std::invalid_argument);
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::gaussian(0.0, Parity::Odd), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::gaussian(-1.0, Parity::Odd), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::polynomial(0, 0.0, Parity::Odd), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::polynomial(2, -0.5, Parity::Odd), std::invalid_argument);
  // linear-raw is reserved for the linear base
  KernelSpec bad;
  bad.base = KernelBase::Gaussian;
  bad.parity = Parity::LinearRaw;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(KernelSpec::linear(Parity::LinearRaw).validate());
}

TEST_CASE("eval_kernel closed-form examples") {
  Eigen::VectorXd x(2), y(2);
  x << 1, 0;
  y << 2, 0;
  CHECK(eval_kernel(KernelSpec::linear(Parity::Odd), x, y) ==
        doctest::Approx(4.0).epsilon(1e-14));  // 2 x.y

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  for (KernelBase base : {KernelBase::Linear, KernelBase::Gaussian, KernelBase::Polynomial})
    CHECK(eval_kernel(spec_for(base, Parity::Odd), zero, y) ==
          doctest::Approx(0.0).epsilon(1e-14));

  const Eigen::VectorXd zero3 = Eigen::VectorXd::Zero(3);
  CHECK(eval_kernel(KernelSpec::gaussian(1.0, Parity::Even), zero3, zero3) ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("symmetry and parity properties, 1000 random cases per base") {
  RngStream rng(20240811);
  for (KernelBase base : {KernelBase::Linear, KernelBase::Gaussian, KernelBase::Polynomial}) {
    for (int it = 0; it < 1000; ++it) {
      const int dim = 1 + static_cast<int>(rng.below(6));
      const Eigen::VectorXd x = random_vector(rng, dim);
      const Eigen::VectorXd y = random_vector(rng, dim);
      for (Parity parity : {Parity::Odd, Parity::Even}) {
        const KernelSpec spec = spec_for(base, parity);
        const double k_xy = eval_kernel(spec, x, y);
        const double k_yx = eval_kernel(spec, y, x);
        const double scale = std::max({1.0, std::abs(k_xy), std::abs(k_yx)});
        CHECK(std::abs(k_xy - k_yx) <= 1e-12 * scale);

        const double k_neg = eval_kernel(spec, -x, y);
        const double expected = parity == Parity::Odd ? -k_xy : k_xy;
        CHECK(std::abs(k_neg - expected) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("induced kernels produce PSD Gram matrices") {
  RngStream rng(7);
  for (KernelBase base : {KernelBase::Linear, KernelBase::Gaussian, KernelBase::Polynomial}) {
    for (Parity parity : {Parity::Odd, Parity::Even}) {
      const KernelSpec spec = spec_for(base, parity);
      for (int it = 0; it < 25; ++it) {
        const int dim = 2 + static_cast<int>(rng.below(4));
        const int count = 2 + static_cast<int>(rng.below(6));
        Eigen::MatrixXd points(dim, count);
        for (int c = 0; c < count; ++c) points.col(c) = random_vector(rng, dim);
        const Eigen::MatrixXd K = gram_matrix(spec, points);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
        const double max_eig = std::max(eig.eigenvalues().maxCoeff(), 0.0);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * std::max(max_eig, 1e-30));
      }
    }
  }
}

TEST_CASE("default_bandwidth closed forms") {
  Eigen::MatrixXd one(3, 1);
  one << 1, 0, 0;
  CHECK(default_bandwidth(one) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd ortho(2, 2);
  ortho << 1, 0, 0, 1;
  CHECK(default_bandwidth(ortho) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));

  // Antipodal pair: G = [[1,-1],[-1,1]], frobenius 2, so the value is 1.
  RngStream rng(99);
  const Eigen::VectorXd u = random_unit(rng, 4);
  Eigen::MatrixXd anti(4, 2);
  anti.col(0) = u;
  anti.col(1) = -u;
  Eigen::MatrixXd gram = anti.transpose() * anti;
  const double oracle = gram.norm() / 2.0;
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(default_bandwidth(anti) == doctest::Approx(oracle).epsilon(1e-14));

  Eigen::MatrixXd same(4, 2);
  same.col(0) = u;
  same.col(1) = u;
  CHECK(default_bandwidth(anti) == doctest::Approx(default_bandwidth(same)).epsilon(1e-14));
}

TEST_CASE("default_bandwidth sign invariance over all flip patterns") {
  RngStream rng(314);
  for (int it = 0; it < 50; ++it) {
    const int count = 1 + static_cast<int>(rng.below(4));  // n <= 4: all 2^n patterns
    const int dim = 2 + static_cast<int>(rng.below(5));
    Eigen::MatrixXd basis(dim, count);
    for (int c = 0; c < count; ++c) basis.col(c) = random_unit(rng, dim);
    const double reference = default_bandwidth(basis);
    for (int pattern = 0; pattern < (1 << count); ++pattern) {
      Eigen::MatrixXd flipped = basis;
      for (int c = 0; c < count; ++c)
        if (pattern & (1 << c)) flipped.col(c) = -flipped.col(c);
      CHECK(default_bandwidth(flipped) == doctest::Approx(reference).epsilon(1e-12));
    }
  }
}

TEST_CASE("default_bandwidth rejects an empty basis") {
  CHECK_THROWS_AS(default_bandwidth(Eigen::MatrixXd(3, 0)), std::invalid_argument);
}

TEST_CASE("kernel name round trips") {
  for (KernelBase base : {KernelBase::Linear, KernelBase::Gaussian, KernelBase::Polynomial})
    CHECK(kernel_base_from_string(to_string(base)) == base);
  for (Parity parity : {Parity::Odd, Parity::Even, Parity::LinearRaw})
    CHECK(parity_from_string(to_string(parity)) == parity);
  CHECK_THROWS_AS(kernel_base_from_string("laplace"), std::invalid_argument);
}
