#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "krr/errors.hpp"

#include "json.hpp"

namespace krr {

enum class KernelFamily {
  SphericalPolynomial,  // (1 + <x,x'>)^p, inputs on the unit sphere
  TL1,                  // max{tau' - ||x - x'||_1, 0}
  DeltaGauss,           // exp(-||x-x'||^2/tau1) - exp(-||x-x'||^2/tau2)
  LogKernel,            // -log(1 + ||x - x'||_2)
  Gaussian,             // exp(-||x-x'||^2 / (2 sigma^2)), PSD baseline
  IdentityTest,         // 1 iff x == x' exactly; yields K = I on distinct
                        // points. Test fixture for analytic solver checks.
};

struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  int degree = 10;          // SphericalPolynomial
  double tau_prime = 7.0;   // TL1
  double tau1 = 1.0;        // DeltaGauss
  double tau2 = 0.1;        // DeltaGauss
  double sigma = 1.0;       // Gaussian

  static KernelSpec spherical_polynomial(int p) {
    KernelSpec k;
    k.family = KernelFamily::SphericalPolynomial;
    k.degree = p;
    k.validate();
    return k;
  }
  static KernelSpec tl1(double tau_prime) {
    KernelSpec k;
    k.family = KernelFamily::TL1;
    k.tau_prime = tau_prime;
    k.validate();
    return k;
  }
  static KernelSpec delta_gauss(double tau1 = 1.0, double tau2 = 0.1) {
    KernelSpec k;
    k.family = KernelFamily::DeltaGauss;
    k.tau1 = tau1;
    k.tau2 = tau2;
    k.validate();
    return k;
  }
  static KernelSpec log_kernel() {
    KernelSpec k;
    k.family = KernelFamily::LogKernel;
    return k;
  }
  static KernelSpec gaussian(double sigma = 1.0) {
    KernelSpec k;
    k.family = KernelFamily::Gaussian;
    k.sigma = sigma;
    k.validate();
    return k;
  }
  static KernelSpec identity_test() {
    KernelSpec k;
    k.family = KernelFamily::IdentityTest;
    return k;
  }

  void validate() const;
  std::string name() const;

  nlohmann::json to_json() const;
  static KernelSpec from_json(const nlohmann::json& j);
  static KernelSpec from_name(const std::string& name);
};

/// A dense sample: rows of X are points, y the targets.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::string name;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  void validate() const;
};

namespace detail {

template <class XA, class XB>
double squared_distance(const Eigen::MatrixBase<XA>& x,
                        const Eigen::MatrixBase<XB>& xp) {
  return (x - xp).squaredNorm();
}

// Formula dispatch without argument validation; gram() validates once.
template <class XA, class XB>
double kernel_eval_unchecked(const KernelSpec& spec,
                             const Eigen::MatrixBase<XA>& x,
                             const Eigen::MatrixBase<XB>& xp) {
  switch (spec.family) {
    case KernelFamily::SphericalPolynomial: {
      double dot = x.dot(xp);
      return std::pow(1.0 + dot, static_cast<double>(spec.degree));
    }
    case KernelFamily::TL1: {
      double d1 = (x - xp).cwiseAbs().sum();
      return std::max(spec.tau_prime - d1, 0.0);
    }
    case KernelFamily::DeltaGauss: {
      double d2 = squared_distance(x, xp);
      return std::exp(-d2 / spec.tau1) - std::exp(-d2 / spec.tau2);
    }
    case KernelFamily::LogKernel:
      // The distance norm here is Euclidean.
      return -std::log1p(std::sqrt(squared_distance(x, xp)));
    case KernelFamily::Gaussian: {
      double d2 = squared_distance(x, xp);
      return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
    }
    case KernelFamily::IdentityTest:
      return (x - xp).isZero(0.0) ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace detail

/// Evaluate k(x, x'). Symmetric in its point arguments; every family depends
/// on (x, x') only through ||x - x'|| or <x, x'>, so the symmetry is exact in
/// floating point as well.
template <class XA, class XB>
double kernel_eval(const KernelSpec& spec, const Eigen::MatrixBase<XA>& x,
                   const Eigen::MatrixBase<XB>& xp) {
  if (x.size() != xp.size())
    throw ArgumentError("kernel_eval: point dimensions differ (" +
                        std::to_string(x.size()) + " vs " +
                        std::to_string(xp.size()) + ")");
  if (!x.allFinite() || !xp.allFinite())
    throw ArgumentError("kernel_eval: non-finite input point");
  spec.validate();
  return detail::kernel_eval_unchecked(spec, x, xp);
}

/// Gram matrix K_ij = k(x_i, x_j). The upper triangle is computed and
/// mirrored, so the result is symmetric to the bit. Row blocks are
/// parallelized; entries are independent, so the result does not depend on
/// the thread count.
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& X);

/// Throws unless every row of X has unit Euclidean norm (tolerance 1e-9).
/// The spherical polynomial kernel is only defined on the unit sphere;
/// normalization has to be requested explicitly (--normalize-sphere) so that
/// unnormalized data surfaces as an error instead of being silently fixed.
void require_unit_rows(const Eigen::MatrixXd& X);

namespace ref {
/// Plain serial Gram construction. Reference implementation used by the
/// tests and the benchmark to validate the parallel kernel bit-for-bit.
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& X);
}  // namespace ref

}  // namespace krr
