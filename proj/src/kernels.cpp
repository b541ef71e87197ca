#include "krr/kernels.hpp"

#include "krr/parallel.hpp"

namespace krr {

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::SphericalPolynomial:
      if (degree < 1)
        throw ArgumentError("spherical polynomial degree must be >= 1");
      break;
    case KernelFamily::TL1:
      if (!(tau_prime > 0))
        throw ArgumentError("TL1 threshold tau' must be positive");
      break;
    case KernelFamily::DeltaGauss:
      if (!(tau1 > 0) || !(tau2 > 0))
        throw ArgumentError("Delta-Gauss widths tau1, tau2 must be positive");
      break;
    case KernelFamily::Gaussian:
      if (!(sigma > 0))
        throw ArgumentError("Gaussian width sigma must be positive");
      break;
    case KernelFamily::LogKernel:
    case KernelFamily::IdentityTest:
      break;
  }
}

std::string KernelSpec::name() const {
  switch (family) {
    case KernelFamily::SphericalPolynomial:
      return "spherical-polynomial";
    case KernelFamily::TL1:
      return "tl1";
    case KernelFamily::DeltaGauss:
      return "delta-gauss";
    case KernelFamily::LogKernel:
      return "log";
    case KernelFamily::Gaussian:
      return "gaussian";
    case KernelFamily::IdentityTest:
      return "identity-test";
  }
  return "unknown";
}

nlohmann::json KernelSpec::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  switch (family) {
    case KernelFamily::SphericalPolynomial:
      params["p"] = degree;
      break;
    case KernelFamily::TL1:
      params["tau_prime"] = tau_prime;
      break;
    case KernelFamily::DeltaGauss:
      params["tau1"] = tau1;
      params["tau2"] = tau2;
      break;
    case KernelFamily::Gaussian:
      params["sigma"] = sigma;
      break;
    case KernelFamily::LogKernel:
    case KernelFamily::IdentityTest:
      break;
  }
  return nlohmann::json{{"family", name()}, {"params", params}};
}

KernelSpec KernelSpec::from_name(const std::string& name) {
  KernelSpec k;
  if (name == "spherical-polynomial" || name == "sp")
    k.family = KernelFamily::SphericalPolynomial;
  else if (name == "tl1")
    k.family = KernelFamily::TL1;
  else if (name == "delta-gauss")
    k.family = KernelFamily::DeltaGauss;
  else if (name == "log")
    k.family = KernelFamily::LogKernel;
  else if (name == "gaussian")
    k.family = KernelFamily::Gaussian;
  else if (name == "identity-test")
    k.family = KernelFamily::IdentityTest;
  else
    throw ArgumentError("unknown kernel family: " + name);
  return k;
}

KernelSpec KernelSpec::from_json(const nlohmann::json& j) {
  KernelSpec k = from_name(j.at("family").get<std::string>());
  const auto params = j.value("params", nlohmann::json::object());
  switch (k.family) {
    case KernelFamily::SphericalPolynomial:
      k.degree = params.value("p", k.degree);
      break;
    case KernelFamily::TL1:
      k.tau_prime = params.value("tau_prime", k.tau_prime);
      break;
    case KernelFamily::DeltaGauss:
      k.tau1 = params.value("tau1", k.tau1);
      k.tau2 = params.value("tau2", k.tau2);
      break;
    case KernelFamily::Gaussian:
      k.sigma = params.value("sigma", k.sigma);
      break;
    case KernelFamily::LogKernel:
    case KernelFamily::IdentityTest:
      break;
  }
  k.validate();
  return k;
}

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw ArgumentError("dataset must have at least one row and one column");
  if (y.size() != X.rows())
    throw ArgumentError("dataset: label count " + std::to_string(y.size()) +
                        " does not match row count " +
                        std::to_string(X.rows()));
  if (!X.allFinite() || !y.allFinite())
    throw ArgumentError("dataset contains non-finite values");
}

void require_unit_rows(const Eigen::MatrixXd& X) {
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double n = X.row(i).norm();
    if (std::abs(n - 1.0) > 1e-9)
      throw ArgumentError(
          "spherical polynomial kernel requires unit-norm rows; row " +
          std::to_string(i) + " has norm " + std::to_string(n) +
          " (normalize explicitly, e.g. with --normalize-sphere)");
  }
}

namespace {

void check_gram_input(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  spec.validate();
  if (X.rows() < 1 || X.cols() < 1)
    throw ArgumentError("gram: input matrix must be nonempty");
  if (!X.allFinite())
    throw ArgumentError("gram: input matrix contains non-finite values");
  if (spec.family == KernelFamily::SphericalPolynomial) require_unit_rows(X);
}

}  // namespace

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  check_gram_input(spec, X);
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd K(m, m);
  // Each (i, j >= i) entry is written exactly once and mirrored, so the
  // result is identical for any thread count.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(par::max_threads())
#endif
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      double v = detail::kernel_eval_unchecked(spec, X.row(i), X.row(j));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

namespace ref {
// Naive full double loop, no mirroring. Also exercises the bitwise symmetry
// of kernel_eval, since entry (j, i) is evaluated independently of (i, j).
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  check_gram_input(spec, X);
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      K(i, j) = detail::kernel_eval_unchecked(spec, X.row(i), X.row(j));
  return K;
}
}  // namespace ref

}  // namespace krr
