#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <string>

#include "krr/kernels.hpp"
#include "krr/spectral.hpp"

#include "json.hpp"

namespace krr {

/// Sphere-constrained problem data in the eigenbasis of K: z = V^T y.
struct SphereProblem {
  GramSpectrum spectrum;
  Eigen::VectorXd z;
  double y_norm = 0;
  double lambda = 0;
  double r = 0;
  Eigen::Index m = 0;

  static SphereProblem build(GramSpectrum spectrum, const Eigen::VectorXd& y,
                             double lambda, double r);

  /// Constraint target: the secular function equals m^3 r^2 at the solution.
  double secular_target() const {
    return static_cast<double>(m) * static_cast<double>(m) *
           static_cast<double>(m) * r * r;
  }
};

/// Solution of a sphere-constrained regularized least-squares problem.
/// `objective` is the value of the objective the respective solver
/// minimizes: fit + lambda * alpha^T K alpha for the indefinite regularizer,
/// fit + (lambda/m) * alpha^T K^2 alpha for the covariance regularizer.
struct SphereSolution {
  Eigen::VectorXd alpha;
  double mu = 0;
  double objective = 0;
  double constraint_residual = 0;  // |alpha^T K^2 alpha - m r^2| / (m r^2)
  double krein_reg = 0;            // alpha^T K alpha, may be negative
  double t_reg = 0;                // (1/m) alpha^T K^2 alpha, nonnegative
  bool on_boundary = false;
  bool convex_objective = false;  // (1/m) K^2 + lambda K is PSD
  std::optional<std::string> warning;

  nlohmann::json to_json() const;
};

/// Secular function psi(mu) = sum over sigma_i != 0 of
/// (sigma_i z_i)^2 / (lambda - mu sigma_i)^2. Strictly increasing on the
/// interval left of all poles lambda/sigma_i; the boundary multiplier is the
/// root of psi(mu) = m^3 r^2 there. Throws if mu collides with a pole.
double secular_value(const SphereProblem& problem, double mu);

/// Leftmost pole min over nonzero sigma_i of lambda / sigma_i.
double leftmost_pole(const SphereProblem& problem);

/// Global minimizer of (1/m)||K a - y||^2 + lambda a^T K a subject to
/// a^T K^2 a = m r^2. alpha = (1/m)(lambda I - mu K)^+ y with mu the unique
/// secular root left of all poles. Throws DegenerateDataError when the
/// secular function vanishes identically and HardCaseError when the weight
/// at the leftmost pole is zero and no root exists.
SphereSolution solve_rkks_sphere(const Eigen::MatrixXd& K,
                                 const Eigen::VectorXd& y, double lambda,
                                 double r);
SphereSolution solve_rkks_sphere(const SphereProblem& problem);

/// Covariance-regularized variant: minimizes (1/m)||K a - y||^2 +
/// (lambda/m) a^T K^2 a on the same sphere. Closed form: the multiplier is
/// mu_t = -||y|| / (m sqrt(m) r) and alpha = -(1/(m mu_t)) K^+ y. When y has
/// a component outside range(K) the constraint cannot be met exactly; the
/// range-restricted optimum is returned with on_boundary = false and a
/// warning attached.
SphereSolution solve_t_reg_sphere(const Eigen::MatrixXd& K,
                                  const Eigen::VectorXd& y, double lambda,
                                  double r);
SphereSolution solve_t_reg_sphere(const SphereProblem& problem);

/// Analytic multiplier of the covariance-regularized problem.
inline double t_reg_multiplier(double y_norm, Eigen::Index m, double r) {
  double md = static_cast<double>(m);
  return -y_norm / (md * std::sqrt(md) * r);
}

/// The 2m x 2m block matrix [[lambda K^+, -I], [-y y^T / (m^3 r^2),
/// lambda K^+]] whose smallest real eigenvalue is the boundary multiplier.
/// Used by diagnostics and test oracles only; the solver itself goes through
/// the secular equation.
Eigen::MatrixXd build_G(const GramSpectrum& s, const Eigen::VectorXd& y,
                        double lambda, double r);

/// Kernel expansion f(x) = sum_i alpha_i k(x_i, x) evaluated at the rows of
/// X_new. Parallel over evaluation points; thread-count independent.
Eigen::VectorXd predict(const Eigen::VectorXd& alpha, const KernelSpec& spec,
                        const Eigen::MatrixXd& X_train,
                        const Eigen::MatrixXd& X_new);

namespace ref {
/// Serial reference for predict, kept for testing the parallel kernel.
Eigen::VectorXd predict(const Eigen::VectorXd& alpha, const KernelSpec& spec,
                        const Eigen::MatrixXd& X_train,
                        const Eigen::MatrixXd& X_new);
}  // namespace ref

}  // namespace krr
