#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "krr/rng.hpp"

namespace krr::checks {

/// Minimum of the indefinite-regularizer objective
/// (1/m)||K a - y||^2 + lambda a^T K a over the constraint set
/// {a : ||K a||^2 = m r^2}, found by brute force over a dense direction
/// grid (a = sqrt(m) r u / ||K u||, u on the unit sphere; m must be 2 or 3).
/// Evaluates the objective directly on K; shares nothing with the solver.
struct GridMinimum {
  double objective = 0;
  Eigen::VectorXd alpha;
};

GridMinimum grid_min_rkks(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                          double lambda, double r, std::size_t n_points);

/// Same search for the covariance-regularized objective
/// (1/m)||K a - y||^2 + (lambda/m) a^T K^2 a.
GridMinimum grid_min_t_reg(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                           double lambda, double r, std::size_t n_points);

/// Random symmetric matrix with a planted spectrum: eigenvalues `sigma` in
/// a uniformly random orthogonal frame.
Eigen::MatrixXd planted_symmetric(const Eigen::VectorXd& sigma, Rng& rng);

/// Random symmetric indefinite matrix (mixed-sign planted eigenvalues).
Eigen::MatrixXd random_indefinite(Eigen::Index m, Rng& rng);

struct CheckReport {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  Eigen::Index m = 0;    // oracle instance size (2 or 3); 0 alternates
  int trials = 20;
  bool perturb_mu = false;  // negative control: offsets mu by 10x the
                            // perturbation bound, which must fail
};

/// Property suite behind the `verify` command: grid-oracle optimality,
/// analytic multiplier of the covariance-regularized problem, perturbation
/// certificates, nonnegativity and closed-form identity of the
/// regularization-gap decomposition, pseudo-inverse identities.
std::vector<CheckReport> run_verification(const VerifyOptions& options);

}  // namespace krr::checks
