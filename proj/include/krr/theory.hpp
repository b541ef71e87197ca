#pragma once

#include <Eigen/Core>
#include <array>
#include <string>

#include "krr/solver.hpp"
#include "krr/spectral.hpp"

namespace krr {

/// Elementwise clip of predictions to [-B, B]. Idempotent and 1-Lipschitz.
Eigen::VectorXd project(const Eigen::VectorXd& values, double B);

/// alpha^T K alpha. May be negative for indefinite K.
double krein_inner(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& K);

/// (1/m) alpha^T K^2 alpha = (1/m) ||K alpha||^2 >= 0.
double t_inner(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& K);

/// Learning-rate exponent inputs. lambda is tied to the sample size through
/// lambda = m^-gamma; beta is the regularity exponent of the target, s the
/// capacity exponent, eta the eigenvalue-growth exponent, epsilon the slack
/// of the capacity term.
struct RateParams {
  double gamma = 1.0;
  double beta = 1.0;
  double s = 1e-6;
  double eta = 1.0;
  double epsilon = 0.0;

  void validate() const;
  /// Upper end of the admissible epsilon interval:
  /// 1/s - (gamma + s*gamma - 1)(2 + s).
  double epsilon_window() const {
    return 1.0 / s - (gamma + s * gamma - 1.0) * (2.0 + s);
  }
};

/// The five competing exponents whose minimum is the rate for eta < 1.
std::array<double, 5> theta_rate_terms(const RateParams& p);

/// Learning-rate exponent for the indefinite-regularizer problem. For
/// eta >= 1 the eta-dependent terms are never active and the value equals
/// theta_rkhs. Requires max{0, 1 - 2/s} < eta when eta < 1 and an epsilon
/// inside the admissibility window; violations raise ArgumentError naming
/// the failed inequality.
double theta_rate(const RateParams& p);

/// Rate exponent of the positive-regularizer (Hilbert-space) regime:
/// min{gamma*beta, (2 - s*gamma(1-beta)) / (2(1+s)),
///     (1 - s(gamma + s*gamma - 1)(2+s) - s*epsilon) / (1+s)}.
double theta_rkhs(const RateParams& p);

/// Eigenvalue perturbation certificate for the boundary multiplier. The
/// rank-one block of G has spectral norm varsigma = ||y||^2 / (m^3 r^2)
/// (computed analytically, never numerically) and the triangular factor is
/// nilpotent of index 2, so every eigenvalue of G sits within
/// varsigma + sqrt(varsigma) of an eigenvalue of the block-triangular part.
struct HenriciCertificate {
  double bound = 0;  // varsigma + sqrt(varsigma)
  double gap = 0;    // distance from mu to the nearest eigenvalue of G1
  bool passes() const { return gap <= bound; }
};

HenriciCertificate henrici_certificate(const GramSpectrum& s,
                                       const Eigen::VectorXd& y, double lambda,
                                       double r, double mu);

/// Gap between the two regularization paths evaluated on one instance:
/// P = P1 + P2 with the closed forms
///   P1 = -(2 / (m^2 mu_t)) y^T K K^+ y,
///   P2 = -(2 / m^2)        y^T K (lambda I - mu K)^+ y,
/// plus the same quantity recomputed directly from the two objectives and
/// the perturbation certificate for mu.
struct HypothesisErrorReport {
  double m = 0;
  double lambda = 0;
  double r = 0;
  double P = 0;
  double P1 = 0;
  double P2 = 0;
  double direct_diff = 0;
  double mu = 0;
  double mu_tilde = 0;
  double henrici_bound = 0;
  double henrici_gap = 0;
  double bound_rhs = std::numeric_limits<double>::quiet_NaN();
  bool range_deficient = false;

  static std::string csv_header();
  std::string csv_row() const;
};

HypothesisErrorReport hypothesis_error(const Eigen::MatrixXd& K,
                                       const Eigen::VectorXd& y, double lambda,
                                       double r);
HypothesisErrorReport hypothesis_error(const SphereProblem& problem);

/// Envelope constant and exponent of the decay bound on the hypothesis
/// error: rhs = C1_tilde * m^-Theta1 with
/// C1_tilde = 2 M r + 2 M^2 (-cm/C2 + M^2/r^2 + C1/c1) and
/// Theta1 = min{1, gamma + eta - 1}. M is the output bound of the instance.
struct HypothesisBound {
  double C1_tilde = 0;
  double Theta1 = 0;
  double rhs(double m) const { return C1_tilde * std::pow(m, -Theta1); }
};

HypothesisBound hypothesis_bound(double M, double r, const EigenDecayFit& fit,
                                 double gamma);

}  // namespace krr
