#include "krr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace krr {

Eigen::VectorXd project(const Eigen::VectorXd& values, double B) {
  if (!(B > 0)) throw ArgumentError("project: clip level B must be positive");
  return values.cwiseMax(-B).cwiseMin(B);
}

double krein_inner(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols() || alpha.size() != K.rows())
    throw ArgumentError("krein_inner: shape mismatch");
  return alpha.dot(K * alpha);
}

double t_inner(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols() || alpha.size() != K.rows())
    throw ArgumentError("t_inner: shape mismatch");
  return (K * alpha).squaredNorm() / static_cast<double>(K.rows());
}

void RateParams::validate() const {
  if (!(gamma > 0) || !(gamma <= 1))
    throw ArgumentError("rate params: gamma must lie in (0, 1]");
  if (!(beta > 0) || !(beta <= 1))
    throw ArgumentError("rate params: beta must lie in (0, 1]");
  if (!(s > 0)) throw ArgumentError("rate params: s must be positive");
  if (!(eta > 0)) throw ArgumentError("rate params: eta must be positive");
  if (!(epsilon >= 0))
    throw ArgumentError("rate params: epsilon must be nonnegative");
}

namespace {

void check_epsilon_window(const RateParams& p) {
  double window = p.epsilon_window();
  if (!(window > 0))
    throw ArgumentError(
        "rate params: empty admissibility window, "
        "1/s - (gamma + s*gamma - 1)(2 + s) <= 0 for s = " +
        std::to_string(p.s) + ", gamma = " + std::to_string(p.gamma));
  if (!(p.epsilon > 0) || !(p.epsilon < window))
    throw ArgumentError(
        "rate params: epsilon violates 0 < epsilon < "
        "1/s - (gamma + s*gamma - 1)(2 + s) = " +
        std::to_string(window) + " (epsilon = " + std::to_string(p.epsilon) +
        ")");
}

}  // namespace

std::array<double, 5> theta_rate_terms(const RateParams& p) {
  const double g = p.gamma, b = p.beta, s = p.s, e = p.eta, eps = p.epsilon;
  return {
      g * b,
      g + e - 1.0,
      (2.0 - s * g * (1.0 - b)) / (2.0 * (1.0 + s)),
      (2.0 - s * (1.0 - e)) / (2.0 * (1.0 + s)),
      (1.0 - s * (g + s * g - 1.0) * (2.0 + s) - s * eps) / (1.0 + s),
  };
}

double theta_rkhs(const RateParams& p) {
  p.validate();
  check_epsilon_window(p);
  const double g = p.gamma, b = p.beta, s = p.s, eps = p.epsilon;
  double t1 = g * b;
  double t2 = (2.0 - s * g * (1.0 - b)) / (2.0 * (1.0 + s));
  double t3 = (1.0 - s * (g + s * g - 1.0) * (2.0 + s) - s * eps) / (1.0 + s);
  return std::min({t1, t2, t3});
}

double theta_rate(const RateParams& p) {
  p.validate();
  // For eta >= 1 the two eta-dependent exponents are dominated by the
  // remaining three, and the rate is the Hilbert-space one.
  if (p.eta >= 1.0) return theta_rkhs(p);
  check_epsilon_window(p);
  double eta_floor = std::max(0.0, 1.0 - 2.0 / p.s);
  if (!(p.eta > eta_floor))
    throw ArgumentError(
        "rate params: eta violates max{0, 1 - 2/s} < eta < 1 "
        "(eta = " +
        std::to_string(p.eta) + ", floor = " + std::to_string(eta_floor) +
        ")");
  auto t = theta_rate_terms(p);
  return *std::min_element(t.begin(), t.end());
}

HenriciCertificate henrici_certificate(const GramSpectrum& s,
                                       const Eigen::VectorXd& y, double lambda,
                                       double r, double mu) {
  if (y.size() != s.size())
    throw ArgumentError("henrici_certificate: size mismatch");
  if (!std::isfinite(mu))
    throw ArgumentError("henrici_certificate: mu must be finite");
  const double md = static_cast<double>(s.size());
  double varsigma = y.squaredNorm() / (md * md * md * r * r);

  HenriciCertificate cert;
  cert.bound = varsigma + std::sqrt(varsigma);
  cert.gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s.sigma(i) != 0.0)
      cert.gap = std::min(cert.gap, std::abs(mu - lambda / s.sigma(i)));
  if (s.zeros() > 0) cert.gap = std::min(cert.gap, std::abs(mu));
  return cert;
}

HypothesisErrorReport hypothesis_error(const SphereProblem& p) {
  SphereSolution krein_sol = solve_rkks_sphere(p);
  SphereSolution cov_sol = solve_t_reg_sphere(p);

  const double md = static_cast<double>(p.m);
  HypothesisErrorReport rep;
  rep.m = md;
  rep.lambda = p.lambda;
  rep.r = p.r;
  rep.mu = krein_sol.mu;
  rep.mu_tilde = cov_sol.mu;
  rep.range_deficient = cov_sol.warning.has_value();

  // Closed forms in the eigenbasis: y^T K K^+ y is the squared mass of z on
  // the range, and y^T K (lambda I - mu K)^+ y sums z_i^2 / (pole_i - mu).
  double range_mass = 0.0;
  double resolvent_mass = 0.0;
  for (Eigen::Index i = 0; i < p.m; ++i) {
    if (p.spectrum.sigma(i) == 0.0) continue;
    double zi2 = p.z(i) * p.z(i);
    range_mass += zi2;
    resolvent_mass += zi2 / (p.lambda / p.spectrum.sigma(i) - rep.mu);
  }
  rep.P1 = -2.0 / (md * md * rep.mu_tilde) * range_mass;
  rep.P2 = -2.0 / (md * md) * resolvent_mass;
  rep.P = rep.P1 + rep.P2;

  // Direct recomputation: difference of the covariance-regularized
  // functional at the two solutions.
  auto functional = [&](const SphereSolution& sol) {
    double fit = 0, constraint = 0;
    Eigen::VectorXd a = p.spectrum.V.transpose() * sol.alpha;
    for (Eigen::Index i = 0; i < p.m; ++i) {
      double ka = p.spectrum.sigma(i) * a(i);
      fit += (ka - p.z(i)) * (ka - p.z(i));
      constraint += ka * ka;
    }
    return fit / md + p.lambda * constraint / md;
  };
  rep.direct_diff = functional(krein_sol) - functional(cov_sol);

  double varsigma = p.y_norm * p.y_norm / (md * md * md * p.r * p.r);
  rep.henrici_bound = varsigma + std::sqrt(varsigma);
  rep.henrici_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p.m; ++i)
    if (p.spectrum.sigma(i) != 0.0)
      rep.henrici_gap = std::min(
          rep.henrici_gap, std::abs(rep.mu - p.lambda / p.spectrum.sigma(i)));
  if (p.spectrum.zeros() > 0)
    rep.henrici_gap = std::min(rep.henrici_gap, std::abs(rep.mu));
  return rep;
}

HypothesisErrorReport hypothesis_error(const Eigen::MatrixXd& K,
                                       const Eigen::VectorXd& y, double lambda,
                                       double r) {
  return hypothesis_error(SphereProblem::build(sym_eig(K), y, lambda, r));
}

HypothesisBound hypothesis_bound(double M, double r, const EigenDecayFit& fit,
                                 double gamma) {
  if (!(M > 0) || !(r > 0))
    throw ArgumentError("hypothesis_bound: M and r must be positive");
  if (!(fit.c1 > 0) || !(fit.cm < 0))
    throw ArgumentError("hypothesis_bound: decay fit must have c1 > 0, cm < 0");
  HypothesisBound b;
  b.C1_tilde = 2.0 * M * r + 2.0 * M * M * (-fit.cm / fit.C2 + M * M / (r * r) +
                                            fit.C1 / fit.c1);
  b.Theta1 = std::min(1.0, gamma + fit.eta() - 1.0);
  return b;
}

std::string HypothesisErrorReport::csv_header() {
  return "m,lambda,r,P,P1,P2,mu,mu_tilde,henrici_bound,henrici_gap,bound_rhs";
}

std::string HypothesisErrorReport::csv_row() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g",
                m, lambda, r, P, P1, P2, mu, mu_tilde, henrici_bound,
                henrici_gap, bound_rhs);
  return buf;
}

}  // namespace krr
