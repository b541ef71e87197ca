#include "krr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "krr/parallel.hpp"

namespace krr {

SphereProblem SphereProblem::build(GramSpectrum spectrum,
                                   const Eigen::VectorXd& y, double lambda,
                                   double r) {
  if (y.size() != spectrum.size())
    throw ArgumentError("sphere problem: y length " + std::to_string(y.size()) +
                        " does not match matrix size " +
                        std::to_string(spectrum.size()));
  if (!y.allFinite()) throw ArgumentError("sphere problem: non-finite y");
  if (!(lambda > 0)) throw ArgumentError("sphere problem: lambda must be > 0");
  if (!(r > 0)) throw ArgumentError("sphere problem: r must be > 0");

  SphereProblem p;
  p.m = spectrum.size();
  p.z = spectrum.V.transpose() * y;
  p.y_norm = y.norm();
  p.lambda = lambda;
  p.r = r;
  p.spectrum = std::move(spectrum);
  double zn = p.z.norm();
  if (std::abs(zn - p.y_norm) > 1e-10 * std::max(1.0, p.y_norm))
    throw NumericError("sphere problem: ||V^T y|| deviates from ||y|| by " +
                       std::to_string(std::abs(zn - p.y_norm)));
  return p;
}

double secular_value(const SphereProblem& problem, double mu) {
  const auto& sigma = problem.spectrum.sigma;
  const double lambda = problem.lambda;
  double psi = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) == 0.0) continue;
    double pole = lambda / sigma(i);
    if (std::abs(mu - pole) <=
        1e-14 * std::max({1.0, std::abs(pole), std::abs(mu)}))
      throw ArgumentError("secular_value: mu collides with the pole at " +
                          std::to_string(pole));
    double num = sigma(i) * problem.z(i);
    double den = lambda - mu * sigma(i);
    psi += (num * num) / (den * den);
  }
  return psi;
}

double leftmost_pole(const SphereProblem& problem) {
  const auto& sigma = problem.spectrum.sigma;
  double pole = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) != 0.0) pole = std::min(pole, problem.lambda / sigma(i));
  if (!std::isfinite(pole))
    throw DegenerateDataError(
        "sphere solver: kernel matrix has no nonzero eigenvalues");
  return pole;
}

namespace {

struct SecularTerms {
  std::vector<double> pole;    // lambda / sigma_i over nonzero sigma_i
  std::vector<double> weight;  // z_i^2
  double pole_min = 0;
};

SecularTerms collect_terms(const SphereProblem& p) {
  SecularTerms t;
  for (Eigen::Index i = 0; i < p.spectrum.size(); ++i) {
    if (p.spectrum.sigma(i) == 0.0) continue;
    t.pole.push_back(p.lambda / p.spectrum.sigma(i));
    t.weight.push_back(p.z(i) * p.z(i));
  }
  if (t.pole.empty())
    throw DegenerateDataError(
        "sphere solver: kernel matrix has no nonzero eigenvalues");
  t.pole_min = *std::min_element(t.pole.begin(), t.pole.end());
  return t;
}

// psi and its derivative in pole coordinates; valid for mu strictly left of
// every contributing pole. Terms with zero weight are skipped so the value
// stays finite when mu sits on a weightless pole.
void psi_eval(const SecularTerms& t, double mu, double& psi, double& dpsi) {
  psi = 0.0;
  dpsi = 0.0;
  for (std::size_t i = 0; i < t.pole.size(); ++i) {
    if (t.weight[i] == 0.0) continue;
    double gap = t.pole[i] - mu;
    double g2 = gap * gap;
    psi += t.weight[i] / g2;
    dpsi += 2.0 * t.weight[i] / (g2 * gap);
  }
}

double psi_only(const SecularTerms& t, double mu) {
  double psi, dpsi;
  psi_eval(t, mu, psi, dpsi);
  return psi;
}

SphereSolution assemble_solution(const SphereProblem& p, double mu,
                                 bool boundary_expected) {
  const Eigen::Index m = p.m;
  const double md = static_cast<double>(m);
  Eigen::VectorXd a(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double den = p.lambda - mu * p.spectrum.sigma(i);
    a(i) = p.z(i) / (md * den);
  }

  SphereSolution sol;
  sol.alpha = p.spectrum.V * a;
  sol.mu = mu;

  double fit = 0, krein = 0, constraint = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double ka = p.spectrum.sigma(i) * a(i);
    fit += (ka - p.z(i)) * (ka - p.z(i));
    krein += p.spectrum.sigma(i) * a(i) * a(i);
    constraint += ka * ka;
  }
  fit /= md;
  sol.krein_reg = krein;
  sol.t_reg = constraint / md;
  double target = md * p.r * p.r;
  sol.constraint_residual = std::abs(constraint - target) / target;
  sol.on_boundary = boundary_expected && sol.constraint_residual <= 1e-6;
  sol.objective = fit + p.lambda * krein;

  double worst = 0.0, scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double s = p.spectrum.sigma(i);
    double curv = s * s / md + p.lambda * s;
    worst = std::min(worst, curv);
    scale = std::max(scale, std::abs(curv));
  }
  sol.convex_objective = worst >= -1e-12 * std::max(1.0, scale);
  return sol;
}

}  // namespace

SphereSolution solve_rkks_sphere(const SphereProblem& p) {
  const SecularTerms terms = collect_terms(p);
  const double target = p.secular_target();
  const double ztol = 1e-12 * std::max(1.0, p.y_norm);

  double wsum = 0.0;
  for (double w : terms.weight) wsum += w;
  if (wsum <= ztol * ztol)
    throw DegenerateDataError(
        "sphere solver: targets are orthogonal to the range of K, the "
        "secular function vanishes identically");

  const double pole_min = terms.pole_min;
  const double pole_tie = 1e-12 * std::max(1.0, std::abs(pole_min));

  // Weight carried by the leftmost pole (ties included) decides between the
  // generic case and the hard case.
  double w_pole = 0.0;
  double z_pole_max = 0.0;
  double d_star = pole_min;
  for (std::size_t i = 0; i < terms.pole.size(); ++i) {
    if (terms.pole[i] <= pole_min + pole_tie) {
      w_pole += terms.weight[i];
      if (terms.weight[i] > z_pole_max * z_pole_max) {
        z_pole_max = std::sqrt(terms.weight[i]);
        d_star = terms.pole[i];
      }
    }
  }

  if (z_pole_max <= ztol) {
    // No usable weight at the leftmost pole. If the remaining terms cannot
    // reach the target, no boundary multiplier exists left of the pole.
    SecularTerms rest;
    for (std::size_t i = 0; i < terms.pole.size(); ++i) {
      if (terms.pole[i] <= pole_min + pole_tie) continue;
      rest.pole.push_back(terms.pole[i]);
      rest.weight.push_back(terms.weight[i]);
    }
    double sup = rest.pole.empty() ? 0.0 : psi_only(rest, pole_min);
    if (sup < target)
      throw HardCaseError(
          "sphere solver hard case: secular function tops out at " +
              std::to_string(sup) + " < target " + std::to_string(target) +
              " at the leftmost pole",
          pole_min, sup, target);
  }

  // Bracket the root. Left end: start from the perturbation-theory guess
  // mu_t - mu_t^2 - safety and expand geometrically until psi < target; the
  // bound psi(mu) <= wsum / (pole_min - mu)^2 caps the expansion.
  const double mu_t = t_reg_multiplier(p.y_norm, p.m, p.r);
  double lo = std::min(mu_t - mu_t * mu_t - 1e-2, pole_min - 1e-2);
  double lo_cap = pole_min - std::sqrt(wsum / target) * (1.0 + 1e-6) - 1e-12;
  double step = std::max(1.0, pole_min - lo);
  while (psi_only(terms, lo) >= target) {
    step *= 2.0;
    lo = pole_min - step;
    if (lo < lo_cap) {
      lo = lo_cap;
      break;
    }
  }

  // Right end: place it where the dominant pole term alone exceeds the
  // target, falling back to a vanishing gap when that weight is tiny.
  double hi;
  if (z_pole_max > ztol) {
    hi = d_star - 0.5 * z_pole_max / std::sqrt(target);
  } else {
    hi = pole_min - 1e-14 * std::max(1.0, std::abs(pole_min));
  }
  hi = std::min(hi, pole_min - 1e-15 * std::max(1.0, std::abs(pole_min)));
  hi = std::max(hi, lo + 1e-300);
  while (psi_only(terms, hi) < target) {
    double gap = pole_min - hi;
    hi = pole_min - 0.25 * gap;
    if (!(pole_min - hi > 0)) break;
  }

  // Newton iteration on 1/sqrt(psi), which is nearly affine in mu near the
  // pole, safeguarded by the bracket. Once the step passes the convergence
  // test, a couple of unguarded polish steps push the root to full
  // precision; the coefficients are sensitive to mu through 1/(pole - mu),
  // so the extra digits matter.
  const double phi_target = 1.0 / std::sqrt(target);
  double mu = hi;
  bool converged = false;
  for (int it = 0; it < 200 && !converged; ++it) {
    double psi, dpsi;
    psi_eval(terms, mu, psi, dpsi);
    if (psi < target)
      lo = mu;
    else
      hi = mu;
    double phi = 1.0 / std::sqrt(psi);
    double dphi = -0.5 * dpsi / (psi * std::sqrt(psi));
    double next = mu - (phi - phi_target) / dphi;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    double delta = std::abs(next - mu);
    mu = next;
    converged = delta <= 1e-12 * std::max(1.0, std::abs(mu));
  }
  for (int polish = 0; polish < 2; ++polish) {
    double psi, dpsi;
    psi_eval(terms, mu, psi, dpsi);
    double phi = 1.0 / std::sqrt(psi);
    double dphi = -0.5 * dpsi / (psi * std::sqrt(psi));
    double next = mu - (phi - phi_target) / dphi;
    if (next < pole_min && std::isfinite(next)) mu = next;
  }

  return assemble_solution(p, mu, true);
}

SphereSolution solve_rkks_sphere(const Eigen::MatrixXd& K,
                                 const Eigen::VectorXd& y, double lambda,
                                 double r) {
  return solve_rkks_sphere(SphereProblem::build(sym_eig(K), y, lambda, r));
}

SphereSolution solve_t_reg_sphere(const SphereProblem& p) {
  if (p.y_norm == 0.0)
    throw DegenerateDataError("covariance-regularized solver: y is zero");

  const Eigen::Index m = p.m;
  const double md = static_cast<double>(m);
  const double mu_t = t_reg_multiplier(p.y_norm, m, p.r);

  // alpha = -(1/(m mu_t)) K^+ y, i.e. (sqrt(m) r / ||y||) K^+ y.
  Eigen::VectorXd a(m);
  double range_mass = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (p.spectrum.sigma(i) != 0.0) {
      a(i) = -p.z(i) / (md * mu_t * p.spectrum.sigma(i));
      range_mass += p.z(i) * p.z(i);
    } else {
      a(i) = 0.0;
    }
  }

  SphereSolution sol;
  sol.alpha = p.spectrum.V * a;
  sol.mu = mu_t;

  double fit = 0, krein = 0, constraint = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double ka = p.spectrum.sigma(i) * a(i);
    fit += (ka - p.z(i)) * (ka - p.z(i));
    krein += p.spectrum.sigma(i) * a(i) * a(i);
    constraint += ka * ka;
  }
  fit /= md;
  sol.krein_reg = krein;
  sol.t_reg = constraint / md;
  double target = md * p.r * p.r;
  sol.constraint_residual = std::abs(constraint - target) / target;
  sol.objective = fit + (p.lambda / md) * constraint;
  sol.on_boundary = sol.constraint_residual <= 1e-6;
  // The covariance-regularized objective is a convex quadratic in alpha.
  sol.convex_objective = true;

  double outside = p.y_norm * p.y_norm - range_mass;
  if (outside > 1e-12 * std::max(1.0, p.y_norm * p.y_norm)) {
    sol.on_boundary = false;
    sol.warning =
        "targets have a component outside range(K) (squared mass " +
        std::to_string(outside) +
        "); the sphere constraint is unattainable and the range-restricted "
        "optimum is returned";
  }
  return sol;
}

SphereSolution solve_t_reg_sphere(const Eigen::MatrixXd& K,
                                  const Eigen::VectorXd& y, double lambda,
                                  double r) {
  return solve_t_reg_sphere(SphereProblem::build(sym_eig(K), y, lambda, r));
}

Eigen::MatrixXd build_G(const GramSpectrum& s, const Eigen::VectorXd& y,
                        double lambda, double r) {
  const Eigen::Index m = s.size();
  if (y.size() != m) throw ArgumentError("build_G: size mismatch");
  const double md = static_cast<double>(m);
  Eigen::MatrixXd G(2 * m, 2 * m);
  Eigen::MatrixXd lk = lambda * pseudo_inverse(s);
  G.topLeftCorner(m, m) = lk;
  G.bottomRightCorner(m, m) = lk;
  G.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  G.bottomLeftCorner(m, m) = -(y * y.transpose()) / (md * md * md * r * r);
  return G;
}

namespace {

void check_predict_args(const Eigen::VectorXd& alpha, const KernelSpec& spec,
                        const Eigen::MatrixXd& X_train,
                        const Eigen::MatrixXd& X_new) {
  if (alpha.size() != X_train.rows())
    throw ArgumentError("predict: alpha length " +
                        std::to_string(alpha.size()) +
                        " does not match training rows " +
                        std::to_string(X_train.rows()));
  if (X_train.cols() != X_new.cols())
    throw ArgumentError("predict: feature dimensions differ (" +
                        std::to_string(X_train.cols()) + " vs " +
                        std::to_string(X_new.cols()) + ")");
  if (!X_new.allFinite()) throw ArgumentError("predict: non-finite points");
  spec.validate();
  if (spec.family == KernelFamily::SphericalPolynomial) {
    require_unit_rows(X_train);
    require_unit_rows(X_new);
  }
}

double predict_one(const Eigen::VectorXd& alpha, const KernelSpec& spec,
                   const Eigen::MatrixXd& X_train,
                   const Eigen::MatrixXd& X_new, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < X_train.rows(); ++i)
    acc += alpha(i) *
           detail::kernel_eval_unchecked(spec, X_train.row(i), X_new.row(j));
  return acc;
}

}  // namespace

Eigen::VectorXd predict(const Eigen::VectorXd& alpha, const KernelSpec& spec,
                        const Eigen::MatrixXd& X_train,
                        const Eigen::MatrixXd& X_new) {
  check_predict_args(alpha, spec, X_train, X_new);
  Eigen::VectorXd out(X_new.rows());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(par::max_threads())
#endif
  for (Eigen::Index j = 0; j < X_new.rows(); ++j)
    out(j) = predict_one(alpha, spec, X_train, X_new, j);
  return out;
}

namespace ref {
Eigen::VectorXd predict(const Eigen::VectorXd& alpha, const KernelSpec& spec,
                        const Eigen::MatrixXd& X_train,
                        const Eigen::MatrixXd& X_new) {
  check_predict_args(alpha, spec, X_train, X_new);
  Eigen::VectorXd out(X_new.rows());
  for (Eigen::Index j = 0; j < X_new.rows(); ++j)
    out(j) = predict_one(alpha, spec, X_train, X_new, j);
  return out;
}
}  // namespace ref

nlohmann::json SphereSolution::to_json() const {
  nlohmann::json j{
      {"alpha", std::vector<double>(alpha.data(), alpha.data() + alpha.size())},
      {"mu", mu},
      {"objective", objective},
      {"constraint_residual", constraint_residual},
      {"krein_reg", krein_reg},
      {"t_reg", t_reg},
      {"on_boundary", on_boundary},
      {"convex_flag", convex_objective}};
  if (warning) j["warning"] = *warning;
  return j;
}

}  // namespace krr
