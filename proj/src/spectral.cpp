#include "krr/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace krr {

namespace {

GramSpectrum decompose(const Eigen::MatrixXd& K, double zero_tol,
                       bool auto_tol) {
  const Eigen::Index m = K.rows();
  if (m != K.cols()) throw ArgumentError("sym_eig: matrix is not square");
  if (!K.allFinite())
    throw ArgumentError("sym_eig: matrix contains non-finite values");
  double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw ArgumentError("sym_eig: matrix asymmetry " + std::to_string(asym) +
                        " exceeds 1e-10");

  Eigen::MatrixXd S = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw NumericError(
        "sym_eig: eigendecomposition did not converge within the iteration "
        "cap (off-diagonal residual not reduced below tolerance)");

  // Eigen returns ascending order; flip to descending.
  GramSpectrum s;
  s.sigma.resize(m);
  s.V.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    s.sigma(i) = es.eigenvalues()(m - 1 - i);
    s.V.col(i) = es.eigenvectors().col(m - 1 - i);
  }

  double max_abs = s.sigma.size() > 0 ? s.sigma.cwiseAbs().maxCoeff() : 0.0;
  s.zero_tol = auto_tol ? static_cast<double>(m) *
                              std::numeric_limits<double>::epsilon() * max_abs
                        : zero_tol;

  for (Eigen::Index i = 0; i < m; ++i)
    if (std::abs(s.sigma(i)) <= s.zero_tol) s.sigma(i) = 0.0;

  s.p = (s.sigma.array() > 0.0).count();
  s.q = (s.sigma.array() < 0.0).count();
  return s;
}

}  // namespace

GramSpectrum sym_eig(const Eigen::MatrixXd& K) {
  return decompose(K, 0.0, true);
}

GramSpectrum sym_eig(const Eigen::MatrixXd& K, double zero_tol) {
  if (!(zero_tol >= 0)) throw ArgumentError("sym_eig: zero_tol must be >= 0");
  return decompose(K, zero_tol, false);
}

Eigen::MatrixXd pseudo_inverse(const GramSpectrum& s) {
  Eigen::VectorXd inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    inv(i) = s.sigma(i) != 0.0 ? 1.0 / s.sigma(i) : 0.0;
  return s.V * inv.asDiagonal() * s.V.transpose();
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> positive_split(
    const GramSpectrum& s) {
  Eigen::VectorXd pos = s.sigma.cwiseMax(0.0);
  Eigen::VectorXd neg = (-s.sigma).cwiseMax(0.0);
  return {s.V * pos.asDiagonal() * s.V.transpose(),
          s.V * neg.asDiagonal() * s.V.transpose()};
}

void check_spectrum(const Eigen::MatrixXd& K, const GramSpectrum& s) {
  const Eigen::Index m = s.size();
  if (K.rows() != m || K.cols() != m)
    throw ArgumentError("check_spectrum: size mismatch");
  double orth = (s.V.transpose() * s.V - Eigen::MatrixXd::Identity(m, m))
                    .cwiseAbs()
                    .maxCoeff();
  if (orth > 1e-10)
    throw NumericError("spectrum check: eigenvector orthogonality residual " +
                       std::to_string(orth));
  double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  double rec = (s.V * s.sigma.asDiagonal() * s.V.transpose() - K)
                   .cwiseAbs()
                   .maxCoeff();
  if (rec > 1e-8 * scale)
    throw NumericError("spectrum check: reconstruction residual " +
                       std::to_string(rec) + " exceeds 1e-8 * " +
                       std::to_string(scale));
  for (Eigen::Index i = 0; i + 1 < m; ++i)
    if (s.sigma(i) < s.sigma(i + 1))
      throw NumericError("spectrum check: eigenvalues not descending");
  if (s.p + s.q > m) throw NumericError("spectrum check: p + q > m");
  if ((s.sigma.array() > 0.0).count() != s.p ||
      (s.sigma.array() < 0.0).count() != s.q)
    throw NumericError("spectrum check: sign counts inconsistent");
}

namespace {

struct LineFit {
  double slope, intercept, r2;
};

LineFit least_squares_line(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw ArgumentError("degenerate abscissae in line fit");
  double slope = sxy / sxx;
  double r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2};
}

}  // namespace

EigenDecayFit fit_eigen_decay(const std::vector<DecayPoint>& series) {
  if (series.size() < 3)
    throw ArgumentError("fit_eigen_decay: need at least 3 sizes, got " +
                        std::to_string(series.size()));
  std::vector<double> lm, lpos, lneg;
  EigenDecayFit fit;
  for (const auto& pt : series) {
    if (!(pt.m > 0)) throw ArgumentError("fit_eigen_decay: sizes must be > 0");
    if (!(pt.sigma1 > 0))
      throw ArgumentError("fit_eigen_decay: sigma1 must be positive at m = " +
                          std::to_string(pt.m));
    if (!(pt.sigma_m < 0))
      throw ArgumentError("fit_eigen_decay: sigma_m must be negative at m = " +
                          std::to_string(pt.m));
    lm.push_back(std::log(pt.m));
    lpos.push_back(std::log(pt.sigma1));
    lneg.push_back(std::log(-pt.sigma_m));
    if (std::isfinite(pt.sigma_p) && pt.sigma_p > 0)
      fit.C1 = std::max(fit.C1, pt.sigma1 / pt.sigma_p);
    if (std::isfinite(pt.sigma_mq1) && pt.sigma_mq1 < 0)
      fit.C2 = std::max(fit.C2, pt.sigma_m / pt.sigma_mq1);
  }
  LineFit pos = least_squares_line(lm, lpos);
  LineFit neg = least_squares_line(lm, lneg);
  fit.eta1 = pos.slope;
  fit.eta2 = neg.slope;
  fit.c1 = std::exp(pos.intercept);
  fit.cm = -std::exp(neg.intercept);
  fit.r2_pos = pos.r2;
  fit.r2_neg = neg.r2;
  return fit;
}

}  // namespace krr
