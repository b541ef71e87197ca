#pragma once

#include <Eigen/Core>
#include <limits>
#include <utility>
#include <vector>

#include "krr/errors.hpp"

namespace krr {

/// Eigendecomposition of a symmetric kernel matrix with the sign-ordered
/// spectrum used throughout: sigma is sorted descending, entries within
/// zero_tol of zero are stored as exact 0, p counts positives and q counts
/// negatives. Columns of V follow the same order. Immutable after
/// construction; safe to share across threads.
struct GramSpectrum {
  Eigen::MatrixXd V;
  Eigen::VectorXd sigma;
  Eigen::Index p = 0;
  Eigen::Index q = 0;
  double zero_tol = 0.0;

  Eigen::Index size() const { return sigma.size(); }
  Eigen::Index zeros() const { return size() - p - q; }
  bool full_rank() const { return zeros() == 0; }
};

/// Symmetric eigendecomposition. The input must be symmetric to within
/// 1e-10 entrywise; it is exactly symmetrized before factorization.
/// Deterministic: identical input bytes produce identical output bytes.
/// zero_tol defaults to m * eps * max|sigma| (standard rank tolerance).
GramSpectrum sym_eig(const Eigen::MatrixXd& K);
GramSpectrum sym_eig(const Eigen::MatrixXd& K, double zero_tol);

/// Moore-Penrose pseudo-inverse K^+ = V diag(1/sigma_i or 0) V^T.
Eigen::MatrixXd pseudo_inverse(const GramSpectrum& s);

/// Positive decomposition K = K_plus - K_minus with both parts PSD.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> positive_split(
    const GramSpectrum& s);

/// Verifies the spectrum postconditions (orthogonality, reconstruction,
/// ordering, counts) against the original matrix. O(m^3); used by tests and
/// the verification command, not by hot paths.
void check_spectrum(const Eigen::MatrixXd& K, const GramSpectrum& s);

/// One extreme-eigenvalue observation at sample size m. sigma_p (smallest
/// positive) and sigma_mq1 (negative closest to zero) are optional; when
/// present they feed the condition numbers C1, C2.
struct DecayPoint {
  double m = 0;
  double sigma1 = 0;
  double sigma_m = 0;
  double sigma_p = std::numeric_limits<double>::quiet_NaN();
  double sigma_mq1 = std::numeric_limits<double>::quiet_NaN();
};

/// Power-law fit of the extreme eigenvalues against sample size:
/// sigma1 ~= c1 * m^eta1 (c1 > 0) and sigma_m ~= cm * m^eta2 (cm < 0),
/// obtained by least squares in log-log coordinates.
struct EigenDecayFit {
  double eta1 = 0;
  double eta2 = 0;
  double c1 = 0;
  double cm = 0;
  double C1 = 1.0;  // worst sigma1 / sigma_p across the series
  double C2 = 1.0;  // worst sigma_m / sigma_{m-q+1} across the series
  double r2_pos = 0;
  double r2_neg = 0;

  double eta() const { return eta1 < eta2 ? eta1 : eta2; }
};

/// Requires at least 3 points, all sigma1 > 0 and all sigma_m < 0.
EigenDecayFit fit_eigen_decay(const std::vector<DecayPoint>& series);

}  // namespace krr
