#include <Eigen/Dense>

#include "doctest.h"
#include "krr/checks.hpp"
#include "krr/rng.hpp"
#include "krr/theory.hpp"

using namespace krr;

TEST_SUITE("theory") {

TEST_CASE("projection clips, is idempotent, and 1-Lipschitz") {
  Eigen::VectorXd v(2);
  v << 0.5, -0.2;
  CHECK((project(v, 1.0) - v).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd w(2);
  w << 3.0, -7.0;
  Eigen::VectorXd pw = project(w, 2.0);
  CHECK(pw(0) == 2.0);
  CHECK(pw(1) == -2.0);
  CHECK((project(pw, 2.0) - pw).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd a(4), b(4);
    for (int i = 0; i < 4; ++i) {
      a(i) = rng.uniform(-5, 5);
      b(i) = rng.uniform(-5, 5);
    }
    Eigen::VectorXd pa = project(a, 1.5), pb = project(b, 1.5);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(pa(i) - pb(i)) <= std::abs(a(i) - b(i)) + 1e-15);
  }

  CHECK_THROWS_AS(project(v, 0.0), ArgumentError);
  CHECK_THROWS_AS(project(v, -1.0), ArgumentError);
}

TEST_CASE("inner products on an indefinite diagonal") {
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  Eigen::VectorXd alpha(2);
  alpha << 0, 1;
  CHECK(krein_inner(alpha, K) == doctest::Approx(-1.0));
  CHECK(t_inner(alpha, K) == doctest::Approx(0.5));
  CHECK(krein_inner(Eigen::VectorXd::Zero(2), K) == 0.0);
  CHECK(t_inner(Eigen::VectorXd::Zero(2), K) == 0.0);
}

TEST_CASE("t_inner is nonnegative for arbitrary coefficients") {
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.integer(6));
    Eigen::MatrixXd K = checks::random_indefinite(m, rng);
    Eigen::VectorXd alpha(m);
    for (Eigen::Index i = 0; i < m; ++i) alpha(i) = rng.normal();
    CHECK(t_inner(alpha, K) >= 0.0);
  }
}

TEST_CASE("hypothesis error on the identity is zero") {
  Rng rng(7);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) y(i) = rng.normal();
  HypothesisErrorReport rep =
      hypothesis_error(Eigen::MatrixXd::Identity(6, 6), y, 0.1, 1.0);
  CHECK(std::abs(rep.P) <= 1e-8);
  CHECK(std::abs(rep.direct_diff) <= 1e-8);
  CHECK(std::abs(rep.P1 + rep.P2) <= 1e-8);
}

TEST_CASE("closed forms equal the direct objective difference") {
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  Eigen::VectorXd y(2);
  y << 1, 1;
  HypothesisErrorReport rep = hypothesis_error(K, y, 0.1, 1.0);
  CHECK(rep.P >= -1e-8);
  CHECK(std::abs(rep.P - rep.direct_diff) <=
        1e-8 * std::max(1.0, std::abs(rep.direct_diff)));

  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    Eigen::Index m = 5 + static_cast<Eigen::Index>(rng.integer(26));
    Eigen::MatrixXd Kr = checks::random_indefinite(m, rng);
    Eigen::VectorXd yr(m);
    for (Eigen::Index i = 0; i < m; ++i) yr(i) = rng.normal();
    HypothesisErrorReport r2 = hypothesis_error(Kr, yr, 0.05, 1.0);
    CHECK(r2.P >= -1e-8);
    CHECK(std::abs(r2.P - r2.direct_diff) <=
          1e-8 * std::max(1.0, std::abs(r2.direct_diff)));
  }
}

TEST_CASE("perturbation certificate saturates on the identity") {
  Rng rng(13);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) y(i) = rng.normal();
  double lambda = 0.1, r = 1.0;
  double md = 5.0;
  GramSpectrum s = sym_eig(Eigen::MatrixXd::Identity(5, 5));
  double mu = lambda - y.norm() / (std::pow(md, 1.5) * r);
  HenriciCertificate cert = henrici_certificate(s, y, lambda, r, mu);
  double varsigma = y.squaredNorm() / (md * md * md * r * r);
  CHECK(cert.gap == doctest::Approx(std::sqrt(varsigma)).epsilon(1e-12));
  CHECK(cert.bound == doctest::Approx(varsigma + std::sqrt(varsigma)));
  CHECK(cert.passes());
}

TEST_CASE("certificate passes on random instances and fails when shifted") {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    Eigen::Index m = 5 + static_cast<Eigen::Index>(rng.integer(46));
    Eigen::MatrixXd K = checks::random_indefinite(m, rng);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = rng.normal();
    double lambda = rng.uniform(0.02, 0.2);
    SphereProblem p = SphereProblem::build(sym_eig(K), y, lambda, 1.0);
    SphereSolution sol = solve_rkks_sphere(p);
    HenriciCertificate good =
        henrici_certificate(p.spectrum, y, lambda, 1.0, sol.mu);
    CHECK(good.passes());
    // Shifting left of every pole by 10x the bound must break it.
    HenriciCertificate bad = henrici_certificate(
        p.spectrum, y, lambda, 1.0, sol.mu - 10.0 * good.bound);
    CHECK_FALSE(bad.passes());
  }
}

TEST_CASE("rate exponent limits") {
  RateParams p;
  p.gamma = 1.0;
  p.beta = 1.0;
  p.s = 1e-6;
  p.eta = 1.0;
  p.epsilon = 1e-6;
  CHECK(theta_rate(p) == doctest::Approx(1.0).epsilon(1e-3));

  p.eta = 0.5;
  CHECK(theta_rate(p) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("above eta = 1 the exponent no longer depends on eta") {
  Rng rng(19);
  for (int t = 0; t < 50; ++t) {
    RateParams p;
    p.gamma = rng.uniform(0.2, 1.0);
    p.beta = rng.uniform(0.2, 1.0);
    p.s = rng.uniform(1e-4, 0.3);
    double window = p.epsilon_window();
    if (!(window > 0)) continue;
    p.epsilon = 0.5 * window;
    p.eta = 1.0;
    double base = theta_rate(p);
    p.eta = 3.0;
    CHECK(theta_rate(p) == base);
    CHECK(base == theta_rkhs(p));
  }
}

TEST_CASE("five-term minimum at eta >= 1 equals the three-term form") {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    RateParams p;
    p.gamma = rng.uniform(0.1, 1.0);
    p.beta = rng.uniform(0.1, 1.0);
    p.s = rng.uniform(1e-4, 0.5);
    double window = p.epsilon_window();
    if (!(window > 0)) continue;
    p.epsilon = rng.uniform(0.0, 1.0) * window;
    if (!(p.epsilon > 0)) continue;
    for (double eta : {1.0, 1.5, 4.0}) {
      p.eta = eta;
      auto terms = theta_rate_terms(p);
      double five = *std::min_element(terms.begin(), terms.end());
      CHECK(five == doctest::Approx(theta_rkhs(p)).epsilon(1e-15));
    }
  }
}

TEST_CASE("monotone in beta and eta on the admissible region") {
  RateParams p;
  p.gamma = 0.8;
  p.s = 0.2;
  p.epsilon = 0.5 * (1.0 / p.s - (p.gamma + p.s * p.gamma - 1.0) * (2 + p.s));

  double prev = -1;
  for (double beta = 0.1; beta <= 1.0; beta += 0.1) {
    p.beta = beta;
    p.eta = 0.7;
    double v = theta_rate(p);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  prev = -1;
  p.beta = 0.9;
  for (double eta = 0.05; eta < 1.0; eta += 0.05) {
    p.eta = eta;
    double v = theta_rate(p);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("inadmissible parameters are rejected with the inequality named") {
  RateParams p;
  p.gamma = 1.0;
  p.beta = 1.0;
  p.s = 0.1;
  p.eta = 0.9;
  p.epsilon = 1e9;  // far outside the window
  CHECK_THROWS_WITH_AS(theta_rate(p),
                       doctest::Contains("0 < epsilon < 1/s"), ArgumentError);

  p.epsilon = 0.1;
  p.s = 4.0;   // eta floor = 1 - 2/4 = 0.5
  p.gamma = 0.2;  // keeps the epsilon window open at s = 4
  p.eta = 0.4;
  CHECK_THROWS_WITH_AS(theta_rate(p), doctest::Contains("max{0, 1 - 2/s}"),
                       ArgumentError);

  p.s = 4.0;
  p.gamma = 1.0;
  p.eta = 0.9;
  // Window is negative here: 1/4 - (1 + 4 - 1) * 6 < 0.
  CHECK_THROWS_WITH_AS(theta_rate(p), doctest::Contains("empty"),
                       ArgumentError);

  RateParams bad;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(theta_rate(bad), ArgumentError);
}

TEST_CASE("bound envelope constants") {
  EigenDecayFit fit;
  fit.eta1 = 0.9;
  fit.eta2 = 0.8;
  fit.c1 = 2.0;
  fit.cm = -1.0;
  fit.C1 = 5.0;
  fit.C2 = 4.0;
  HypothesisBound b = hypothesis_bound(1.0, 1.0, fit, 1.0);
  CHECK(b.C1_tilde ==
        doctest::Approx(2.0 + 2.0 * (0.25 + 1.0 + 2.5)).epsilon(1e-12));
  CHECK(b.Theta1 == doctest::Approx(0.8));
  CHECK(b.rhs(100.0) ==
        doctest::Approx(b.C1_tilde * std::pow(100.0, -0.8)).epsilon(1e-12));
}

TEST_CASE("report row carries all columns") {
  std::string header = HypothesisErrorReport::csv_header();
  CHECK(header ==
        "m,lambda,r,P,P1,P2,mu,mu_tilde,henrici_bound,henrici_gap,bound_rhs");
  HypothesisErrorReport rep;
  std::string row = rep.csv_row();
  CHECK(std::count(row.begin(), row.end(), ',') == 10);
}

}  // TEST_SUITE
