#include <Eigen/Dense>

#include "doctest.h"
#include "krr/checks.hpp"
#include "krr/rng.hpp"
#include "krr/solver.hpp"

using namespace krr;

namespace {

SphereProblem make_problem(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                           double lambda, double r) {
  return SphereProblem::build(sym_eig(K), y, lambda, r);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("secular value on the identity") {
  Eigen::VectorXd y(4);
  y << 1, -2, 0.5, 1;
  double lambda = 0.3;
  SphereProblem p =
      make_problem(Eigen::MatrixXd::Identity(4, 4), y, lambda, 1.0);
  CHECK(secular_value(p, 0.0) ==
        doctest::Approx(y.squaredNorm() / (lambda * lambda)).epsilon(1e-12));
}

TEST_CASE("secular value vanishes for zero targets against nonzero modes") {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  SphereProblem p =
      make_problem(Eigen::MatrixXd::Identity(3, 3), y, 0.1, 1.0);
  CHECK(secular_value(p, -2.0) == 0.0);
}

TEST_CASE("secular value two-term hand computation") {
  // sigma = (1, -1), z = (1, 1), lambda = 0.1, mu = -1:
  // 1/(0.1+1)^2 + 1/(0.1-1)^2 = 0.826446... + 1.234567...
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  Eigen::VectorXd y(2);
  y << 1, 1;
  SphereProblem p = make_problem(K, y, 0.1, 1.0);
  CHECK(secular_value(p, -1.0) ==
        doctest::Approx(1.0 / 1.21 + 1.0 / 0.81).epsilon(1e-14));
  CHECK(secular_value(p, -1.0) == doctest::Approx(2.0610141822263034));
}

TEST_CASE("secular value rejects poles") {
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  Eigen::VectorXd y(2);
  y << 1, 1;
  SphereProblem p = make_problem(K, y, 0.1, 1.0);
  CHECK_THROWS_AS(secular_value(p, 0.1), ArgumentError);   // pole at 0.1
  CHECK_THROWS_AS(secular_value(p, -0.1), ArgumentError);  // pole at -0.1
}

TEST_CASE("identity matrix has the closed-form solution") {
  Rng rng(23);
  for (Eigen::Index m : {2, 5, 17}) {
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = rng.normal();
    double lambda = 0.05, r = 1.3;
    SphereSolution sol =
        solve_rkks_sphere(Eigen::MatrixXd::Identity(m, m), y, lambda, r);
    double md = static_cast<double>(m);
    double mu_expected = lambda - y.norm() / (std::pow(md, 1.5) * r);
    CHECK(sol.mu == doctest::Approx(mu_expected).epsilon(1e-12));
    Eigen::VectorXd alpha_expected = std::sqrt(md) * r * y / y.norm();
    CHECK((sol.alpha - alpha_expected).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(sol.on_boundary);
    // mu = lambda + mu_t exactly for the identity.
    CHECK(sol.mu - lambda ==
          doctest::Approx(t_reg_multiplier(y.norm(), m, r)).epsilon(1e-12));
  }
}

TEST_CASE("m=2 indefinite instance beats a one-million point grid") {
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  Eigen::VectorXd y(2);
  y << 1, 1;
  SphereSolution sol = solve_rkks_sphere(K, y, 0.1, 1.0);
  checks::GridMinimum oracle = checks::grid_min_rkks(K, y, 0.1, 1.0, 1000000);
  CHECK(sol.objective <= oracle.objective + 1e-3);
  CHECK(sol.constraint_residual <= 1e-6);
  double target = 2.0 * 1.0;  // m r^2
  CHECK(std::abs(sol.alpha.dot(K * K * sol.alpha) - target) <= 1e-6 * target);
}

TEST_CASE("m=3 random instances beat the spherical grid") {
  Rng rng(29);
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXd K = checks::random_indefinite(3, rng);
    Eigen::VectorXd y(3);
    for (int i = 0; i < 3; ++i) y(i) = rng.normal();
    SphereSolution sol = solve_rkks_sphere(K, y, 0.05, 1.0);
    checks::GridMinimum oracle = checks::grid_min_rkks(K, y, 0.05, 1.0,
                                                       1000000);
    CHECK(sol.objective <= oracle.objective + 1e-3);
    SphereProblem p = make_problem(K, y, 0.05, 1.0);
    double target = p.secular_target();
    CHECK(std::abs(secular_value(p, sol.mu) - target) <= 1e-6 * target);
  }
}

TEST_CASE("returned multiplier sits strictly left of every pole") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.integer(20));
    Eigen::MatrixXd K = checks::random_indefinite(m, rng);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = rng.normal();
    SphereProblem p = make_problem(K, y, 0.07, 1.0);
    SphereSolution sol = solve_rkks_sphere(p);
    double pole = leftmost_pole(p);
    CHECK(sol.mu < pole);
    // psi is increasing on a sample of the search interval.
    double prev = 0.0;
    for (int k = 0; k < 8; ++k) {
      double mu = pole - std::pow(2.0, 3 - k);
      double v = secular_value(p, mu);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(sol.on_boundary);
    CHECK(sol.t_reg == doctest::Approx(1.0).epsilon(1e-6));  // r^2
  }
}

TEST_CASE("degenerate data raises") {
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  CHECK_THROWS_AS(solve_rkks_sphere(K, Eigen::VectorXd::Zero(2), 0.1, 1.0),
                  DegenerateDataError);
  // All-zero matrix: no nonzero eigenvalues at all.
  Eigen::VectorXd y(2);
  y << 1, 1;
  CHECK_THROWS_AS(solve_rkks_sphere(Eigen::MatrixXd::Zero(2, 2), y, 0.1, 1.0),
                  DegenerateDataError);
}

TEST_CASE("hard case raises with the boundary certificate") {
  // Poles at 0.1 (from sigma=1) and -0.1 (from sigma=-1). y has no weight
  // on the leftmost pole. With r = 2 the target 8 r^2 = 32 exceeds the
  // supremum 1/(0.1 - (-0.1))^2 = 25, so no root exists left of -0.1.
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  Eigen::VectorXd y(2);
  y << 1, 0;
  CHECK_THROWS_AS(solve_rkks_sphere(K, y, 0.1, 2.0), HardCaseError);
  try {
    solve_rkks_sphere(K, y, 0.1, 2.0);
  } catch (const HardCaseError& e) {
    CHECK(e.boundary_mu() == doctest::Approx(-0.1));
    CHECK(e.sup_value() == doctest::Approx(25.0));
    CHECK(e.target() == doctest::Approx(32.0));
  }
  // Same geometry with r = 1: target 8 < 25, the root exists and the
  // solver proceeds.
  SphereSolution sol = solve_rkks_sphere(K, y, 0.1, 1.0);
  CHECK(sol.mu == doctest::Approx(0.1 - 1.0 / std::sqrt(8.0)).epsilon(1e-10));
  CHECK(sol.on_boundary);
}

TEST_CASE("covariance-regularized closed form, scalar case") {
  Eigen::MatrixXd K(1, 1);
  K << 2;
  Eigen::VectorXd y(1);
  y << 3;
  SphereSolution sol = solve_t_reg_sphere(K, y, 0.1, 1.0);
  CHECK(sol.mu == doctest::Approx(-3.0));
  CHECK(sol.alpha(0) == doctest::Approx(0.5));
  CHECK(sol.alpha.dot(K * K * sol.alpha) == doctest::Approx(1.0));
  CHECK(sol.on_boundary);
}

TEST_CASE("covariance-regularized closed form on the identity") {
  Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  SphereSolution sol =
      solve_t_reg_sphere(Eigen::MatrixXd::Identity(4, 4), y, 0.1, 1.0);
  CHECK(sol.mu == doctest::Approx(-0.25));
  CHECK((sol.alpha - y).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((Eigen::MatrixXd::Identity(4, 4) * sol.alpha).squaredNorm() ==
        doctest::Approx(4.0));
}

TEST_CASE("covariance-regularized solution matches the grid oracle") {
  Rng rng(37);
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXd K = checks::random_indefinite(2, rng);
    Eigen::VectorXd y(2);
    for (int i = 0; i < 2; ++i) y(i) = rng.normal();
    double lambda = 0.05, r = 1.0;
    SphereSolution sol = solve_t_reg_sphere(K, y, lambda, r);
    checks::GridMinimum oracle =
        checks::grid_min_t_reg(K, y, lambda, r, 1000000);
    CHECK(sol.objective <= oracle.objective + 1e-6);
    // K alpha is the rescaled projection of y: collinear with y here.
    Eigen::VectorXd ka = K * sol.alpha;
    CHECK(ka.dot(y) / (ka.norm() * y.norm()) >= 1.0 - 1e-10);
  }
}

TEST_CASE("covariance-regularized solver flags range-deficient targets") {
  // K has a null direction; y leans into it.
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, 0;
  Eigen::VectorXd y(2);
  y << 1, 1;
  SphereSolution sol = solve_t_reg_sphere(K, y, 0.1, 1.0);
  CHECK_FALSE(sol.on_boundary);
  CHECK(sol.warning.has_value());
  CHECK_THROWS_AS(
      solve_t_reg_sphere(K, Eigen::VectorXd::Zero(2), 0.1, 1.0),
      DegenerateDataError);
}

TEST_CASE("scaling the targets leaves the fitted direction unchanged") {
  Rng rng(41);
  Eigen::MatrixXd K = checks::random_indefinite(4, rng);
  Eigen::VectorXd y(4);
  for (int i = 0; i < 4; ++i) y(i) = rng.normal();
  SphereSolution a = solve_t_reg_sphere(K, y, 0.1, 1.0);
  SphereSolution b = solve_t_reg_sphere(K, 3.7 * y, 0.1, 1.0);
  Eigen::VectorXd ka = K * a.alpha, kb = K * b.alpha;
  CHECK((ka - kb).cwiseAbs().maxCoeff() <= 1e-10);  // both sqrt(m) r y/||y||
}

TEST_CASE("block matrix on a scalar instance") {
  GramSpectrum s = sym_eig(Eigen::MatrixXd::Identity(1, 1));
  Eigen::VectorXd y(1);
  y << 1;
  Eigen::MatrixXd G = build_G(s, y, 1.0, 1.0);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((G - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lambda-free block matrix squares to the rank-one mass") {
  // With lambda = 0 the square of the block matrix is block-diagonal with
  // y y^T / (m^3 r^2) in both blocks, so (y, 0) is an eigenvector of the
  // square with eigenvalue ||y||^2 / (m^3 r^2).
  Rng rng(43);
  Eigen::MatrixXd K = checks::random_indefinite(3, rng);
  Eigen::VectorXd y(3);
  for (int i = 0; i < 3; ++i) y(i) = rng.normal();
  double r = 1.2;
  GramSpectrum s = sym_eig(K);
  Eigen::MatrixXd Gt = build_G(s, y, 0.0, r);
  Eigen::MatrixXd G2 = Gt * Gt;
  double mass = y.squaredNorm() / (27.0 * r * r);
  Eigen::VectorXd v(6);
  v << y(0), y(1), y(2), 0, 0, 0;
  CHECK((G2 * v - mass * v).cwiseAbs().maxCoeff() <= 1e-12 * mass);
}

TEST_CASE("computed pair reconstructs an eigenvector of the block matrix") {
  Rng rng(47);
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXd K = checks::random_indefinite(3, rng);
    Eigen::VectorXd y(3);
    for (int i = 0; i < 3; ++i) y(i) = rng.normal();
    double lambda = 0.08, r = 1.0;
    SphereProblem p = make_problem(K, y, lambda, r);
    SphereSolution sol = solve_rkks_sphere(p);

    // Eigenvector assembly: u2 = K alpha / (sqrt(m) r) solves
    // (lambda K^+ - mu I) u1 = u2 with u1 = (lambda K^+ - mu I)^-1 u2.
    Eigen::MatrixXd G = build_G(p.spectrum, y, lambda, r);
    Eigen::VectorXd u2 = K * sol.alpha / (std::sqrt(3.0) * r);
    Eigen::MatrixXd A =
        lambda * pseudo_inverse(p.spectrum) -
        sol.mu * Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd u1 = A.partialPivLu().solve(u2);
    Eigen::VectorXd v(6);
    v << u1(0), u1(1), u1(2), u2(0), u2(1), u2(2);
    CHECK((G * v - sol.mu * v).norm() <= 1e-6 * v.norm());
  }
}

TEST_CASE("predictions") {
  Rng rng(53);
  Eigen::MatrixXd X(5, 2), Xn(3, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 2; ++j) X(i, j) = rng.uniform(-1, 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) Xn(i, j) = rng.uniform(-1, 1);
  KernelSpec spec = KernelSpec::log_kernel();

  SUBCASE("zero coefficients give zero predictions") {
    Eigen::VectorXd out = predict(Eigen::VectorXd::Zero(5), spec, X, Xn);
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("training-point predictions equal K alpha") {
    Eigen::VectorXd alpha(5);
    for (int i = 0; i < 5; ++i) alpha(i) = rng.normal();
    Eigen::VectorXd out = predict(alpha, spec, X, X);
    Eigen::VectorXd ka = gram(spec, X) * alpha;
    CHECK((out - ka).cwiseAbs().maxCoeff() <= 1e-10);
  }

  SUBCASE("single-point expansion") {
    Eigen::MatrixXd X1 = X.topRows(1);
    Eigen::VectorXd alpha(1);
    alpha << 2.0;
    Eigen::VectorXd out = predict(alpha, spec, X1, Xn);
    for (int i = 0; i < 3; ++i) {
      double d = (Xn.row(i) - X1.row(0)).norm();
      CHECK(out(i) == doctest::Approx(-2.0 * std::log1p(d)).epsilon(1e-14));
    }
  }

  SUBCASE("shape mismatch raises") {
    CHECK_THROWS_AS(predict(Eigen::VectorXd::Zero(4), spec, X, Xn),
                    ArgumentError);
    Eigen::MatrixXd bad(3, 3);
    bad.setZero();
    CHECK_THROWS_AS(predict(Eigen::VectorXd::Zero(5), spec, X, bad),
                    ArgumentError);
  }

  SUBCASE("parallel predict matches the serial reference bitwise") {
    Eigen::VectorXd alpha(5);
    for (int i = 0; i < 5; ++i) alpha(i) = rng.normal();
    Eigen::VectorXd a = predict(alpha, spec, X, Xn);
    Eigen::VectorXd b = ref::predict(alpha, spec, X, Xn);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("solution json carries the full schema") {
  Eigen::MatrixXd K(2, 2);
  K << 1, 0, 0, -1;
  Eigen::VectorXd y(2);
  y << 1, 1;
  auto j = solve_rkks_sphere(K, y, 0.1, 1.0).to_json();
  for (const char* key :
       {"alpha", "mu", "objective", "constraint_residual", "krein_reg",
        "t_reg", "on_boundary", "convex_flag"})
    CHECK(j.contains(key));
}

}  // TEST_SUITE
