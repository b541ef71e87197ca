// The parallel kernels must produce the same bytes as the serial reference
// implementations for any worker count; these tests pin that contract.

#include <Eigen/Dense>
#include <cstdlib>
#include <cstring>

#include "doctest.h"
#include "krr/experiments.hpp"
#include "krr/kernels.hpp"
#include "krr/parallel.hpp"
#include "krr/rng.hpp"
#include "krr/solver.hpp"

using namespace krr;

namespace {

struct ThreadCapGuard {
  std::string saved;
  bool had = false;
  ThreadCapGuard() {
    if (const char* v = std::getenv("KREIN_RIDGE_THREADS")) {
      saved = v;
      had = true;
    }
  }
  ~ThreadCapGuard() {
    if (had)
      setenv("KREIN_RIDGE_THREADS", saved.c_str(), 1);
    else
      unsetenv("KREIN_RIDGE_THREADS");
  }
};

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("thread cap respects the environment variable") {
  ThreadCapGuard guard;
  setenv("KREIN_RIDGE_THREADS", "1", 1);
  CHECK(par::max_threads() == 1);
  unsetenv("KREIN_RIDGE_THREADS");
  CHECK(par::max_threads() >= 1);
}

TEST_CASE("gram bytes are identical across worker counts") {
  ThreadCapGuard guard;
  Rng rng(61);
  Eigen::MatrixXd X(64, 4);
  for (Eigen::Index i = 0; i < 64; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) X(i, j) = rng.uniform(-1, 1);
  KernelSpec spec = KernelSpec::delta_gauss();

  Eigen::MatrixXd serial = ref::gram(spec, X);
  for (const char* cap : {"1", "2", "5"}) {
    setenv("KREIN_RIDGE_THREADS", cap, 1);
    Eigen::MatrixXd parallel = gram(spec, X);
    CHECK(std::memcmp(serial.data(), parallel.data(),
                      sizeof(double) * serial.size()) == 0);
  }
}

TEST_CASE("batch prediction bytes are identical across worker counts") {
  ThreadCapGuard guard;
  Rng rng(67);
  Eigen::MatrixXd X(40, 3), Xn(257, 3);
  Eigen::VectorXd alpha(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    alpha(i) = rng.normal();
    for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.uniform(-1, 1);
  }
  for (Eigen::Index i = 0; i < 257; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) Xn(i, j) = rng.uniform(-1, 1);
  KernelSpec spec = KernelSpec::tl1(2.1);

  Eigen::VectorXd serial = ref::predict(alpha, spec, X, Xn);
  for (const char* cap : {"1", "3", "8"}) {
    setenv("KREIN_RIDGE_THREADS", cap, 1);
    Eigen::VectorXd parallel = predict(alpha, spec, X, Xn);
    CHECK(std::memcmp(serial.data(), parallel.data(),
                      sizeof(double) * serial.size()) == 0);
  }
}

TEST_CASE("rate experiment output does not depend on the worker count") {
  ThreadCapGuard guard;
  KernelSpec spec = KernelSpec::delta_gauss();
  SyntheticTarget t = SyntheticTarget::default_expansion(
      spec, 3, InputLaw::UniformCube, 8, 1.0, 0.1);
  RateConfig rc;
  rc.m_grid = {20, 30, 45, 70};
  rc.trials = 10;
  rc.n_mc = 1000;
  rc.seed = 4;
  rc.fixed_r = 0.5;

  setenv("KREIN_RIDGE_THREADS", "1", 1);
  RateResult one = rate_experiment(spec, t, rc);
  setenv("KREIN_RIDGE_THREADS", "4", 1);
  RateResult four = rate_experiment(spec, t, rc);

  REQUIRE(one.records.size() == four.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i)
    CHECK(one.records[i].excess_risk == four.records[i].excess_risk);
  CHECK(one.fit.slope == four.fit.slope);
}

}  // TEST_SUITE
