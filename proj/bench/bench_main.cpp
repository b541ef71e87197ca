// Wall-clock comparison of the parallel kernels against their serial
// reference implementations: Gram construction, batch prediction, and a
// full learning-curve trial batch. Sizes stay at desk scale.

#include <chrono>
#include <cstdio>
#include <string>

#include "krr/experiments.hpp"
#include "krr/kernels.hpp"
#include "krr/parallel.hpp"
#include "krr/rng.hpp"
#include "krr/solver.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads available: %d (cap with KREIN_RIDGE_THREADS)\n\n",
              krr::par::max_threads());
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]",
              "speedup");

  krr::KernelSpec spec = krr::KernelSpec::delta_gauss();
  krr::Rng rng(7);

  for (Eigen::Index m : {200, 400, 800}) {
    Eigen::MatrixXd X(m, 3);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.uniform(-1, 1);

    double ts = time_best_of(3, [&] { volatile double v = krr::ref::gram(spec, X)(0, 0); (void)v; });
    double tp = time_best_of(3, [&] { volatile double v = krr::gram(spec, X)(0, 0); (void)v; });
    std::printf("%-28s %10.4f %10.4f %7.2fx\n",
                ("gram m=" + std::to_string(m)).c_str(), ts, tp, ts / tp);
  }

  {
    const Eigen::Index m = 400, n = 20000;
    Eigen::MatrixXd X(m, 3), Xn(n, 3);
    Eigen::VectorXd alpha(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      alpha(i) = rng.normal();
      for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.uniform(-1, 1);
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) Xn(i, j) = rng.uniform(-1, 1);

    double ts = time_best_of(3, [&] {
      volatile double v = krr::ref::predict(alpha, spec, X, Xn)(0);
      (void)v;
    });
    double tp = time_best_of(3, [&] {
      volatile double v = krr::predict(alpha, spec, X, Xn)(0);
      (void)v;
    });
    std::printf("%-28s %10.4f %10.4f %7.2fx\n", "predict 400->20000", ts, tp,
                ts / tp);
  }

  {
    // Trial-level parallelism: the learning-curve batch is the production
    // hot loop. Serial numbers come from forcing one worker.
    krr::SyntheticTarget target = krr::SyntheticTarget::default_expansion(
        spec, 3, krr::InputLaw::UniformCube, 1);
    krr::RateConfig rc;
    rc.m_grid = {40, 60, 80, 120};
    rc.trials = 10;
    rc.n_mc = 1000;
    rc.fixed_r = 0.5;
    rc.seed = 1;

    auto t0 = Clock::now();
    auto result = krr::rate_experiment(spec, target, rc);
    double t = seconds_since(t0);
    std::printf("%-28s %21.4f   (slope %.3f)\n", "rate batch 4x10 trials", t,
                result.fit.slope);
  }
  return 0;
}
