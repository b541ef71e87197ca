#include "krr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "krr/datasets_io.hpp"
#include "krr/parallel.hpp"
#include "krr/theory.hpp"

namespace krr {

namespace {

// Stream tags keep the independent random streams of one experiment apart.
constexpr std::uint64_t kTagAnchors = 0xA11C;
constexpr std::uint64_t kTagData = 0xDA7A;
constexpr std::uint64_t kTagMc = 0x11C4;
constexpr std::uint64_t kTagCv = 0xCF01;
constexpr std::uint64_t kTagSubsample = 0x5AB5;

}  // namespace

InputLaw input_law_from_name(const std::string& name) {
  if (name == "uniform-cube" || name == "cube") return InputLaw::UniformCube;
  if (name == "uniform-sphere" || name == "sphere")
    return InputLaw::UniformSphere;
  throw ArgumentError("unknown input law: " + name);
}

std::string input_law_name(InputLaw law) {
  return law == InputLaw::UniformCube ? "uniform-cube" : "uniform-sphere";
}

Regularizer regularizer_from_name(const std::string& name) {
  if (name == "rkks" || name == "indefinite") return Regularizer::Indefinite;
  if (name == "t" || name == "covariance") return Regularizer::Covariance;
  throw ArgumentError("unknown regularizer: " + name);
}

std::string regularizer_name(Regularizer reg) {
  return reg == Regularizer::Indefinite ? "rkks" : "t";
}

Eigen::VectorXd draw_point(InputLaw law, Eigen::Index dim, Rng& rng) {
  Eigen::VectorXd x(dim);
  if (law == InputLaw::UniformCube) {
    for (Eigen::Index k = 0; k < dim; ++k) x(k) = rng.uniform(-1.0, 1.0);
  } else {
    double norm2 = 0.0;
    do {
      for (Eigen::Index k = 0; k < dim; ++k) x(k) = rng.normal();
      norm2 = x.squaredNorm();
    } while (norm2 == 0.0);
    x /= std::sqrt(norm2);
  }
  return x;
}

SyntheticTarget SyntheticTarget::default_expansion(const KernelSpec& kernel,
                                                   Eigen::Index dim,
                                                   InputLaw law,
                                                   std::uint64_t seed,
                                                   double M_star,
                                                   double noise_sigma) {
  if (dim < 1) throw ArgumentError("synthetic target: dim must be >= 1");
  if (!(M_star >= 1.0))
    throw ArgumentError("synthetic target: M_star must be >= 1");
  if (!(noise_sigma >= 0))
    throw ArgumentError("synthetic target: noise_sigma must be >= 0");

  SyntheticTarget t;
  t.kernel = kernel;
  t.noise_sigma = noise_sigma;
  t.input_law = law;
  t.M_star = M_star;

  const Eigen::Index n_anchors = 10;
  Rng rng = Rng::stream(seed, kTagAnchors);
  t.anchors.resize(n_anchors, dim);
  for (Eigen::Index j = 0; j < n_anchors; ++j)
    t.anchors.row(j) = draw_point(law, dim, rng).transpose();
  t.coeffs.resize(n_anchors);
  for (Eigen::Index j = 0; j < n_anchors; ++j)
    t.coeffs(j) = rng.uniform(-1.0, 1.0);

  // Rescale so the sampled supremum sits safely inside [-M_star, M_star].
  // A second fresh sample verifies the bound; when it finds a larger value
  // the scale tightens once more before the final check.
  const int n_scale = 24576;
  double sup = 0.0;
  for (int i = 0; i < n_scale; ++i)
    sup = std::max(sup, std::abs(t.eval(draw_point(law, dim, rng).transpose())));
  for (Eigen::Index j = 0; j < n_anchors; ++j)
    sup = std::max(sup, std::abs(t.eval(t.anchors.row(j))));
  if (sup == 0.0)
    throw DegenerateDataError("synthetic target: expansion is identically 0");
  t.coeffs *= 0.9 * M_star / sup;

  const int n_check = 20000;
  for (int attempt = 0; attempt < 2; ++attempt) {
    double worst = 0.0;
    for (int i = 0; i < n_check; ++i)
      worst = std::max(
          worst, std::abs(t.eval(draw_point(law, dim, rng).transpose())));
    if (worst <= M_star) return t;
    t.coeffs *= 0.9 * M_star / worst;
  }
  throw NumericError(
      "synthetic target: sampled |f| still exceeds M_star after rescaling");
}

SyntheticTarget SyntheticTarget::default_for_dim(Eigen::Index dim,
                                                 InputLaw law,
                                                 double noise_sigma) {
  if (dim < 1) throw ArgumentError("synthetic target: dim must be >= 1");
  SyntheticTarget t;
  double width = 0.425 * std::sqrt(static_cast<double>(dim));
  t.kernel = KernelSpec::gaussian(width);
  t.noise_sigma = noise_sigma;
  t.input_law = law;
  t.M_star = 1.0;

  const Eigen::Index n_anchors = 10;
  t.anchors = Eigen::MatrixXd::Zero(n_anchors, dim);
  t.coeffs.resize(n_anchors);
  Eigen::Index k = 0;
  // Axis pairs +-0.7 e_j on the first axes, then diagonal pairs at
  // shrinking scales until ten anchors are placed.
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(dim, 4) && k + 1 < 10;
       j += 1) {
    t.anchors(k, j) = 0.7;
    t.coeffs(k++) = 1.0;
    t.anchors(k, j) = -0.7;
    t.coeffs(k++) = -1.0;
  }
  // Ten anchors total and pairs of two: k is even here.
  double diag_scale = 0.45;
  while (k < n_anchors) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      t.anchors(k, j) = diag_scale;
      t.anchors(k + 1, j) = -diag_scale;
    }
    t.coeffs(k) = 1.0;
    t.coeffs(k + 1) = -1.0;
    k += 2;
    diag_scale *= 0.55;
  }
  if (law == InputLaw::UniformSphere) {
    for (Eigen::Index i = 0; i < n_anchors; ++i) {
      double n = t.anchors.row(i).norm();
      if (n > 0) t.anchors.row(i) /= n;
    }
  }

  // Deterministic sup estimate on a dense sample, then the usual margin.
  Rng rng(0xF1D0);
  double sup = 0.0;
  for (int i = 0; i < 30000; ++i)
    sup = std::max(sup,
                   std::abs(t.eval(draw_point(law, dim, rng).transpose())));
  if (sup == 0.0)
    throw DegenerateDataError("synthetic target: expansion is identically 0");
  t.coeffs *= 0.9 * t.M_star / sup;
  return t;
}

Dataset generate(const SyntheticTarget& target, Eigen::Index m,
                 std::uint64_t seed) {
  if (m < 1) throw ArgumentError("generate: m must be >= 1");
  Rng rng = Rng::stream(seed, kTagData, static_cast<std::uint64_t>(m));
  Dataset d;
  d.name = "synthetic-" + target.kernel.name();
  d.X.resize(m, target.dim());
  for (Eigen::Index i = 0; i < m; ++i)
    d.X.row(i) = draw_point(target.input_law, target.dim(), rng).transpose();
  d.y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double noise = target.noise_sigma > 0 ? target.noise_sigma * rng.normal()
                                          : 0.0;
    d.y(i) = target.eval(d.X.row(i)) + noise;
  }
  return d;
}

RiskEstimate excess_risk(const Eigen::VectorXd& alpha, const Dataset& train,
                         const KernelSpec& spec, const SyntheticTarget& target,
                         Eigen::Index n_mc, std::uint64_t seed) {
  if (n_mc < 1000)
    throw ArgumentError("excess_risk: n_mc must be at least 1000");
  Rng rng = Rng::stream(seed, kTagMc);
  Eigen::MatrixXd X_mc(n_mc, target.dim());
  for (Eigen::Index i = 0; i < n_mc; ++i)
    X_mc.row(i) = draw_point(target.input_law, target.dim(), rng).transpose();

  Eigen::VectorXd preds = predict(alpha, spec, train.X, X_mc);

  double sum = 0.0, sumsq = 0.0;
  for (Eigen::Index i = 0; i < n_mc; ++i) {
    double clipped = std::clamp(preds(i), -target.M_star, target.M_star);
    double e = clipped - target.eval(X_mc.row(i));
    double se = e * e;
    sum += se;
    sumsq += se * se;
  }
  double n = static_cast<double>(n_mc);
  RiskEstimate est;
  est.value = sum / n;
  double var = std::max(0.0, sumsq / n - est.value * est.value);
  est.std_error = std::sqrt(var / n);
  return est;
}

RateFit fit_loglog(const std::vector<double>& ms,
                   const std::vector<double>& risks) {
  if (ms.size() != risks.size() || ms.size() < 2)
    throw ArgumentError("fit_loglog: need at least two matching points");
  double mx = 0, my = 0;
  const double n = static_cast<double>(ms.size());
  std::vector<double> lx(ms.size()), ly(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (!(ms[i] > 0) || !(risks[i] > 0))
      throw ArgumentError("fit_loglog: sizes and risks must be positive");
    lx[i] = std::log(ms[i]);
    ly[i] = std::log(risks[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw ArgumentError("fit_loglog: degenerate size grid");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.m_grid = ms;
  fit.mean_risks = risks;
  return fit;
}

nlohmann::json RateFit::to_json() const {
  return nlohmann::json{{"slope", slope},       {"intercept", intercept},
                        {"r2", r2},             {"m_grid", m_grid},
                        {"mean_risks", mean_risks}, {"std_risks", std_risks}};
}

RateResult rate_experiment(const KernelSpec& kernel,
                           const SyntheticTarget& target,
                           const RateConfig& config) {
  const auto& grid = config.m_grid;
  if (grid.size() < 4)
    throw ArgumentError("rate_experiment: m grid needs at least 4 sizes");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw ArgumentError("rate_experiment: m grid must be strictly increasing");
  if (config.trials < 10)
    throw ArgumentError("rate_experiment: need at least 10 trials");
  if (!(config.gamma > 0) || !(config.gamma <= 1))
    throw ArgumentError("rate_experiment: gamma must lie in (0, 1]");

  RateResult result;

  // Radius rule: calibrate once, then hold the radius constant so the slope
  // is not confounded by per-size tuning. Calibration runs near the top of
  // the size grid (capped for cost): at the small end every radius sits on
  // its noise floor.
  double r_used;
  if (config.fixed_r) {
    r_used = *config.fixed_r;
    if (!(r_used > 0))
      throw ArgumentError("rate_experiment: fixed r must be positive");
  } else {
    Eigen::Index m_cal = std::min<Eigen::Index>(grid.back(), 400);
    Dataset calib =
        generate(target, m_cal, Rng::stream(config.seed, kTagCv).raw());
    if (config.radius_rule == RadiusRule::Moment) {
      // Match the constraint scale to the signal scale: the solution's
      // empirical second moment is forced to r^2, and the signal's is
      // mean(y^2) minus the noise variance.
      double second = calib.y.squaredNorm() / static_cast<double>(m_cal);
      double noise2 = target.noise_sigma * target.noise_sigma;
      r_used = std::sqrt(std::max(second - noise2, 1e-4));
    } else {
      double lambda0 = std::pow(static_cast<double>(m_cal), -config.gamma);
      CvResult cv = cv_select(kernel, calib, {lambda0}, config.cv_r_grid,
                              config.cv_folds, config.seed, config.reg,
                              config.spectrum_cutoff);
      r_used = cv.r;
    }
  }
  result.r_used = r_used;

  struct Slot {
    bool ok = false;
    bool attempted = false;
    double risk = 0;
    std::string reason;
  };
  const int trials = config.trials;
  const Eigen::Index n_tasks =
      static_cast<Eigen::Index>(grid.size()) * trials;
  std::vector<Slot> slots(static_cast<std::size_t>(n_tasks));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(par::max_threads())
#endif
  for (Eigen::Index task = 0; task < n_tasks; ++task) {
    const std::size_t gi = static_cast<std::size_t>(task) / trials;
    const int trial = static_cast<int>(task % trials);
    const Eigen::Index m = grid[gi];
    Slot& slot = slots[static_cast<std::size_t>(task)];
    slot.attempted = true;
    try {
      std::uint64_t ds_seed =
          Rng::stream(config.seed, static_cast<std::uint64_t>(m),
                      static_cast<std::uint64_t>(trial))
              .raw();
      Dataset ds = generate(target, m, ds_seed);
      double lambda = std::pow(static_cast<double>(m), -config.gamma);
      Eigen::MatrixXd K = gram(kernel, ds.X);
      GramSpectrum spectrum =
          config.spectrum_cutoff > 0
              ? sym_eig(K, config.spectrum_cutoff * K.cwiseAbs().maxCoeff())
              : sym_eig(K);
      SphereProblem problem =
          SphereProblem::build(std::move(spectrum), ds.y, lambda, r_used);
      SphereSolution sol = config.reg == Regularizer::Indefinite
                               ? solve_rkks_sphere(problem)
                               : solve_t_reg_sphere(problem);
      std::uint64_t mc_seed =
          Rng::stream(config.seed, static_cast<std::uint64_t>(m),
                      static_cast<std::uint64_t>(trial), kTagMc)
              .raw();
      RiskEstimate est =
          excess_risk(sol.alpha, ds, kernel, target, config.n_mc, mc_seed);
      slot.risk = est.value;
      slot.ok = true;
    } catch (const Error& e) {
      slot.reason = "m=" + std::to_string(m) +
                    " trial=" + std::to_string(trial) + ": " + e.what();
    }
  }

  // Merge in (m ascending, trial ascending) order.
  std::vector<double> ms, means;
  result.fit.std_risks.clear();
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const Eigen::Index m = grid[gi];
    double lambda = std::pow(static_cast<double>(m), -config.gamma);
    double sum = 0, sumsq = 0;
    int ok_count = 0;
    for (int t = 0; t < trials; ++t) {
      const Slot& slot = slots[gi * trials + static_cast<std::size_t>(t)];
      if (!slot.ok) {
        result.skipped.push_back(slot.reason);
        continue;
      }
      ExperimentRecord rec;
      rec.m = m;
      rec.trial = t;
      rec.excess_risk = slot.risk;
      rec.lambda = lambda;
      rec.r = r_used;
      rec.kernel = kernel.name();
      result.records.push_back(std::move(rec));
      sum += slot.risk;
      sumsq += slot.risk * slot.risk;
      ++ok_count;
    }
    if (ok_count == 0)
      throw ExperimentError("rate_experiment: every trial failed at m = " +
                            std::to_string(m));
    double mean = sum / ok_count;
    double var = std::max(0.0, sumsq / ok_count - mean * mean);
    ms.push_back(static_cast<double>(m));
    means.push_back(mean);
    result.fit.std_risks.push_back(std::sqrt(var));
  }

  if (result.skipped.size() * 5 > static_cast<std::size_t>(n_tasks))
    throw ExperimentError(
        "rate_experiment: more than 20% of trials failed (" +
        std::to_string(result.skipped.size()) + " of " +
        std::to_string(n_tasks) + ")");

  std::vector<double> std_risks = result.fit.std_risks;
  result.fit = fit_loglog(ms, means);
  result.fit.std_risks = std::move(std_risks);
  return result;
}

namespace {

SpectrumResult spectrum_sweep(
    const KernelSpec& kernel, const std::vector<Eigen::Index>& m_grid,
    const std::function<Eigen::MatrixXd(Eigen::Index, std::uint64_t)>& sample) {
  if (m_grid.empty()) throw ArgumentError("spectrum_experiment: empty m grid");
  SpectrumResult result;
  bool fit_possible = m_grid.size() >= 3;
  std::vector<DecayPoint> series;
  for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
    const Eigen::Index m = m_grid[gi];
    Eigen::MatrixXd X = sample(m, static_cast<std::uint64_t>(gi));
    GramSpectrum s = sym_eig(gram(kernel, X));

    SpectrumRow row;
    row.m = m;
    row.p = s.p;
    row.q = s.q;
    row.sigma1 = s.sigma(0);
    row.sigma_m = s.sigma(m - 1);
    row.sigma_p = s.p > 0 ? s.sigma(s.p - 1) : 0.0;
    row.sigma_mq1 = s.q > 0 ? s.sigma(m - s.q) : 0.0;
    result.rows.push_back(row);
    result.spectra.push_back(s.sigma);
    result.zero_tols.push_back(s.zero_tol);

    if (row.sigma1 > 0 && row.sigma_m < 0) {
      DecayPoint pt;
      pt.m = static_cast<double>(m);
      pt.sigma1 = row.sigma1;
      pt.sigma_m = row.sigma_m;
      pt.sigma_p = row.sigma_p;
      pt.sigma_mq1 = row.sigma_mq1;
      series.push_back(pt);
    } else {
      fit_possible = false;
    }
  }
  if (fit_possible && series.size() >= 3)
    result.fit = fit_eigen_decay(series);
  return result;
}

}  // namespace

SpectrumResult spectrum_experiment(const KernelSpec& kernel,
                                   const Dataset& data,
                                   const std::vector<Eigen::Index>& m_grid,
                                   std::uint64_t seed) {
  data.validate();
  for (Eigen::Index m : m_grid)
    if (m > data.size())
      throw ArgumentError("spectrum_experiment: requested subsample " +
                          std::to_string(m) + " exceeds dataset size " +
                          std::to_string(data.size()));
  auto sample = [&](Eigen::Index m, std::uint64_t gi) {
    // Seeded subsample without replacement; chosen rows keep file order.
    Rng rng = Rng::stream(seed, kTagSubsample, static_cast<std::uint64_t>(m),
                          gi);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.size()));
    std::iota(idx.begin(), idx.end(), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index j = i + static_cast<Eigen::Index>(rng.integer(
                               static_cast<std::uint64_t>(data.size() - i)));
      std::swap(idx[static_cast<std::size_t>(i)],
                idx[static_cast<std::size_t>(j)]);
    }
    std::sort(idx.begin(), idx.begin() + m);
    Eigen::MatrixXd X(m, data.dim());
    for (Eigen::Index i = 0; i < m; ++i)
      X.row(i) = data.X.row(idx[static_cast<std::size_t>(i)]);
    return X;
  };
  return spectrum_sweep(kernel, m_grid, sample);
}

SpectrumResult spectrum_experiment(const KernelSpec& kernel,
                                   const SyntheticTarget& target,
                                   const std::vector<Eigen::Index>& m_grid,
                                   std::uint64_t seed) {
  auto sample = [&](Eigen::Index m, std::uint64_t gi) {
    Rng rng = Rng::stream(seed, kTagSubsample, static_cast<std::uint64_t>(m),
                          gi);
    Eigen::MatrixXd X(m, target.dim());
    for (Eigen::Index i = 0; i < m; ++i)
      X.row(i) = draw_point(target.input_law, target.dim(), rng).transpose();
    return X;
  };
  return spectrum_sweep(kernel, m_grid, sample);
}

CvResult cv_select(const KernelSpec& kernel, const Dataset& data,
                   std::vector<double> lambda_grid, std::vector<double> r_grid,
                   int folds, std::uint64_t seed, Regularizer reg,
                   double spectrum_cutoff) {
  data.validate();
  if (folds < 2) throw ArgumentError("cv_select: folds must be >= 2");
  if (lambda_grid.empty() || r_grid.empty())
    throw ArgumentError("cv_select: grids must be nonempty");
  if (data.size() < folds)
    throw ArgumentError("cv_select: fewer rows than folds");
  std::sort(lambda_grid.begin(), lambda_grid.end());
  std::sort(r_grid.begin(), r_grid.end());

  const Eigen::Index n = data.size();
  Rng rng = Rng::stream(seed, kTagCv);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    Eigen::Index j = i + static_cast<Eigen::Index>(
                             rng.integer(static_cast<std::uint64_t>(n - i)));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  const double B = std::max(1.0, data.y.cwiseAbs().maxCoeff());

  CvResult result;
  bool have_best = false;
  double best_risk = 0;
  for (double lambda : lambda_grid) {
    for (double r : r_grid) {
      CvCell cell;
      cell.lambda = lambda;
      cell.r = r;
      double sq_sum = 0;
      Eigen::Index count = 0;
      try {
        for (int k = 0; k < folds; ++k) {
          std::vector<Eigen::Index> tr, va;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<int>(i % folds) == k)
              va.push_back(order[static_cast<std::size_t>(i)]);
            else
              tr.push_back(order[static_cast<std::size_t>(i)]);
          }
          Eigen::MatrixXd Xtr(static_cast<Eigen::Index>(tr.size()), data.dim());
          Eigen::VectorXd ytr(static_cast<Eigen::Index>(tr.size()));
          for (std::size_t i = 0; i < tr.size(); ++i) {
            Xtr.row(static_cast<Eigen::Index>(i)) = data.X.row(tr[i]);
            ytr(static_cast<Eigen::Index>(i)) = data.y(tr[i]);
          }
          Eigen::MatrixXd Xva(static_cast<Eigen::Index>(va.size()), data.dim());
          Eigen::VectorXd yva(static_cast<Eigen::Index>(va.size()));
          for (std::size_t i = 0; i < va.size(); ++i) {
            Xva.row(static_cast<Eigen::Index>(i)) = data.X.row(va[i]);
            yva(static_cast<Eigen::Index>(i)) = data.y(va[i]);
          }
          Eigen::MatrixXd Ktr = gram(kernel, Xtr);
          GramSpectrum str =
              spectrum_cutoff > 0
                  ? sym_eig(Ktr, spectrum_cutoff * Ktr.cwiseAbs().maxCoeff())
                  : sym_eig(Ktr);
          SphereProblem prob =
              SphereProblem::build(std::move(str), ytr, lambda, r);
          SphereSolution sol = reg == Regularizer::Indefinite
                                   ? solve_rkks_sphere(prob)
                                   : solve_t_reg_sphere(prob);
          Eigen::VectorXd pred = predict(sol.alpha, kernel, Xtr, Xva);
          pred = pred.cwiseMax(-B).cwiseMin(B);
          sq_sum += (pred - yva).squaredNorm();
          count += static_cast<Eigen::Index>(va.size());
        }
        cell.risk = sq_sum / static_cast<double>(count);
      } catch (const Error& e) {
        cell.failed = true;
        cell.reason = e.what();
      }
      if (!cell.failed && (!have_best || cell.risk < best_risk)) {
        have_best = true;
        best_risk = cell.risk;
        result.lambda = lambda;
        result.r = r;
      }
      result.table.push_back(std::move(cell));
    }
  }
  if (!have_best)
    throw ExperimentError("cv_select: every grid cell failed");
  return result;
}

std::string records_csv_header() {
  return "m,trial,excess_risk,lambda,r,kernel";
}

std::string record_csv_row(const ExperimentRecord& rec) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%lld,%d,%s,%s,%s,%s",
                static_cast<long long>(rec.m), rec.trial,
                format_double(rec.excess_risk).c_str(),
                format_double(rec.lambda).c_str(),
                format_double(rec.r).c_str(), rec.kernel.c_str());
  return buf;
}

}  // namespace krr
