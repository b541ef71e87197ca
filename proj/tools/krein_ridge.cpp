// Command-line front end: spectrum sweeps, single fits, learning-rate
// experiments, and the verification suite.
//
// Exit codes: 0 success, 1 verification check failed, 2 usage/argument
// error, 3 numeric or solver error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "krr/checks.hpp"
#include "krr/datasets_io.hpp"
#include "krr/experiments.hpp"
#include "krr/kernels.hpp"
#include "krr/solver.hpp"
#include "krr/svg.hpp"
#include "krr/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct KernelFlags {
  std::string family = "delta-gauss";
  int p = 10;
  double tau_prime = -1;  // <0: use 0.7 * d once the dimension is known
  double tau1 = 1.0;
  double tau2 = 0.1;
  double sigma = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel", family,
                    "kernel family: spherical-polynomial|tl1|delta-gauss|log|"
                    "gaussian|identity-test")
        ->capture_default_str();
    cmd->add_option("--p", p, "spherical polynomial degree");
    cmd->add_option("--tau-prime", tau_prime,
                    "TL1 threshold (default 0.7 * dimension)");
    cmd->add_option("--tau1", tau1, "Delta-Gauss wide width");
    cmd->add_option("--tau2", tau2, "Delta-Gauss narrow width");
    cmd->add_option("--sigma", sigma, "Gaussian width");
  }

  krr::KernelSpec build(Eigen::Index dim) const {
    krr::KernelSpec spec = krr::KernelSpec::from_name(family);
    spec.degree = p;
    // The TL1 default threshold scales with the post-preprocessing
    // dimension of the data actually fed to the kernel.
    spec.tau_prime = tau_prime > 0 ? tau_prime : 0.7 * static_cast<double>(dim);
    spec.tau1 = tau1;
    spec.tau2 = tau2;
    spec.sigma = sigma;
    spec.validate();
    return spec;
  }

  json to_json(Eigen::Index dim) const { return build(dim).to_json(); }
};

struct DataFlags {
  std::string path;
  std::string format = "csv";
  std::optional<Eigen::Index> label_column;
  std::optional<Eigen::Index> dimension;
  std::string normalize = "none";
  bool normalize_sphere = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", path, "dataset file");
    cmd->add_option("--format", format, "csv|svmlight")->capture_default_str();
    cmd->add_option("--label-column", label_column,
                    "0-based label column (csv; default: last)");
    cmd->add_option("--dimension", dimension, "declared dimension (svmlight)");
    cmd->add_option("--normalize", normalize, "none|unit-sphere|z-score")
        ->capture_default_str();
    cmd->add_flag("--normalize-sphere", normalize_sphere,
                  "rescale rows to the unit sphere (required before the "
                  "spherical polynomial kernel)");
  }

  krr::Dataset load_dataset() const {
    krr::DatasetSource src;
    src.path = path;
    if (format == "csv")
      src.format = krr::DataFormat::Csv;
    else if (format == "svmlight")
      src.format = krr::DataFormat::SvmLight;
    else
      throw krr::ArgumentError("unknown data format: " + format);
    src.label_column = label_column;
    src.dimension = dimension;
    src.normalize = normalize_sphere ? krr::Normalize::UnitSphere
                                     : krr::normalize_from_name(normalize);
    if (!fs::exists(path))
      throw krr::ArgumentError("dataset file does not exist: " + path);
    return krr::load(src);
  }

  json to_json() const {
    return json{{"path", path},
                {"format", format},
                {"label_column", label_column ? json(*label_column) : json()},
                {"dimension", dimension ? json(*dimension) : json()},
                {"normalize", normalize_sphere ? "unit-sphere" : normalize}};
  }
};

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void write_config_echo(const fs::path& dir, const json& config) {
  krr::write_json((dir / "config-echo.json").string(), config);
}

// The config file, when given, takes precedence over command-line flags.
void apply_config_overrides(const std::string& config_path, json& config) {
  if (config_path.empty()) return;
  if (!fs::exists(config_path))
    throw krr::ArgumentError("config file does not exist: " + config_path);
  json file = krr::read_json(config_path);
  for (auto& [key, value] : file.items()) config[key] = value;
}

std::vector<Eigen::Index> parse_m_list(const std::string& text) {
  std::vector<Eigen::Index> out;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    out.push_back(static_cast<Eigen::Index>(std::stoll(cur)));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',')
      flush();
    else if (c >= '0' && c <= '9')
      cur.push_back(c);
    else
      throw krr::ArgumentError("bad size list: " + text);
  }
  flush();
  if (out.empty()) throw krr::ArgumentError("empty size list");
  return out;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumOptions {
  KernelFlags kernel;
  DataFlags data;
  bool synthetic = false;
  Eigen::Index dim = 3;
  std::string law = "uniform-cube";
  std::string m_list = "50,100,200";
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string config_path;
  bool plot = false;
};

int run_spectrum(const SpectrumOptions& raw) {
  SpectrumOptions opt = raw;
  json config{{"command", "spectrum"},
              {"m", opt.m_list},
              {"seed", opt.seed},
              {"out", opt.out},
              {"synthetic", opt.synthetic},
              {"dim", opt.dim},
              {"law", opt.law},
              {"plot", opt.plot},
              {"data", opt.data.to_json()}};
  apply_config_overrides(opt.config_path, config);
  opt.m_list = config["m"].get<std::string>();
  opt.seed = config["seed"].get<std::uint64_t>();
  opt.out = config["out"].get<std::string>();
  opt.synthetic = config["synthetic"].get<bool>();
  opt.dim = config["dim"].get<Eigen::Index>();
  opt.law = config["law"].get<std::string>();
  opt.plot = config["plot"].get<bool>();

  auto m_grid = parse_m_list(opt.m_list);
  krr::SpectrumResult result;
  Eigen::Index dim = opt.dim;
  if (opt.synthetic) {
    krr::KernelSpec spec = opt.kernel.build(dim);
    krr::SyntheticTarget target = krr::SyntheticTarget::default_for_dim(
        dim, krr::input_law_from_name(opt.law));
    config["kernel"] = spec.to_json();
    result = krr::spectrum_experiment(spec, target, m_grid, opt.seed);
  } else {
    if (opt.data.path.empty())
      throw krr::ArgumentError("spectrum: provide --data or --synthetic");
    krr::Dataset ds = opt.data.load_dataset();
    dim = ds.dim();
    krr::KernelSpec spec = opt.kernel.build(dim);
    config["kernel"] = spec.to_json();
    result = krr::spectrum_experiment(spec, ds, m_grid, opt.seed);
  }

  fs::path dir = prepare_out_dir(opt.out);
  write_config_echo(dir, config);

  std::vector<std::string> rows;
  for (const auto& row : result.rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%lld,%s,%s,%lld,%lld",
                  static_cast<long long>(row.m),
                  krr::format_double(row.sigma1).c_str(),
                  krr::format_double(row.sigma_m).c_str(),
                  static_cast<long long>(row.p), static_cast<long long>(row.q));
    rows.push_back(buf);
  }
  krr::write_csv_rows((dir / "spectrum.csv").string(),
                      "m,sigma1,sigma_m,p,q", rows);

  // Full per-size spectra with a sidecar describing the sign counts.
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    std::vector<std::vector<double>> ev;
    for (Eigen::Index k = 0; k < result.spectra[i].size(); ++k)
      ev.push_back({static_cast<double>(k + 1), result.spectra[i](k)});
    std::string stem = "spectrum_m" + std::to_string(row.m);
    krr::write_csv((dir / (stem + ".csv")).string(), "index,sigma", ev);
    krr::write_json((dir / (stem + ".json")).string(),
                    json{{"p", row.p},
                         {"q", row.q},
                         {"zero_tol", result.zero_tols[i]}});
  }

  if (result.fit) {
    const auto& f = *result.fit;
    krr::write_json((dir / "decay-fit.json").string(),
                    json{{"eta1", f.eta1},
                         {"eta2", f.eta2},
                         {"c1", f.c1},
                         {"cm", f.cm},
                         {"C1", f.C1},
                         {"C2", f.C2},
                         {"r2_pos", f.r2_pos},
                         {"r2_neg", f.r2_neg},
                         {"eta", f.eta()}});
  }

  if (opt.plot) {
    krr::svg::Series pos{"sigma1", {}, {}, "#1f77b4", false};
    krr::svg::Series neg{"-sigma_m", {}, {}, "#d62728", false};
    for (const auto& row : result.rows) {
      pos.x.push_back(static_cast<double>(row.m));
      pos.y.push_back(row.sigma1);
      neg.x.push_back(static_cast<double>(row.m));
      neg.y.push_back(-row.sigma_m);
    }
    krr::svg::ChartOptions co;
    co.title = "extreme eigenvalues vs sample size";
    co.x_label = "m";
    co.y_label = "|sigma|";
    co.log_x = true;
    co.log_y = true;
    krr::svg::write_line_chart((dir / "spectrum.svg").string(), {pos, neg},
                               co);
  }

  std::cout << "wrote " << (dir / "spectrum.csv").string() << " ("
            << result.rows.size() << " sizes)\n";
  for (const auto& row : result.rows)
    std::cout << "  m=" << row.m << "  sigma1=" << row.sigma1
              << "  sigma_m=" << row.sigma_m << "  p=" << row.p
              << "  q=" << row.q << "\n";
  return 0;
}

// -------------------------------------------------------------------- fit

struct FitOptions {
  KernelFlags kernel;
  DataFlags data;
  std::string reg = "rkks";
  double lambda = 0.1;
  double r = 1.0;
  std::string predict_path;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string config_path;
};

int run_fit(const FitOptions& raw) {
  FitOptions opt = raw;
  json config{{"command", "fit"}, {"reg", opt.reg},   {"lambda", opt.lambda},
              {"r", opt.r},       {"seed", opt.seed}, {"out", opt.out},
              {"data", opt.data.to_json()}};
  apply_config_overrides(opt.config_path, config);
  opt.reg = config["reg"].get<std::string>();
  opt.lambda = config["lambda"].get<double>();
  opt.r = config["r"].get<double>();
  opt.out = config["out"].get<std::string>();

  if (opt.data.path.empty())
    throw krr::ArgumentError("fit: --data is required");
  krr::Dataset ds = opt.data.load_dataset();
  krr::KernelSpec spec = opt.kernel.build(ds.dim());
  config["kernel"] = spec.to_json();

  krr::SphereSolution sol;
  if (opt.reg == "rkks")
    sol = krr::solve_rkks_sphere(krr::gram(spec, ds.X), ds.y, opt.lambda,
                                 opt.r);
  else if (opt.reg == "t")
    sol = krr::solve_t_reg_sphere(krr::gram(spec, ds.X), ds.y, opt.lambda,
                                  opt.r);
  else
    throw krr::ArgumentError("fit: --reg must be rkks or t");

  fs::path dir = prepare_out_dir(opt.out);
  write_config_echo(dir, config);
  krr::write_json((dir / "solution.json").string(), sol.to_json());

  Eigen::MatrixXd X_new = ds.X;
  if (!opt.predict_path.empty()) {
    krr::DatasetSource src;
    src.path = opt.predict_path;
    src.label_column = opt.data.label_column;
    X_new = krr::load(src).X;
  }
  Eigen::VectorXd preds = krr::predict(sol.alpha, spec, ds.X, X_new);
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < preds.size(); ++i)
    rows.push_back({static_cast<double>(i), preds(i)});
  krr::write_csv((dir / "predictions.csv").string(), "index,prediction",
                 rows);

  std::cout << "mu=" << krr::format_double(sol.mu)
            << " objective=" << krr::format_double(sol.objective)
            << " constraint_residual="
            << krr::format_double(sol.constraint_residual)
            << " on_boundary=" << (sol.on_boundary ? "true" : "false") << "\n";
  if (sol.warning) std::cout << "warning: " << *sol.warning << "\n";
  std::cout << "wrote " << (dir / "solution.json").string() << "\n";
  return 0;
}

// ------------------------------------------------------------------- rate

struct RateOptions {
  KernelFlags kernel;
  Eigen::Index dim = 4;
  std::string law = "uniform-cube";
  std::string m_list = "50,100,200,400,800";
  std::string reg = "t";
  std::string r_rule = "moment";
  double gamma = 1.0;
  int trials = 100;
  double r = -1;  // <0: cross-validate on the smallest size
  Eigen::Index n_mc = 2000;
  double noise = 0.1;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string theory;
  bool planted_selftest = false;
  bool plot = false;
  std::string config_path;
};

int run_rate(const RateOptions& raw) {
  RateOptions opt = raw;
  json config{{"command", "rate"},     {"m_grid", opt.m_list},
              {"gamma", opt.gamma},    {"trials", opt.trials},
              {"r", opt.r},            {"n_mc", opt.n_mc},
              {"noise", opt.noise},    {"seed", opt.seed},
              {"out", opt.out},        {"dim", opt.dim},
              {"law", opt.law},        {"theory", opt.theory},
              {"reg", opt.reg},      {"r_rule", opt.r_rule},
              {"planted_selftest", opt.planted_selftest},
              {"plot", opt.plot}};
  apply_config_overrides(opt.config_path, config);
  opt.reg = config["reg"].get<std::string>();
  opt.r_rule = config["r_rule"].get<std::string>();
  opt.m_list = config["m_grid"].get<std::string>();
  opt.gamma = config["gamma"].get<double>();
  opt.trials = config["trials"].get<int>();
  opt.r = config["r"].get<double>();
  opt.n_mc = config["n_mc"].get<Eigen::Index>();
  opt.noise = config["noise"].get<double>();
  opt.seed = config["seed"].get<std::uint64_t>();
  opt.out = config["out"].get<std::string>();
  opt.dim = config["dim"].get<Eigen::Index>();
  opt.law = config["law"].get<std::string>();
  opt.theory = config["theory"].get<std::string>();
  opt.planted_selftest = config["planted_selftest"].get<bool>();
  opt.plot = config["plot"].get<bool>();

  fs::path dir = prepare_out_dir(opt.out);

  auto m_grid = parse_m_list(opt.m_list);

  if (opt.planted_selftest) {
    // Fit-path self test: a planted m^-1/2 decay must come back exactly.
    std::vector<double> ms, risks;
    for (Eigen::Index m : m_grid) {
      ms.push_back(static_cast<double>(m));
      risks.push_back(1.0 / std::sqrt(static_cast<double>(m)));
    }
    krr::RateFit fit = krr::fit_loglog(ms, risks);
    write_config_echo(dir, config);
    json out_json = fit.to_json();
    out_json["planted"] = true;
    krr::write_json((dir / "ratefit.json").string(), out_json);
    std::cout << "planted slope=" << krr::format_double(fit.slope)
              << " (expected -0.5)\n";
    return 0;
  }

  // Validate the theory overlay before the long run so a bad epsilon window
  // fails fast as a usage error.
  std::optional<double> theta;
  if (!opt.theory.empty()) {
    std::vector<double> v;
    std::string cur;
    for (char c : opt.theory + ",") {
      if (c == ',') {
        if (!cur.empty()) v.push_back(std::stod(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (v.size() != 5)
      throw krr::ArgumentError(
          "rate: --theory expects gamma,beta,s,eta,epsilon");
    krr::RateParams p;
    p.gamma = v[0];
    p.beta = v[1];
    p.s = v[2];
    p.eta = v[3];
    p.epsilon = v[4];
    theta = krr::theta_rate(p);
  }

  krr::KernelSpec spec = opt.kernel.build(opt.dim);
  config["kernel"] = spec.to_json();
  krr::SyntheticTarget target = krr::SyntheticTarget::default_for_dim(
      opt.dim, krr::input_law_from_name(opt.law), opt.noise);

  krr::RateConfig rc;
  rc.m_grid = m_grid;
  rc.gamma = opt.gamma;
  rc.trials = opt.trials;
  rc.seed = opt.seed;
  rc.n_mc = opt.n_mc;
  rc.reg = krr::regularizer_from_name(opt.reg);
  if (opt.r_rule == "moment")
    rc.radius_rule = krr::RadiusRule::Moment;
  else if (opt.r_rule == "cv")
    rc.radius_rule = krr::RadiusRule::Cv;
  else
    throw krr::ArgumentError("rate: --r-rule must be moment or cv");
  if (opt.r > 0) rc.fixed_r = opt.r;
  krr::RateResult result = krr::rate_experiment(spec, target, rc);
  config["r_used"] = result.r_used;
  write_config_echo(dir, config);

  std::vector<std::string> rows;
  for (const auto& rec : result.records)
    rows.push_back(krr::record_csv_row(rec));
  krr::write_csv_rows((dir / "records.csv").string(),
                      krr::records_csv_header(), rows);

  json fit_json = result.fit.to_json();
  fit_json["kernel"] = spec.name();
  fit_json["r_used"] = result.r_used;
  fit_json["skipped"] = result.skipped.size();
  if (theta) {
    fit_json["theory_theta"] = *theta;
    fit_json["theory_slope"] = -*theta;
  }
  krr::write_json((dir / "ratefit.json").string(), fit_json);

  if (opt.plot) {
    krr::svg::Series observed{"observed risk", result.fit.m_grid,
                              result.fit.mean_risks, "#1f77b4", false};
    std::vector<krr::svg::Series> series{observed};
    if (theta) {
      // Anchor the theoretical slope at the first observed point.
      krr::svg::Series line{"theory slope", {}, {}, "#d62728", true};
      double x0 = result.fit.m_grid.front();
      double y0 = result.fit.mean_risks.front();
      for (double x : result.fit.m_grid) {
        line.x.push_back(x);
        line.y.push_back(y0 * std::pow(x / x0, -*theta));
      }
      series.push_back(line);
    }
    krr::svg::ChartOptions co;
    co.title = "excess risk vs sample size (" + spec.name() + ")";
    co.x_label = "m";
    co.y_label = "excess risk";
    co.log_x = true;
    co.log_y = true;
    krr::svg::write_line_chart((dir / "rate.svg").string(), series, co);
  }

  std::cout << "slope=" << krr::format_double(result.fit.slope)
            << " r2=" << krr::format_double(result.fit.r2)
            << " r_used=" << krr::format_double(result.r_used)
            << " skipped=" << result.skipped.size() << "\n";
  std::cout << "wrote " << (dir / "records.csv").string() << ", "
            << (dir / "ratefit.json").string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- verify

struct VerifyOpt {
  std::uint64_t seed = 0;
  Eigen::Index m = 0;
  int trials = 20;
  bool perturb_mu = false;
};

int run_verify(const VerifyOpt& opt) {
  krr::checks::VerifyOptions vo;
  vo.seed = opt.seed;
  vo.m = opt.m;
  vo.trials = opt.trials;
  vo.perturb_mu = opt.perturb_mu;
  auto reports = krr::checks::run_verification(vo);
  bool all_pass = true;
  std::printf("%-38s %-6s %s\n", "check", "result", "detail");
  for (const auto& rep : reports) {
    all_pass = all_pass && rep.pass;
    std::printf("%-38s %-6s %s\n", rep.name.c_str(),
                rep.pass ? "pass" : "FAIL", rep.detail.c_str());
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sphere-constrained regularized least squares with indefinite "
      "kernels: solvers, spectral diagnostics, and learning-rate "
      "experiments"};
  app.require_subcommand(1);

  SpectrumOptions so;
  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "eigenvalue sweep of a kernel over growing sample sizes");
  so.kernel.attach(spectrum);
  so.data.attach(spectrum);
  spectrum->add_flag("--synthetic", so.synthetic,
                     "draw inputs from a synthetic law instead of --data");
  spectrum->add_option("--dim", so.dim, "synthetic input dimension");
  spectrum->add_option("--law", so.law, "uniform-cube|uniform-sphere");
  spectrum->add_option("--m", so.m_list, "comma-separated sample sizes")
      ->capture_default_str();
  spectrum->add_option("--seed", so.seed, "random seed");
  spectrum->add_option("--out", so.out, "output directory");
  spectrum->add_option("--config", so.config_path,
                       "JSON config; its values override flags");
  spectrum->add_flag("--plot", so.plot, "write spectrum.svg");

  FitOptions fo;
  CLI::App* fit = app.add_subcommand(
      "fit", "solve one sphere-constrained problem and write the solution");
  fo.kernel.attach(fit);
  fo.data.attach(fit);
  fit->add_option("--reg", fo.reg, "regularizer: rkks|t")
      ->capture_default_str();
  fit->add_option("--lambda", fo.lambda, "regularization weight")
      ->capture_default_str();
  fit->add_option("--r", fo.r, "sphere radius")->capture_default_str();
  fit->add_option("--predict", fo.predict_path,
                  "csv of points to predict (default: training points)");
  fit->add_option("--seed", fo.seed, "random seed");
  fit->add_option("--out", fo.out, "output directory");
  fit->add_option("--config", fo.config_path,
                  "JSON config; its values override flags");

  RateOptions ro;
  CLI::App* rate = app.add_subcommand(
      "rate", "learning-rate experiment over a sample-size grid");
  ro.kernel.attach(rate);
  rate->add_option("--dim", ro.dim, "synthetic input dimension")
      ->capture_default_str();
  rate->add_option("--law", ro.law, "uniform-cube|uniform-sphere")
      ->capture_default_str();
  rate->add_option("--m-grid", ro.m_list, "comma-separated sample sizes")
      ->capture_default_str();
  rate->add_option("--reg", ro.reg,
                   "regularizer for the learning curves: rkks|t")
      ->capture_default_str();
  rate->add_option("--gamma", ro.gamma, "lambda = m^-gamma")
      ->capture_default_str();
  rate->add_option("--trials", ro.trials, "trials per size")
      ->capture_default_str();
  rate->add_option("--r", ro.r,
                   "fixed sphere radius (default: calibrate per --r-rule)");
  rate->add_option("--r-rule", ro.r_rule,
                   "radius calibration when --r is absent: moment|cv")
      ->capture_default_str();
  rate->add_option("--n-mc", ro.n_mc, "Monte-Carlo points per risk estimate")
      ->capture_default_str();
  rate->add_option("--noise", ro.noise, "observation noise sigma")
      ->capture_default_str();
  rate->add_option("--seed", ro.seed, "random seed");
  rate->add_option("--out", ro.out, "output directory");
  rate->add_option("--theory", ro.theory,
                   "gamma,beta,s,eta,epsilon: overlay the theoretical rate");
  rate->add_flag("--planted-selftest", ro.planted_selftest,
                 "fit a planted m^-1/2 decay and exit");
  rate->add_flag("--plot", ro.plot, "write rate.svg");
  rate->add_option("--config", ro.config_path,
                   "JSON config; its values override flags");

  VerifyOpt vo;
  CLI::App* verify = app.add_subcommand(
      "verify", "run the oracle and property checks, print a pass/fail table");
  verify->add_option("--seed", vo.seed, "random seed");
  verify->add_option("--m", vo.m, "oracle instance size (2 or 3)");
  verify->add_option("--trials", vo.trials, "instances per check")
      ->capture_default_str();
  verify->add_flag("--perturb-mu", vo.perturb_mu,
                   "negative control: offset mu by 10x the certificate "
                   "bound (the certificate check must then fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (spectrum->parsed()) return run_spectrum(so);
    if (fit->parsed()) return run_fit(fo);
    if (rate->parsed()) return run_rate(ro);
    if (verify->parsed()) return run_verify(vo);
  } catch (const krr::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const krr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
