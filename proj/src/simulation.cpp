#include "genrct/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "genrct/errors.hpp"
#include "genrct/parallel.hpp"
#include "genrct/stats.hpp"

namespace genrct {

namespace {

double expit(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  double e = std::exp(eta);
  return e / (1.0 + e);
}

std::string trim_ws(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// One unit drawn from the superpopulation.
struct Unit {
  Eigen::VectorXd x;  // analyst-visible covariates
  double x1_sq = 0.0;
  double hidden = 0.0;
  bool selected = false;
  int arm = 0;
  double y = 0.0;
};

class UnitSampler {
 public:
  UnitSampler(const SimConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), rng_(seed) {}

  Unit draw() {
    const int p = cfg_.p;
    Unit u;
    u.x.resize(p);
    double factor = normal_(rng_);
    double load = std::sqrt(cfg_.rho);
    double resid = std::sqrt(1.0 - cfg_.rho);
    Eigen::VectorXd z(p);
    for (int j = 0; j < p; ++j) {
      z(j) = load * factor + resid * normal_(rng_);
      double latent = cfg_.mu(j) + cfg_.sigma(j) * z(j);
      bool binary = j < static_cast<int>(cfg_.binary_mask.size()) &&
                    cfg_.binary_mask[static_cast<std::size_t>(j)] != 0;
      u.x(j) = binary ? (latent > 0.0 ? 1.0 : 0.0) : latent;
    }
    u.x1_sq = u.x(0) * u.x(0);

    int twin = std::clamp(cfg_.hidden_twin, 1, p) - 1;
    u.hidden = cfg_.hidden_rho * z(twin) +
               std::sqrt(1.0 - cfg_.hidden_rho * cfg_.hidden_rho) *
                   normal_(rng_);

    double eta = cfg_.alpha(0) + cfg_.alpha.tail(p).dot(u.x) +
                 cfg_.alpha_quad * u.x1_sq + cfg_.hidden_strength * u.hidden;
    u.selected = uniform_(rng_) < expit(eta);

    u.arm = uniform_(rng_) < cfg_.c ? 1 : 0;
    double noise = cfg_.noise_sd * normal_(rng_);
    const Eigen::VectorXd& beta = u.arm == 1 ? cfg_.beta1 : cfg_.beta0;
    double quad = u.arm == 1 ? cfg_.beta_quad1 : cfg_.beta_quad0;
    u.y = beta(0) + beta.tail(p).dot(u.x) + quad * u.x1_sq +
          (u.arm == 1 ? cfg_.hidden_strength * u.hidden : 0.0) + noise;
    return u;
  }

  double effect(const Unit& u) const {
    const int p = cfg_.p;
    return (cfg_.beta1(0) - cfg_.beta0(0)) +
           (cfg_.beta1.tail(p) - cfg_.beta0.tail(p)).dot(u.x) +
           (cfg_.beta_quad1 - cfg_.beta_quad0) * u.x1_sq +
           cfg_.hidden_strength * u.hidden;
  }

 private:
  const SimConfig& cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace

void SimConfig::validate() const {
  require(p >= 1, errc::invalid_config, "p must be positive");
  require(mu.size() == p && sigma.size() == p, errc::invalid_config,
          "mu and sigma must have length p");
  require((sigma.array() > 0.0).all(), errc::invalid_config,
          "sigma entries must be positive");
  require(rho >= 0.0 && rho < 1.0, errc::invalid_config,
          "rho must lie in [0, 1)");
  require(alpha.size() == p + 1, errc::invalid_config,
          "alpha must have length p+1 (intercept first)");
  require(beta0.size() == p + 1 && beta1.size() == p + 1, errc::invalid_config,
          "beta0/beta1 must have length p+1 (intercept first)");
  require(c > 0.0 && c < 1.0, errc::invalid_config, "c must lie in (0,1)");
  require(noise_sd >= 0.0, errc::invalid_config, "noise_sd must be >= 0");
  require(n_trial >= 4 && m_target >= 1, errc::invalid_config,
          "cohort sizes too small");
  require(hidden_rho >= -1.0 && hidden_rho <= 1.0, errc::invalid_config,
          "hidden_rho must lie in [-1, 1]");
  require(hidden_twin >= 1 && hidden_twin <= p, errc::invalid_config,
          "hidden_twin must name a covariate index in 1..p");
  if (!binary_mask.empty())
    require(static_cast<int>(binary_mask.size()) == p, errc::invalid_config,
            "binary_mask must have length p");
  if (binary_mask.size() > 0 && binary_mask[0] != 0)
    require(!dgp_has_quadratic(), errc::invalid_config,
            "quadratic terms need a continuous first covariate");
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open config file " + path);

  SimConfig cfg;
  bool saw_mu = false, saw_sigma = false, saw_alpha = false;
  bool saw_beta0 = false, saw_beta1 = false;

  auto parse_scalar = [&](const std::string& v, const std::string& key) {
    try {
      return std::stod(v);
    } catch (...) {
      fail(errc::invalid_config, "bad numeric value for " + key);
    }
  };
  auto parse_bool = [&](const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(errc::invalid_config, "bad boolean for " + key);
  };
  auto parse_array = [&](const std::string& v, const std::string& key) {
    require(v.size() >= 2 && v.front() == '[' && v.back() == ']',
            errc::invalid_config, key + " must be a [..] array");
    std::vector<double> out;
    std::string body = v.substr(1, v.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim_ws(item);
      if (!item.empty()) out.push_back(parse_scalar(item, key));
    }
    return out;
  };
  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<Eigen::Index>(
                                                 v.size()))
        .eval();
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string t = trim_ws(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    require(eq != std::string::npos, errc::invalid_config,
            path + " line " + std::to_string(lineno) + " lacks '='");
    std::string key = trim_ws(t.substr(0, eq));
    std::string value = trim_ws(t.substr(eq + 1));

    if (key == "p") cfg.p = static_cast<int>(parse_scalar(value, key));
    else if (key == "mu") { cfg.mu = to_vec(parse_array(value, key)); saw_mu = true; }
    else if (key == "sigma") { cfg.sigma = to_vec(parse_array(value, key)); saw_sigma = true; }
    else if (key == "rho") cfg.rho = parse_scalar(value, key);
    else if (key == "binary_mask") {
      auto arr = parse_array(value, key);
      cfg.binary_mask.assign(arr.size(), 0);
      for (std::size_t i = 0; i < arr.size(); ++i)
        cfg.binary_mask[i] = arr[i] != 0.0 ? 1 : 0;
    }
    else if (key == "alpha") { cfg.alpha = to_vec(parse_array(value, key)); saw_alpha = true; }
    else if (key == "alpha_quad") cfg.alpha_quad = parse_scalar(value, key);
    else if (key == "c") cfg.c = parse_scalar(value, key);
    else if (key == "beta0") { cfg.beta0 = to_vec(parse_array(value, key)); saw_beta0 = true; }
    else if (key == "beta1") { cfg.beta1 = to_vec(parse_array(value, key)); saw_beta1 = true; }
    else if (key == "beta_quad0") cfg.beta_quad0 = parse_scalar(value, key);
    else if (key == "beta_quad1") cfg.beta_quad1 = parse_scalar(value, key);
    else if (key == "noise_sd") cfg.noise_sd = parse_scalar(value, key);
    else if (key == "n_trial") cfg.n_trial = static_cast<int>(parse_scalar(value, key));
    else if (key == "m_target") cfg.m_target = static_cast<int>(parse_scalar(value, key));
    else if (key == "sampling_wrong") cfg.sampling_wrong = parse_bool(value, key);
    else if (key == "outcome_wrong") cfg.outcome_wrong = parse_bool(value, key);
    else if (key == "hidden_strength") cfg.hidden_strength = parse_scalar(value, key);
    else if (key == "hidden_rho") cfg.hidden_rho = parse_scalar(value, key);
    else if (key == "hidden_twin") cfg.hidden_twin = static_cast<int>(parse_scalar(value, key));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_scalar(value, key));
    else fail(errc::invalid_config, "unknown config key '" + key + "'");
  }

  if (!saw_mu) cfg.mu = Eigen::VectorXd::Zero(cfg.p);
  if (!saw_sigma) cfg.sigma = Eigen::VectorXd::Ones(cfg.p);
  if (!saw_alpha) cfg.alpha = Eigen::VectorXd::Zero(cfg.p + 1);
  if (!saw_beta0) cfg.beta0 = Eigen::VectorXd::Zero(cfg.p + 1);
  if (!saw_beta1) cfg.beta1 = Eigen::VectorXd::Zero(cfg.p + 1);
  cfg.validate();
  return cfg;
}

// Fixed stream index reserved for the truth oracle so replicate streams
// (indices 0..reps-1) never collide with it.
constexpr std::uint64_t kOracleStream = 0xFFFFFFFF00000001ULL;

Truth oracle_truth(const SimConfig& cfg, std::size_t draws) {
  cfg.validate();
  UnitSampler sampler(cfg, derive_seed(cfg.seed, kOracleStream));
  double sum1 = 0.0, sum0 = 0.0, ss1 = 0.0, ss0 = 0.0;
  std::size_t k1 = 0, k0 = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    Unit u = sampler.draw();
    double eff = sampler.effect(u);
    if (u.selected) {
      sum1 += eff;
      ss1 += eff * eff;
      ++k1;
    } else {
      sum0 += eff;
      ss0 += eff * eff;
      ++k0;
    }
  }
  require(k1 >= 100 && k0 >= 100, errc::invalid_config,
          "selection model leaves one cohort nearly empty");

  double m1 = sum1 / static_cast<double>(k1);
  double m0 = sum0 / static_cast<double>(k0);
  double v1 = ss1 / static_cast<double>(k1) - m1 * m1;
  double v0 = ss0 / static_cast<double>(k0) - m0 * m0;
  double wn = static_cast<double>(cfg.n_trial) /
              static_cast<double>(cfg.n_trial + cfg.m_target);

  Truth truth;
  truth.combined = wn * m1 + (1.0 - wn) * m0;
  truth.target_only = m0;
  truth.mc_error = std::sqrt(wn * wn * v1 / static_cast<double>(k1) +
                             (1.0 - wn) * (1.0 - wn) * v0 /
                                 static_cast<double>(k0));
  return truth;
}

GeneratedStudy generate(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  UnitSampler sampler(cfg, seed);

  CovariateSchema schema;
  for (int j = 0; j < cfg.p; ++j) {
    bool binary = j < static_cast<int>(cfg.binary_mask.size()) &&
                  cfg.binary_mask[static_cast<std::size_t>(j)] != 0;
    schema.entries.push_back({"x" + std::to_string(j + 1),
                              binary ? CovariateKind::binary
                                     : CovariateKind::continuous});
  }

  GeneratedStudy study;
  study.trial.schema = schema;
  study.trial.source = Source::trial;
  study.trial.outcome_names = {"y"};
  study.target.schema = schema;
  study.target.source = Source::target;

  const std::size_t want_n = static_cast<std::size_t>(cfg.n_trial);
  const std::size_t want_m = static_cast<std::size_t>(cfg.m_target);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 10000 * (want_n + want_m);
  while (study.trial.n() < want_n || study.target.n() < want_m) {
    require(++attempts <= max_attempts, errc::invalid_config,
            "selection model cannot fill the cohort quotas");
    Unit u = sampler.draw();
    UnitRecord rec;
    rec.covariates.assign(u.x.data(), u.x.data() + u.x.size());
    if (u.selected) {
      if (study.trial.n() >= want_n) continue;
      rec.arm = u.arm;
      rec.outcomes["y"] = u.y;
      study.trial.records.push_back(std::move(rec));
    } else {
      if (study.target.n() >= want_m) continue;
      study.target.records.push_back(std::move(rec));
    }
  }
  study.trial.validate();
  study.target.validate();
  return study;
}

namespace {

Eigen::MatrixXd append_quadratic(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()) = x.col(0).array().square();
  return out;
}

}  // namespace

OutcomeData analyst_view(const GeneratedStudy& study, const SimConfig& cfg) {
  OutcomeData data = make_outcome_data(study.trial, study.target, "y");
  bool quad_sampling = cfg.alpha_quad != 0.0 && !cfg.sampling_wrong;
  bool quad_outcome =
      (cfg.beta_quad0 != 0.0 || cfg.beta_quad1 != 0.0) && !cfg.outcome_wrong;
  if (quad_sampling) {
    data.xs_trial = append_quadratic(data.xs_trial);
    data.xs_target = append_quadratic(data.xs_target);
  }
  if (quad_outcome) {
    data.xo_trial = append_quadratic(data.xo_trial);
    data.xo_target = append_quadratic(data.xo_target);
  }
  return data;
}

std::vector<std::string> analyst_sampling_feature_names(const SimConfig& cfg) {
  std::vector<std::string> names;
  for (int j = 0; j < cfg.p; ++j) names.push_back("x" + std::to_string(j + 1));
  if (cfg.alpha_quad != 0.0 && !cfg.sampling_wrong) names.push_back("x1_sq");
  return names;
}

MCResult run_mc(const SimConfig& cfg, const std::vector<EstimatorSpec>& specs,
                const MCOptions& options) {
  cfg.validate();
  require(!specs.empty(), errc::invalid_argument, "no estimators given");
  require(options.replicates >= 100, errc::invalid_argument,
          "run_mc needs at least 100 replicates");

  Truth truth = oracle_truth(cfg);

  const std::size_t reps = static_cast<std::size_t>(options.replicates);
  const std::size_t ns = specs.size();
  std::vector<std::vector<double>> estimates(
      ns, std::vector<double>(reps, std::numeric_limits<double>::quiet_NaN()));
  std::vector<std::vector<int>> covered(ns, std::vector<int>(reps, -1));

  parallel_for(options.replicates, options.threads, [&](int r) {
    std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<unsigned>(r));
    GeneratedStudy study;
    try {
      study = generate(cfg, rep_seed);
    } catch (const Error&) {
      return;  // whole replicate failed
    }
    OutcomeData data = analyst_view(study, cfg);

    FittedNuisance fits;
    bool have_fits = false;
    // shared across specs: run_mc assumes common nuisance options; the
    // aipsw method key makes the shared fit a superset of every spec's needs
    EstimatorSpec fit_spec;
    for (const auto& s : specs)
      if (s.method != Method::rct_diff) fit_spec = s;
    fit_spec.method = Method::aipsw;
    for (std::size_t s = 0; s < ns; ++s) {
      try {
        if (specs[s].method != Method::rct_diff && !have_fits) {
          fits = fit_nuisance(data, fit_spec);
          have_fits = true;
        }
        estimates[s][static_cast<std::size_t>(r)] = point_estimate(
            data, specs[s],
            specs[s].method == Method::rct_diff ? nullptr : &fits);

        if (options.bootstrap_B > 0) {
          BootstrapOptions boot;
          boot.replicates = options.bootstrap_B;
          boot.seed = derive_seed(rep_seed, 7000 + s);
          boot.threads = 1;
          Estimate est = bootstrap_estimate(data, specs[s], "y", boot);
          double t = specs[s].method == Method::om &&
                             specs[s].targetpop == TargetPop::target_only
                         ? truth.target_only
                         : truth.combined;
          covered[s][static_cast<std::size_t>(r)] =
              est.ci_low <= t && t <= est.ci_high ? 1 : 0;
        }
      } catch (const Error&) {
        // failed estimate, counted below
      }
    }
  });

  MCResult result;
  result.truth = truth.combined;
  result.estimand = TargetPop::combined;
  result.replicates = options.replicates;

  for (std::size_t s = 0; s < ns; ++s) {
    MCRow row;
    row.estimator = method_name(specs[s].method);
    if (specs[s].method == Method::om &&
        specs[s].targetpop == TargetPop::target_only)
      row.estimator += "-target";
    double t = specs[s].method == Method::om &&
                       specs[s].targetpop == TargetPop::target_only
                   ? truth.target_only
                   : truth.combined;

    std::vector<double> kept;
    kept.reserve(reps);
    for (double v : estimates[s])
      if (std::isfinite(v)) kept.push_back(v);
    row.used = static_cast<int>(kept.size());
    row.failed = static_cast<int>(reps - kept.size());
    double failed_frac =
        static_cast<double>(row.failed) / static_cast<double>(reps);
    require(failed_frac <= options.max_failed_frac, errc::replicate_failure,
            row.estimator + ": " + std::to_string(row.failed) +
                " replicates failed");

    row.mean_bias = mean(kept) - t;
    row.emp_sd = kept.size() >= 2 ? stddev(kept) : 0.0;
    row.mcse = row.emp_sd / std::sqrt(static_cast<double>(kept.size()));

    if (options.bootstrap_B > 0) {
      double hits = 0.0, total = 0.0;
      for (int c : covered[s]) {
        if (c < 0) continue;
        hits += c;
        total += 1.0;
      }
      row.coverage = total > 0.0 ? hits / total : -1.0;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string MCResult::to_text() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "truth (combined estimand): %.6g, replicates: %d\n",
                truth, replicates);
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-12s %12s %12s %12s %10s %6s %6s\n",
                "estimator", "mean_bias", "mcse", "emp_sd", "coverage", "used",
                "failed");
  out << buf;
  for (const auto& r : rows) {
    if (r.coverage >= 0.0)
      std::snprintf(buf, sizeof(buf),
                    "%-12s %12.5g %12.5g %12.5g %10.4g %6d %6d\n",
                    r.estimator.c_str(), r.mean_bias, r.mcse, r.emp_sd,
                    r.coverage, r.used, r.failed);
    else
      std::snprintf(buf, sizeof(buf),
                    "%-12s %12.5g %12.5g %12.5g %10s %6d %6d\n",
                    r.estimator.c_str(), r.mean_bias, r.mcse, r.emp_sd, "-",
                    r.used, r.failed);
    out << buf;
  }
  return out.str();
}

}  // namespace genrct
