#include "mrivw/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "mrivw/error.hpp"
#include "mrivw/format.hpp"
#include "mrivw/regression.hpp"
#include "mrivw/rng.hpp"

namespace mrivw {

namespace {

constexpr double kEffectSd = 0.02;
constexpr double kPleiotropyCorrelation = 0.4;
constexpr std::uint32_t kMaxRegenerations = 1000;

Engine stream(const ScenarioConfig& c, std::uint64_t rep, std::uint32_t attempt,
              StreamPurpose purpose) {
  return make_substream({c.seed, static_cast<std::uint64_t>(scenario_number(c.scenario)),
                         std::bit_cast<std::uint64_t>(c.alpha),
                         std::bit_cast<std::uint64_t>(c.beta_x),
                         std::bit_cast<std::uint64_t>(c.beta_u),
                         static_cast<std::uint64_t>(c.n_variants),
                         static_cast<std::uint64_t>(c.n_per_sample), rep, attempt,
                         static_cast<std::uint64_t>(purpose)});
}

// Lower Cholesky factor of the (alpha_j, beta_Zj) covariance used by S6/S7.
const Eigen::Matrix2d& pleiotropy_cholesky() {
  static const Eigen::Matrix2d factor = [] {
    const double v = kEffectSd * kEffectSd;
    Eigen::Matrix2d cov;
    cov << v, kPleiotropyCorrelation * v, kPleiotropyCorrelation * v, v;
    return Eigen::Matrix2d(cov.llt().matrixL());
  }();
  return factor;
}

void draw_variant_effects(const ScenarioConfig& c, Engine& engine, Eigen::VectorXd& alpha,
                          Eigen::VectorXd& beta_z) {
  const int J = c.n_variants;
  alpha.resize(J);
  beta_z.setZero(J);
  std::normal_distribution<double> normal;
  switch (c.scenario) {
    case Scenario::S1:
    case Scenario::S3:
      for (int j = 0; j < J; ++j) alpha[j] = c.alpha + kEffectSd * normal(engine);
      break;
    case Scenario::S2:
    case Scenario::S4:
      for (int j = 0; j < J; ++j) {
        alpha[j] = c.alpha + kEffectSd * normal(engine);
        beta_z[j] = kEffectSd * normal(engine);
      }
      break;
    case Scenario::S5: {
      // t with 2 df as Z / sqrt(V / 2), V ~ chi-square(2); no rescaling
      std::chi_squared_distribution<double> chi2(2.0);
      for (int j = 0; j < J; ++j) {
        alpha[j] = c.alpha + kEffectSd * normal(engine);
        const double z = normal(engine);
        const double v = chi2(engine);
        beta_z[j] = kEffectSd * z / std::sqrt(v / 2.0);
      }
      break;
    }
    case Scenario::S6:
    case Scenario::S7: {
      const auto& L = pleiotropy_cholesky();
      for (int j = 0; j < J; ++j) {
        const Eigen::Vector2d z(normal(engine), normal(engine));
        const Eigen::Vector2d draw = L * z;
        alpha[j] = c.alpha + draw[0];
        beta_z[j] = draw[1];
      }
      break;
    }
  }
}

}  // namespace

bool is_two_sample(Scenario s) {
  return s == Scenario::S3 || s == Scenario::S4 || s == Scenario::S7;
}

int scenario_number(Scenario s) { return static_cast<int>(s); }

Scenario scenario_from_number(int n) {
  if (n < 1 || n > 7) throw input_error("scenario must be 1..7, got " + std::to_string(n));
  return static_cast<Scenario>(n);
}

void ScenarioConfig::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta_x) || !std::isfinite(beta_u)) {
    throw input_error("scenario parameters must be finite");
  }
  if (n_variants < 1) throw input_error("n_variants must be positive");
  if (n_per_sample < n_variants + 2) {
    throw input_error("n_per_sample must exceed n_variants + 1");
  }
  if (n_reps < 1) throw input_error("n_reps must be positive");
  if (!(maf > 0.0 && maf < 1.0)) throw input_error("maf must lie in (0, 1)");
}

std::size_t method_index(PoolingModel model, WeightRule::Kind weights) {
  for (std::size_t i = 0; i < kMethods.size(); ++i) {
    if (kMethods[i].model == model && kMethods[i].weights == weights) return i;
  }
  throw input_error("no simulation method for this model/weights pair");
}

std::string weights_label(WeightRule::Kind weights) {
  return weights == WeightRule::Kind::FirstOrder ? "first" : "second";
}

IndividualData generate_individual_data(const ScenarioConfig& config, std::uint64_t rep_index,
                                        std::uint32_t attempt) {
  config.validate();
  const Eigen::Index J = config.n_variants;
  const Eigen::Index n = config.n_per_sample;
  const bool two_sample = is_two_sample(config.scenario);
  const Eigen::Index total = two_sample ? 2 * n : n;

  IndividualData data;
  data.n_per_sample = n;
  data.outcome_offset = two_sample ? n : 0;

  {
    auto engine = stream(config, rep_index, attempt, StreamPurpose::VariantEffects);
    draw_variant_effects(config, engine, data.alpha, data.beta_z);
  }

  {
    // Binomial(2, maf) by inverting the three-point distribution.
    const double p = config.maf;
    const double p0 = (1.0 - p) * (1.0 - p);
    const double p01 = p0 + 2.0 * p * (1.0 - p);
    auto engine = stream(config, rep_index, attempt, StreamPurpose::Genotypes);
    data.genotypes.resize(total, J);
    double* g = data.genotypes.data();
    for (Eigen::Index k = 0; k < total * J; ++k) {
      const double u = uniform01(engine);
      g[k] = u < p0 ? 0.0 : (u < p01 ? 1.0 : 2.0);
    }
  }

  Eigen::VectorXd u(total), ex(total), ey(total);
  {
    auto engine = stream(config, rep_index, attempt, StreamPurpose::IndividualNoise);
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < total; ++i) {
      u[i] = normal(engine);
      ex[i] = normal(engine);
      ey[i] = normal(engine);
    }
  }

  data.x = data.genotypes * data.alpha + u + ex;
  data.y = config.beta_x * data.x + data.genotypes * data.beta_z + config.beta_u * u + ey;
  return data;
}

bool has_monomorphic_variant(const IndividualData& data) {
  const Eigen::Index n = data.n_per_sample;
  for (Eigen::Index j = 0; j < data.genotypes.cols(); ++j) {
    const auto col = data.genotypes.col(j);
    const auto exposure = col.segment(0, n);
    const auto outcome = col.segment(data.outcome_offset, n);
    if (exposure.minCoeff() == exposure.maxCoeff()) return true;
    if (outcome.minCoeff() == outcome.maxCoeff()) return true;
  }
  return false;
}

SummaryDataset summarize(const IndividualData& data, std::string label) {
  const Eigen::Index n = data.n_per_sample;
  const Eigen::Index off = data.outcome_offset;
  std::vector<VariantAssociation> variants;
  variants.reserve(static_cast<std::size_t>(data.genotypes.cols()));
  for (Eigen::Index j = 0; j < data.genotypes.cols(); ++j) {
    const auto gx = data.genotypes.col(j).segment(0, n);
    const auto gy = data.genotypes.col(j).segment(off, n);
    const auto fx = simple_ols(data.x.segment(0, n), gx);
    const auto fy = simple_ols(data.y.segment(off, n), gy);
    VariantAssociation v;
    v.id = "v" + std::to_string(j + 1);
    v.beta_x = fx.slope;
    v.se_x = fx.slope_se;
    v.beta_y = fy.slope;
    v.se_y = fy.slope_se;
    variants.push_back(std::move(v));
  }
  return SummaryDataset(std::move(variants), std::move(label));
}

Replication simulate_replication(const ScenarioConfig& config, std::uint64_t rep_index) {
  for (std::uint32_t attempt = 0; attempt <= kMaxRegenerations; ++attempt) {
    auto data = generate_individual_data(config, rep_index, attempt);
    if (has_monomorphic_variant(data)) continue;
    const Eigen::Index n = data.n_per_sample;
    InstrumentStrength<double> strength;
    try {
      strength = joint_f_and_r2(data.x.head(n), data.genotypes.topRows(n));
    } catch (const numeric_error&) {
      continue;  // collinear genotype columns, only plausible at tiny sample sizes
    }
    return {summarize(data, "rep" + std::to_string(rep_index)), strength.f_statistic,
            strength.r_squared, attempt};
  }
  throw numeric_error("replication " + std::to_string(rep_index) +
                      ": monomorphic or collinear variants in every regeneration");
}

SummaryDataset generate_replication(const ScenarioConfig& config, std::uint64_t rep_index) {
  return simulate_replication(config, rep_index).dataset;
}

std::array<MethodOutcome, 6> analyze_all_methods(const SummaryDataset& dataset) {
  const auto second = ratio_estimates(dataset, WeightRule::second_order());
  const auto first = ratio_estimates(dataset, WeightRule::first_order());
  std::array<MethodOutcome, 6> out{};
  for (std::size_t i = 0; i < kMethods.size(); ++i) {
    const auto& m = kMethods[i];
    const auto r = pool(m.weights == WeightRule::Kind::FirstOrder ? first : second, m.model);
    out[i] = {r.estimate, r.se, std::abs(r.estimate) > kZ975 * r.se};
  }
  return out;
}

RepResult run_replication(const ScenarioConfig& config, std::uint64_t rep_index) {
  auto rep = simulate_replication(config, rep_index);
  RepResult result;
  result.methods = analyze_all_methods(rep.dataset);
  result.f_statistic = rep.f_statistic;
  result.r_squared = rep.r_squared;
  result.regenerations = rep.regenerations;
  return result;
}

MonteCarloSummary summarize_replications(const ScenarioConfig& config,
                                         std::span<const std::optional<RepResult>> reps) {
  MonteCarloSummary s;
  s.config = config;
  std::size_t done = 0;
  for (const auto& r : reps) {
    if (!r) {
      ++s.n_reps_failed;
      continue;
    }
    ++done;
    s.mean_f += r->f_statistic;
    s.mean_r2 += r->r_squared;
    s.n_regenerations += r->regenerations;
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      const auto& o = r->methods[m];
      auto& acc = s.methods[m];
      acc.mean_estimate += o.estimate;
      acc.mean_se += o.se;
      acc.power += o.rejected ? 1.0 : 0.0;
      acc.coverage += std::abs(o.estimate - config.beta_x) <= kZ975 * o.se ? 1.0 : 0.0;
    }
  }
  s.n_reps_completed = done;
  if (done == 0) return s;

  const double n = static_cast<double>(done);
  s.mean_f /= n;
  s.mean_r2 /= n;
  for (auto& acc : s.methods) {
    acc.mean_estimate /= n;
    acc.mean_se /= n;
    acc.power /= n;
    acc.coverage /= n;
  }
  if (done > 1) {
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      double ss = 0.0;
      for (const auto& r : reps) {
        if (!r) continue;
        const double d = r->methods[m].estimate - s.methods[m].mean_estimate;
        ss += d * d;
      }
      s.methods[m].sd_estimate = std::sqrt(ss / (n - 1.0));
    }
  }
  return s;
}

MonteCarloSummary run_scenario(const ScenarioConfig& config, int parallelism,
                               const ProgressFn& progress) {
  config.validate();
  if (parallelism < 1) throw input_error("parallelism must be positive");
  const auto total = static_cast<std::size_t>(config.n_reps);
  std::vector<std::optional<RepResult>> results(total);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        results[i] = run_replication(config, i);
      } catch (const numeric_error&) {
        results[i].reset();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
      const std::size_t done = ++finished;
      if (progress && (done % 250 == 0 || done == total)) {
        std::lock_guard lock(progress_mutex);
        progress(done, total);
      }
    }
  };

  const auto threads = static_cast<std::size_t>(parallelism);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return summarize_replications(config, results);
}

GridSpec table_grid(const std::string& table) {
  GridSpec spec;
  spec.alphas.assign(kPublishedAlphas.begin(), kPublishedAlphas.end());
  spec.settings.assign(kEffectSettings.begin(), kEffectSettings.end());
  if (table == "2") {
    spec.scenarios = {Scenario::S1, Scenario::S2};
  } else if (table == "3") {
    spec.scenarios = {Scenario::S3, Scenario::S4};
  } else if (table == "4") {
    spec.scenarios = {Scenario::S5};
    spec.settings.resize(2);
  } else if (table == "A6" || table == "a6") {
    spec.scenarios = {Scenario::S6, Scenario::S7};
  } else {
    throw input_error("unknown table '" + table + "' (expected 2, 3, 4 or A6)");
  }
  return spec;
}

std::vector<ScenarioConfig> expand_grid(const GridSpec& spec) {
  if (spec.scenarios.empty() || spec.alphas.empty() || spec.settings.empty()) {
    throw input_error("grid needs at least one scenario, alpha and effect setting");
  }
  std::vector<ScenarioConfig> cells;
  for (auto s : spec.scenarios) {
    for (double a : spec.alphas) {
      for (const auto& e : spec.settings) {
        ScenarioConfig c;
        c.scenario = s;
        c.alpha = a;
        c.beta_x = e.beta_x;
        c.beta_u = e.beta_u;
        c.n_reps = spec.n_reps;
        c.seed = spec.seed;
        c.n_variants = spec.n_variants;
        c.n_per_sample = spec.n_per_sample;
        c.validate();
        cells.push_back(c);
      }
    }
  }
  return cells;
}

std::vector<MonteCarloSummary> run_grid(const GridSpec& spec, int parallelism,
                                        const ProgressFn& progress) {
  const auto cells = expand_grid(spec);
  std::vector<MonteCarloSummary> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(run_scenario(c, parallelism, progress));
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const MonteCarloSummary> summaries) {
  out << "scenario,alpha,beta_x,beta_u,method,weights,mean,power_pct,sd,mean_se,mean_f,mean_r2,"
         "n_reps,seed\n";
  for (const auto& s : summaries) {
    const double n = static_cast<double>(s.n_reps_completed);
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      const auto& r = s.methods[m];
      // from the rejection count, so 565/2000 prints as 28.25
      const double power_pct = n > 0 ? std::round(r.power * n) * 100.0 / n : 0.0;
      out << scenario_number(s.config.scenario) << ',' << fmt::shortest(s.config.alpha) << ','
          << fmt::shortest(s.config.beta_x) << ',' << fmt::shortest(s.config.beta_u) << ','
          << to_string(kMethods[m].model) << ',' << weights_label(kMethods[m].weights) << ','
          << fmt::shortest(r.mean_estimate) << ',' << fmt::shortest(power_pct) << ','
          << fmt::shortest(r.sd_estimate) << ',' << fmt::shortest(r.mean_se) << ','
          << fmt::shortest(s.mean_f) << ',' << fmt::shortest(s.mean_r2) << ','
          << s.n_reps_completed << ',' << s.config.seed << '\n';
    }
  }
}

}  // namespace mrivw
