#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mrivw/error.hpp"
#include "mrivw/format.hpp"
#include "mrivw/plot.hpp"
#include "mrivw/report.hpp"
#include "mrivw/simulator.hpp"

namespace {

using namespace mrivw;

struct CommonOptions {
  std::string input = "bundled";
  std::string format = "table";
  std::string output;
};

// Writes through `fn` to the --output file, or stdout when none was given.
template <typename Fn>
void emit(const std::string& output, Fn&& fn) {
  if (output.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw input_error("cannot write '" + output + "'");
  fn(out);
  if (!out) throw input_error("failed writing '" + output + "'");
}

SummaryDataset load(const CommonOptions& opt) {
  std::vector<std::string> warnings;
  auto ds = resolve_input(opt.input, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return ds;
}

PoolingModel parse_model(const std::string& name) {
  if (name == "fixed") return PoolingModel::Fixed;
  if (name == "additive") return PoolingModel::AdditiveRandom;
  if (name == "multiplicative") return PoolingModel::MultiplicativeRandom;
  throw input_error("unknown model '" + name + "' (expected fixed, additive or multiplicative)");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MRIVW_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw input_error(std::string("MRIVW_SEED is not an unsigned integer: '") + env + "'");
  }
  return 1;
}

struct SimulateOptions {
  std::string table;
  std::vector<int> scenarios;
  std::vector<double> alphas;
  std::vector<double> beta_x;
  std::vector<double> beta_u;
  int reps = 10000;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  int n_variants = 20;
  int n_per_sample = 5000;
  std::string output;
  bool quiet = false;
};

char setting_label(double bx, double bu) {
  for (const auto& s : kEffectSettings) {
    if (s.beta_x == bx && s.beta_u == bu) return s.label;
  }
  return '-';
}

GridSpec build_grid(const SimulateOptions& opt, bool reps_given) {
  GridSpec spec;
  if (!opt.table.empty()) {
    spec = table_grid(opt.table);
    if (!opt.scenarios.empty() || !opt.alphas.empty() || !opt.beta_x.empty() || !opt.beta_u.empty()) {
      throw input_error("--table cannot be combined with --scenario, --alpha, --beta-x or --beta-u");
    }
  } else {
    if (opt.scenarios.empty()) throw input_error("simulate needs --table or --scenario");
    for (int s : opt.scenarios) spec.scenarios.push_back(scenario_from_number(s));
    spec.alphas = opt.alphas.empty() ? std::vector<double>(kPublishedAlphas.begin(), kPublishedAlphas.end())
                                     : opt.alphas;
    if (opt.beta_x.empty() && opt.beta_u.empty()) {
      spec.settings.assign(kEffectSettings.begin(), kEffectSettings.end());
    } else {
      const std::vector<double> bxs = opt.beta_x.empty() ? std::vector<double>{0.0} : opt.beta_x;
      const std::vector<double> bus = opt.beta_u.empty() ? std::vector<double>{1.0} : opt.beta_u;
      for (double bx : bxs) {
        for (double bu : bus) spec.settings.push_back({setting_label(bx, bu), bx, bu});
      }
    }
  }
  if (reps_given || opt.table.empty()) spec.n_reps = opt.reps;
  spec.seed = resolve_seed(opt.seed);
  spec.n_variants = opt.n_variants;
  spec.n_per_sample = opt.n_per_sample;
  return spec;
}

int run_simulate(const SimulateOptions& opt, bool reps_given) {
  const GridSpec spec = build_grid(opt, reps_given);
  const auto cells = expand_grid(spec);
  for (const auto& c : cells) c.validate();
  if (!opt.output.empty()) {
    // fail before hours of simulation rather than after
    std::ofstream probe(opt.output, std::ios::binary | std::ios::app);
    if (!probe) throw input_error("cannot write '" + opt.output + "'");
  }
  const int jobs = opt.jobs > 0 ? opt.jobs
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  std::vector<MonteCarloSummary> results;
  results.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const std::string tag = "[" + std::to_string(i + 1) + "/" + std::to_string(cells.size()) +
                            "] S" + std::to_string(scenario_number(c.scenario)) +
                            " alpha=" + fmt::shortest(c.alpha) + " beta_x=" +
                            fmt::shortest(c.beta_x) + " beta_u=" + fmt::shortest(c.beta_u);
    std::mutex mu;
    std::size_t last_pct = 101;
    ProgressFn progress;
    if (!opt.quiet) {
      progress = [&](std::size_t done, std::size_t total) {
        const std::size_t pct = total ? done * 100 / total : 100;
        std::lock_guard lock(mu);
        if (pct / 10 == last_pct / 10 && done != total) return;
        last_pct = pct;
        std::cerr << '\r' << tag << ' ' << pct << '%' << (done == total ? "\n" : "") << std::flush;
      };
    }
    results.push_back(run_scenario(c, jobs, progress));
    if (results.back().n_reps_failed > 0) {
      std::cerr << tag << ": " << results.back().n_reps_failed
                << " replications failed with numeric errors\n";
    }
  }
  emit(opt.output, [&](std::ostream& out) { write_summary_csv(out, results); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse-variance weighted Mendelian randomization from summarized data"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--input", common.input, "Summary CSV path, or 'bundled'")
        ->capture_default_str();
    if (with_format) {
      sub->add_option("--format", common.format, "table, csv or json")->capture_default_str();
    }
  };

  auto* analyze = app.add_subcommand("analyze", "Six IVW analyses of one dataset");
  add_common(analyze, true);
  analyze->add_option("--output", common.output, "Write here instead of stdout");

  std::string variant;
  auto* loo = app.add_subcommand("leave-one-out", "Analyze with one variant removed");
  add_common(loo, true);
  loo->add_option("--variant", variant, "Variant id to omit")->required();
  loo->add_option("--output", common.output, "Write here instead of stdout");

  std::vector<double> thetas(kDefaultThetas.begin(), kDefaultThetas.end());
  std::vector<std::string> model_names{"fixed", "additive", "multiplicative"};
  auto* sens = app.add_subcommand("sensitivity", "Second-order weights over a grid of theta");
  add_common(sens, true);
  sens->add_option("--theta", thetas, "Correlation values")->delimiter(',')->capture_default_str();
  sens->add_option("--model", model_names, "Pooling models")->delimiter(',')->capture_default_str();
  sens->add_option("--output", common.output, "Write here instead of stdout");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation grid, CSV output");
  simulate->add_option("--table", sim.table, "Preset grid: 2, 3, 4 or A6");
  simulate->add_option("--scenario", sim.scenarios, "Scenario numbers 1-7")->delimiter(',');
  simulate->add_option("--alpha", sim.alphas, "Mean per-allele effects")->delimiter(',');
  simulate->add_option("--beta-x", sim.beta_x, "Causal effects")->delimiter(',');
  simulate->add_option("--beta-u", sim.beta_u, "Confounder effects")->delimiter(',');
  auto* reps_opt = simulate->add_option("--reps", sim.reps, "Replications per cell")
                       ->check(CLI::PositiveNumber)
                       ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed (default: $MRIVW_SEED, else 1)");
  simulate->add_option("--jobs", sim.jobs, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--variants", sim.n_variants, "Variants per dataset")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--sample-size", sim.n_per_sample, "Individuals per sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--output", sim.output, "CSV path (default: stdout)");
  simulate->add_flag("--quiet", sim.quiet, "No progress on stderr");

  std::string kind = "scatter";
  std::string svg_path;
  auto* plot = app.add_subcommand("plot", "SVG scatter of associations or weights");
  add_common(plot, false);
  plot->add_option("--kind", kind, "scatter or weights")->capture_default_str();
  plot->add_option("--output", svg_path, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze || *loo) {
      const auto format = parse_output_format(common.format);
      const auto ds = load(common);
      const auto report = *analyze ? cmd_analyze(ds) : cmd_leave_one_out(ds, variant);
      emit(common.output, [&](std::ostream& out) { render(out, report, format); });
      return 0;
    }
    if (*sens) {
      const auto format = parse_output_format(common.format);
      std::vector<PoolingModel> models;
      for (const auto& m : model_names) models.push_back(parse_model(m));
      const auto ds = load(common);
      const auto report = cmd_sensitivity(ds, thetas, models);
      emit(common.output, [&](std::ostream& out) { render(out, report, format); });
      for (const auto& row : report.rows) {
        if (!row.error.empty()) std::cerr << "error: " << row.error << '\n';
      }
      return report.has_errors() ? 2 : 0;
    }
    if (*simulate) return run_simulate(sim, reps_opt->count() > 0);
    if (*plot) {
      cmd_plot(load(common), parse_plot_kind(kind), svg_path);
      return 0;
    }
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
