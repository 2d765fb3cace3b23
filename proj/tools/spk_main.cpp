// Command-line surface: dataset generation, Gram computation, DP/oracle
// self-check, repeated-split experiments, and distortion curves.
// Exit codes: 0 success, 1 usage, 2 data error, 3 convergence/internal error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spk/dataset_io.hpp"
#include "spk/errors.hpp"
#include "spk/experiment.hpp"
#include "spk/gram.hpp"
#include "spk/oracle_check.hpp"
#include "spk/subpath_kernel.hpp"
#include "spk/synthetic.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw spk::DataError("cannot parse number '" + tok + "' in list '" + s + "'");
    }
  }
  if (out.empty()) throw spk::DataError("empty number list '" + s + "'");
  return out;
}

spk::Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spk::DataError("cannot open dataset file '" + path + "'");
  return spk::parse_dataset(in);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw spk::DataError("cannot open output file '" + path + "'");
  return out;
}

// Feature extraction rule for raw datasets: chi2 gets per-dimension
// histograms, gaussian/delta get mean-variance features.
spk::Dataset prepare_features(const spk::Dataset& ds, spk::AtomicKind atomic, int bins,
                              double range_lo, double range_hi) {
  if (ds.features_extracted) return ds;
  spk::FeatureSpec spec;
  if (atomic == spk::AtomicKind::kChi2) {
    spec.mode = spk::FeatureSpec::Mode::kHistogram;
    spec.bins = bins;
    spec.range_lo = range_lo;
    spec.range_hi = range_hi;
  } else {
    spec.mode = spk::FeatureSpec::Mode::kMeanVariance;
  }
  return spk::extract_dataset_features(ds, spec);
}

int run(int argc, char** argv) {
  CLI::App app{"subpath tree-kernel toolkit"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a synthetic two-class dataset");
  std::string gen_scenario = "a", gen_out;
  std::uint64_t gen_seed = 0;
  double gen_ratio = 0.0;
  int gen_noise = 0, gen_tpc = 120;
  gen->add_option("--scenario", gen_scenario, "scenario: a|b|c|c1|c2")->required();
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("--out", gen_out, "output dataset file (JSON lines)")->required();
  gen->add_option("--ratio", gen_ratio, "distortion ratio (c1: [0,1], c2: [0,0.5])");
  gen->add_option("--noise-dims", gen_noise, "extra irrelevant leaf-value dimensions");
  gen->add_option("--trees-per-class", gen_tpc, "trees per class (default 120)");

  // ---- gram ----
  auto* gram = app.add_subcommand("gram", "compute a Gram matrix over a dataset");
  std::string gram_data, gram_kernel = "subpath", gram_atomic = "gaussian", gram_out;
  double gram_gamma = 1.0, gram_beta = 0.0;
  bool gram_normalize = false;
  int gram_bins = 4, gram_threads = 1;
  std::vector<double> gram_range{spk::kDeclaredRangeLo, spk::kDeclaredRangeHi};
  gram->add_option("--data", gram_data, "dataset file")->required();
  gram->add_option("--kernel", gram_kernel, "kernel kind: subpath|rooted");
  gram->add_option("--atomic", gram_atomic, "atomic kernel: gaussian|chi2|delta");
  gram->add_option("--gamma", gram_gamma, "RBF bandwidth (>= 0)");
  gram->add_option("--beta", gram_beta, "size-weight exponent (>= 0)");
  gram->add_flag("--normalize", gram_normalize, "normalize by the self-kernels");
  gram->add_option("--bins", gram_bins, "histogram bins for chi2 features (default 4)");
  gram->add_option("--range", gram_range, "declared histogram range lo hi (default 0 5)")
      ->expected(2);
  gram->add_option("--threads", gram_threads, "parallel workers (default 1)");
  gram->add_option("--out", gram_out, "output Gram CSV")->required();

  // ---- oracle-check ----
  auto* oc = app.add_subcommand("oracle-check", "verify the DP against the enumeration oracle");
  int oc_max_nodes = 12, oc_cases = 200;
  std::uint64_t oc_seed = 0;
  oc->add_option("--max-nodes", oc_max_nodes, "max nodes per random tree (default 12)");
  oc->add_option("--cases", oc_cases, "number of random cases (default 200)");
  oc->add_option("--seed", oc_seed, "random seed");

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment", "repeated-split classification experiment");
  std::string exp_data, exp_methods = "subpath-gaussian,subpath-chi2,rooted-gaussian,rooted-chi2";
  std::string exp_out, exp_csv, exp_gamma_grid, exp_c_grid, exp_beta_grid;
  int exp_reps = 20, exp_train = 20, exp_folds = 5, exp_bins = 4, exp_threads = 1;
  std::uint64_t exp_seed = 0;
  std::vector<double> exp_range{spk::kDeclaredRangeLo, spk::kDeclaredRangeHi};
  exp->add_option("--data", exp_data, "dataset file")->required();
  exp->add_option("--methods", exp_methods,
                  "comma list of <kernel>-<atomic> (default all four RBF methods)");
  exp->add_option("--repetitions", exp_reps, "repetitions (default 20)");
  exp->add_option("--train-per-class", exp_train, "training items per class (default 20)");
  exp->add_option("--seed", exp_seed, "protocol seed");
  exp->add_option("--folds", exp_folds, "cross-validation folds (default 5)");
  exp->add_option("--bins", exp_bins, "histogram bins for chi2 features (default 4)");
  exp->add_option("--range", exp_range, "declared histogram range lo hi (default 0 5)")
      ->expected(2);
  exp->add_option("--threads", exp_threads, "parallel Gram workers (default 1)");
  exp->add_option("--gamma-grid", exp_gamma_grid, "comma list overriding the gamma grid");
  exp->add_option("--c-grid", exp_c_grid, "comma list overriding the C grid");
  exp->add_option("--beta-grid", exp_beta_grid, "comma list overriding the beta grid");
  exp->add_option("--out", exp_out, "output report JSON")->required();
  exp->add_option("--csv", exp_csv, "optional tabular summary CSV");

  // ---- curve ----
  auto* curve = app.add_subcommand("curve", "distortion-robustness curve (scenarios c1/c2)");
  std::string cv_scenario = "c1", cv_ratios = "0,0.2,0.4,0.6,0.8,1.0", cv_out;
  std::string cv_methods = "subpath-gaussian,subpath-chi2";
  std::string cv_gamma_grid, cv_c_grid, cv_beta_grid;
  int cv_tpc = 120, cv_noise = 0, cv_reps = 20, cv_train = 20, cv_folds = 5, cv_bins = -1;
  int cv_threads = 1;
  std::uint64_t cv_seed = 0;
  curve->add_option("--scenario", cv_scenario, "scenario: c1|c2")->required();
  curve->add_option("--ratios", cv_ratios, "comma list of distortion ratios");
  curve->add_option("--seed", cv_seed, "base seed");
  curve->add_option("--methods", cv_methods, "comma list of <kernel>-<atomic>");
  curve->add_option("--trees-per-class", cv_tpc, "trees per class (default 120)");
  curve->add_option("--noise-dims", cv_noise, "extra irrelevant leaf-value dimensions");
  curve->add_option("--repetitions", cv_reps, "repetitions per ratio (default 20)");
  curve->add_option("--train-per-class", cv_train, "training items per class (default 20)");
  curve->add_option("--folds", cv_folds, "cross-validation folds (default 5)");
  curve->add_option("--bins", cv_bins, "histogram bins (default: 12 for c1, 4 for c2)");
  curve->add_option("--threads", cv_threads, "parallel Gram workers (default 1)");
  curve->add_option("--gamma-grid", cv_gamma_grid, "comma list overriding the gamma grid");
  curve->add_option("--c-grid", cv_c_grid, "comma list overriding the C grid");
  curve->add_option("--beta-grid", cv_beta_grid, "comma list overriding the beta grid");
  curve->add_option("--out", cv_out, "output plot-data CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  if (gen->parsed()) {
    spk::ScenarioParams p;
    p.scenario = spk::scenario_from_string(gen_scenario);
    p.seed = gen_seed;
    p.distortion_ratio = gen_ratio;
    p.extra_noise_dims = gen_noise;
    p.trees_per_class = gen_tpc;
    spk::Dataset ds = spk::generate(p);
    auto out = open_out(gen_out);
    spk::serialize_dataset(ds, out);
    std::cout << "wrote " << ds.items.size() << " trees (" << ds.labels.size()
              << " classes) to " << gen_out << "\n";
  } else if (gram->parsed()) {
    spk::Dataset ds = load_dataset(gram_data);
    spk::KernelConfig cfg;
    cfg.atomic = spk::atomic_kind_from_string(gram_atomic);
    cfg.gamma = gram_gamma;
    cfg.beta = gram_beta;
    cfg.normalize = gram_normalize;
    cfg.bins = gram_bins;
    cfg.check();
    ds = prepare_features(ds, cfg.atomic, gram_bins, gram_range[0], gram_range[1]);
    spk::GramMatrix g = spk::gram_matrix(ds, cfg, spk::kernel_kind_from_string(gram_kernel),
                                         gram_threads);
    auto out = open_out(gram_out);
    spk::write_gram_csv(out, g);
    std::cout << "wrote " << g.n() << "x" << g.n() << " Gram matrix to " << gram_out << "\n";
  } else if (oc->parsed()) {
    spk::OracleCheckOptions opt;
    opt.max_nodes = oc_max_nodes;
    opt.cases = oc_cases;
    opt.seed = oc_seed;
    auto res = spk::oracle_check(opt);
    std::cout << "oracle-check: " << res.cases_run << " cases, max relative error "
              << res.max_rel_error << "\n";
    if (!res.ok()) {
      std::cerr << "MISMATCH: " << res.mismatches << " cases exceeded tolerance; first: "
                << res.first_mismatch << "\n";
      return 3;
    }
  } else if (exp->parsed()) {
    spk::Dataset ds = load_dataset(exp_data);
    spk::Protocol prot;
    prot.repetitions = exp_reps;
    prot.train_per_class = exp_train;
    prot.seed = exp_seed;
    prot.cv_folds = exp_folds;
    prot.bins = exp_bins;
    prot.range_lo = exp_range[0];
    prot.range_hi = exp_range[1];
    prot.threads = exp_threads;
    if (!exp_gamma_grid.empty()) prot.grids.gammas = parse_double_list(exp_gamma_grid);
    if (!exp_c_grid.empty()) prot.grids.cs = parse_double_list(exp_c_grid);
    if (!exp_beta_grid.empty()) prot.grids.betas = parse_double_list(exp_beta_grid);
    auto methods = spk::methods_from_string(exp_methods);
    auto report = spk::run_experiment(ds, methods, prot);
    auto out = open_out(exp_out);
    spk::write_report_json(out, report);
    if (!exp_csv.empty()) {
      auto csv = open_out(exp_csv);
      spk::write_report_csv(csv, report);
    }
    spk::write_report_csv(std::cout, report);
  } else if (curve->parsed()) {
    spk::ScenarioParams base;
    base.scenario = spk::scenario_from_string(cv_scenario);
    if (base.scenario != spk::Scenario::kC1 && base.scenario != spk::Scenario::kC2) {
      throw spk::DataError("curve: scenario must be c1 or c2");
    }
    base.seed = cv_seed;
    base.trees_per_class = cv_tpc;
    base.extra_noise_dims = cv_noise;
    auto ratios = parse_double_list(cv_ratios);
    auto suite = spk::scenario_suite(base, ratios);
    spk::Protocol prot;
    prot.repetitions = cv_reps;
    prot.train_per_class = cv_train;
    prot.seed = cv_seed;
    prot.cv_folds = cv_folds;
    prot.bins = cv_bins > 0 ? cv_bins : (base.scenario == spk::Scenario::kC1 ? 12 : 4);
    prot.threads = cv_threads;
    if (!cv_gamma_grid.empty()) prot.grids.gammas = parse_double_list(cv_gamma_grid);
    if (!cv_c_grid.empty()) prot.grids.cs = parse_double_list(cv_c_grid);
    if (!cv_beta_grid.empty()) prot.grids.betas = parse_double_list(cv_beta_grid);
    auto methods = spk::methods_from_string(cv_methods);
    auto reports = spk::robustness_curve(suite, ratios, methods, prot);
    auto out = open_out(cv_out);
    spk::write_curve_csv(out, ratios, reports);
    spk::write_curve_csv(std::cout, ratios, reports);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const spk::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const spk::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
