#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spk/dataset_io.hpp"
#include "spk/errors.hpp"
#include "spk/gram.hpp"
#include "spk/metrics.hpp"
#include "spk/rng.hpp"
#include "spk/svm.hpp"
#include "spk/synthetic.hpp"

namespace spk {

// A classification method = kernel kind x atomic kernel, named e.g.
// "subpath-gaussian". Feature extraction is tied to the atomic: chi2 uses
// per-dimension histograms, gaussian/delta use mean-variance features.
struct Method {
  KernelKind kind = KernelKind::kSubpath;
  AtomicKind atomic = AtomicKind::kGaussian;

  std::string name() const { return to_string(kind) + "-" + to_string(atomic); }
};

inline Method method_from_string(const std::string& s) {
  auto dash = s.find('-');
  if (dash == std::string::npos) {
    throw DataError("method '" + s + "' is not of the form <kernel>-<atomic>");
  }
  Method m;
  m.kind = kernel_kind_from_string(s.substr(0, dash));
  m.atomic = atomic_kind_from_string(s.substr(dash + 1));
  return m;
}

inline std::vector<Method> methods_from_string(const std::string& list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    std::string tok = list.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!tok.empty()) out.push_back(method_from_string(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw DataError("empty method list");
  return out;
}

struct Protocol {
  int repetitions = 20;
  int train_per_class = 20;
  std::uint64_t seed = 0;
  ParamGrids grids;
  int cv_folds = 5;
  SvmParams svm;  // per-cell C is taken from the grid
  bool normalize = true;
  int bins = 4;  // histogram bins for chi2 feature extraction
  double range_lo = kDeclaredRangeLo, range_hi = kDeclaredRangeHi;
  int threads = 1;
};

struct RepetitionOutcome {
  Metrics metrics;
  double gamma = 0.0, beta = 0.0, C = 0.0;  // selected hyperparameters
  double cv_score = 0.0;
  std::uint64_t split_hash = 0;
};

struct MethodReport {
  Method method;
  std::vector<RepetitionOutcome> reps;
  Metrics mean, stddev;  // aggregates over repetitions (sample std)
  double gram_seconds = 0.0;   // Gram-grid computation (once per dataset)
  double train_seconds = 0.0;  // grid search + final training + prediction
};

struct PairwiseWilcoxon {
  std::size_t method_a = 0, method_b = 0;  // indices into ExperimentReport::methods
  WilcoxonResult test;                     // on per-repetition OA
  bool significant = false;                // p < 1e-4
};

inline constexpr double kSignificanceLevel = 1e-4;

struct ExperimentReport {
  std::vector<MethodReport> methods;
  std::vector<PairwiseWilcoxon> pairwise;
  int repetitions = 0;
  int train_per_class = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> labels;
  std::vector<int> class_counts;
  Protocol protocol;
};

namespace detail {

inline std::uint64_t split_hash(std::vector<int> train_rows) {
  std::sort(train_rows.begin(), train_rows.end());
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the index stream
  for (int v : train_rows) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= static_cast<std::uint64_t>((static_cast<std::uint32_t>(v) >> (8 * byte)) & 0xff);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

// Stratified split for one repetition: the first train_per_class of each
// class's seeded shuffle train, the remainder test. Depends on the protocol
// seed and repetition index only, never on the method — all methods see the
// identical split (matched samples).
inline void draw_split(const Dataset& ds, int train_per_class, std::uint64_t rep_seed,
                       std::vector<int>& train_rows, std::vector<int>& train_labels,
                       std::vector<int>& test_rows, std::vector<int>& test_labels) {
  train_rows.clear();
  train_labels.clear();
  test_rows.clear();
  test_labels.clear();
  Rng rng(rep_seed);
  int L = static_cast<int>(ds.labels.size());
  for (int c = 0; c < L; ++c) {
    std::vector<int> members;
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
      if (ds.items[i].label == c) members.push_back(static_cast<int>(i));
    }
    rng.shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k < static_cast<std::size_t>(train_per_class)) {
        train_rows.push_back(members[k]);
        train_labels.push_back(c);
      } else {
        test_rows.push_back(members[k]);
        test_labels.push_back(c);
      }
    }
  }
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void aggregate(MethodReport& mr) {
  auto acc = [&](auto getter, double& mean, double& sd) {
    double s = 0.0, s2 = 0.0;
    for (const auto& rep : mr.reps) {
      double v = getter(rep);
      s += v;
      s2 += v * v;
    }
    std::size_t n = mr.reps.size();
    mean = s / n;
    sd = n > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1))) : 0.0;
  };
  acc([](const RepetitionOutcome& r) { return r.metrics.oa; }, mr.mean.oa, mr.stddev.oa);
  acc([](const RepetitionOutcome& r) { return r.metrics.aa; }, mr.mean.aa, mr.stddev.aa);
  acc([](const RepetitionOutcome& r) { return r.metrics.kappa; }, mr.mean.kappa,
      mr.stddev.kappa);
}

}  // namespace detail

// Repeated-split protocol: for each repetition one stratified train/test
// split shared by all methods; per method, grid search on the training
// portion (stratified CV), final training with the selected cell, metrics on
// the test portion. Gram grids are computed once per method over the whole
// dataset and reused across repetitions and C values.
inline ExperimentReport run_experiment(const Dataset& ds, const std::vector<Method>& methods,
                                       const Protocol& protocol) {
  if (methods.empty()) throw DataError("run_experiment: no methods given");
  if (protocol.repetitions < 1) throw DataError("run_experiment: repetitions must be >= 1");
  int L = static_cast<int>(ds.labels.size());
  if (L < 2) throw DataError("run_experiment: need at least 2 classes");
  auto counts = ds.class_counts();
  for (int c = 0; c < L; ++c) {
    if (counts[c] <= protocol.train_per_class) {
      throw DataError("run_experiment: class '" + ds.labels[c] + "' has " +
                      std::to_string(counts[c]) + " items, need > " +
                      std::to_string(protocol.train_per_class));
    }
  }

  // Feature extraction per atomic kind (skipped when the dataset already
  // carries features).
  std::map<int, Dataset> extracted;  // keyed by AtomicKind
  auto data_for = [&](AtomicKind ak) -> const Dataset& {
    if (ds.features_extracted) return ds;
    int key = static_cast<int>(ak);
    auto it = extracted.find(key);
    if (it != extracted.end()) return it->second;
    FeatureSpec spec;
    if (ak == AtomicKind::kChi2) {
      spec.mode = FeatureSpec::Mode::kHistogram;
      spec.bins = protocol.bins;
      spec.range_lo = protocol.range_lo;
      spec.range_hi = protocol.range_hi;
    } else {
      spec.mode = FeatureSpec::Mode::kMeanVariance;
    }
    return extracted.emplace(key, extract_dataset_features(ds, spec)).first->second;
  };

  ExperimentReport report;
  report.repetitions = protocol.repetitions;
  report.train_per_class = protocol.train_per_class;
  report.seed = protocol.seed;
  report.labels = ds.labels;
  report.class_counts = counts;
  report.protocol = protocol;

  // One Gram grid per method, over the full dataset.
  std::vector<std::vector<GramMatrix>> grids_per_method;
  std::vector<ParamGrids> search_grids;
  for (const Method& m : methods) {
    ParamGrids g = protocol.grids;
    if (m.kind == KernelKind::kRooted) {
      g.betas = {0.0};  // rel_size(root) = 1 makes beta inert for rooted kernels
    }
    auto t0 = std::chrono::steady_clock::now();
    grids_per_method.push_back(gram_matrix_grid(data_for(m.atomic), m.atomic, m.kind, g.gammas,
                                                g.betas, protocol.normalize, protocol.bins,
                                                protocol.threads));
    MethodReport mr;
    mr.method = m;
    mr.gram_seconds = detail::seconds_since(t0);
    report.methods.push_back(std::move(mr));
    search_grids.push_back(std::move(g));
  }

  std::vector<int> train_rows, train_labels, test_rows, test_labels;
  for (int rep = 0; rep < protocol.repetitions; ++rep) {
    std::uint64_t rep_seed = mix_seed(mix_seed(protocol.seed, 0x524550), rep);
    detail::draw_split(ds, protocol.train_per_class, rep_seed, train_rows, train_labels,
                       test_rows, test_labels);
    std::uint64_t hash = detail::split_hash(train_rows);
    std::uint64_t fold_seed = mix_seed(rep_seed, 0x464C44);

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      try {
        auto t0 = std::chrono::steady_clock::now();
        const auto& grams = grids_per_method[mi];
        auto best = grid_search(grams, search_grids[mi], train_rows, train_labels, L,
                                protocol.cv_folds, fold_seed, protocol.svm);
        const GramMatrix& g = grams[best.best_gram];
        SvmModel model = train(g, train_rows, train_labels, L, best.params);
        auto pred = predict(model, g, train_rows, test_rows);
        ConfusionMatrix cm(ds.labels);
        for (std::size_t t = 0; t < pred.size(); ++t) cm.add(test_labels[t], pred[t]);
        RepetitionOutcome out;
        out.metrics = metrics(cm);
        out.gamma = best.config.gamma;
        out.beta = best.config.beta;
        out.C = best.params.C;
        out.cv_score = best.best_score;
        out.split_hash = hash;
        report.methods[mi].reps.push_back(out);
        report.methods[mi].train_seconds += detail::seconds_since(t0);
      } catch (const std::exception& e) {
        throw DataError("repetition " + std::to_string(rep) + ", method '" +
                        methods[mi].name() + "': " + e.what());
      }
    }
  }

  for (auto& mr : report.methods) detail::aggregate(mr);

  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      std::vector<double> oa_i, oa_j;
      for (int r = 0; r < protocol.repetitions; ++r) {
        oa_i.push_back(report.methods[i].reps[r].metrics.oa);
        oa_j.push_back(report.methods[j].reps[r].metrics.oa);
      }
      PairwiseWilcoxon pw;
      pw.method_a = i;
      pw.method_b = j;
      pw.test = wilcoxon_signed_rank(oa_i, oa_j);
      pw.significant = pw.test.sufficient && pw.test.p < kSignificanceLevel;
      report.pairwise.push_back(pw);
    }
  }
  return report;
}

inline nlohmann::ordered_json report_to_json(const ExperimentReport& rep) {
  using json = nlohmann::ordered_json;
  json j;
  j["protocol"] = {{"repetitions", rep.repetitions},
                   {"train_per_class", rep.train_per_class},
                   {"seed", rep.seed},
                   {"cv_folds", rep.protocol.cv_folds},
                   {"normalize", rep.protocol.normalize},
                   {"bins", rep.protocol.bins},
                   {"grids",
                    {{"gamma", rep.protocol.grids.gammas},
                     {"C", rep.protocol.grids.cs},
                     {"beta", rep.protocol.grids.betas}}}};
  j["dataset"] = {{"classes", rep.labels}, {"class_counts", rep.class_counts}};
  j["methods"] = json::array();
  for (const auto& m : rep.methods) {
    json jm;
    jm["name"] = m.method.name();
    jm["kernel"] = to_string(m.method.kind);
    jm["atomic"] = to_string(m.method.atomic);
    jm["mean"] = {{"oa", m.mean.oa}, {"aa", m.mean.aa}, {"kappa", m.mean.kappa}};
    jm["std"] = {{"oa", m.stddev.oa}, {"aa", m.stddev.aa}, {"kappa", m.stddev.kappa}};
    jm["gram_seconds"] = m.gram_seconds;
    jm["train_seconds"] = m.train_seconds;
    jm["repetitions"] = json::array();
    char hashbuf[19];
    for (const auto& r : m.reps) {
      std::snprintf(hashbuf, sizeof(hashbuf), "0x%016llx",
                    static_cast<unsigned long long>(r.split_hash));
      jm["repetitions"].push_back({{"oa", r.metrics.oa},
                                   {"aa", r.metrics.aa},
                                   {"kappa", r.metrics.kappa},
                                   {"gamma", r.gamma},
                                   {"beta", r.beta},
                                   {"C", r.C},
                                   {"cv_score", r.cv_score},
                                   {"split_hash", hashbuf}});
    }
    j["methods"].push_back(std::move(jm));
  }
  j["wilcoxon"] = json::array();
  for (const auto& pw : rep.pairwise) {
    json jp;
    jp["method_a"] = rep.methods[pw.method_a].method.name();
    jp["method_b"] = rep.methods[pw.method_b].method.name();
    jp["sufficient"] = pw.test.sufficient;
    if (pw.test.sufficient) {
      jp["n"] = pw.test.n;
      jp["statistic"] = pw.test.statistic;
      jp["p"] = pw.test.p;
      jp["significant"] = pw.significant;
    } else {
      jp["result"] = "insufficient data";
    }
    j["wilcoxon"].push_back(std::move(jp));
  }
  return j;
}

inline void write_report_json(std::ostream& out, const ExperimentReport& rep) {
  out << report_to_json(rep).dump(2) << '\n';
}

// Tabular summary, one row per method.
inline void write_report_csv(std::ostream& out, const ExperimentReport& rep) {
  out << "method,mean_oa,std_oa,mean_aa,std_aa,mean_kappa,std_kappa,gram_seconds,train_"
         "seconds\n";
  char buf[256];
  for (const auto& m : rep.methods) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f,%.3f\n",
                  m.method.name().c_str(), m.mean.oa, m.stddev.oa, m.mean.aa, m.stddev.aa,
                  m.mean.kappa, m.stddev.kappa, m.gram_seconds, m.train_seconds);
    out << buf;
  }
}

// One experiment per dataset of a distortion suite; returns the reports in
// ratio order (parallel to `ratios`).
inline std::vector<ExperimentReport> robustness_curve(const std::vector<Dataset>& suite,
                                                      const std::vector<double>& ratios,
                                                      const std::vector<Method>& methods,
                                                      const Protocol& protocol) {
  if (suite.size() != ratios.size()) {
    throw DataError("robustness_curve: suite and ratio list differ in length");
  }
  std::vector<ExperimentReport> out;
  out.reserve(suite.size());
  for (const auto& ds : suite) out.push_back(run_experiment(ds, methods, protocol));
  return out;
}

// Plot data: ratio, method, mean OA, std OA.
inline void write_curve_csv(std::ostream& out, const std::vector<double>& ratios,
                            const std::vector<ExperimentReport>& reports) {
  out << "ratio,method,mean_oa,std_oa\n";
  char buf[160];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& m : reports[i].methods) {
      std::snprintf(buf, sizeof(buf), "%g,%s,%.6f,%.6f\n", ratios[i], m.method.name().c_str(),
                    m.mean.oa, m.stddev.oa);
      out << buf;
    }
  }
}

}  // namespace spk
