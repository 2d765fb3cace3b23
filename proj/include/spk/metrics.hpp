#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "spk/errors.hpp"

namespace spk {

// Rows = true class, columns = predicted class.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::int64_t> counts;  // L x L, row-major

  explicit ConfusionMatrix(std::vector<std::string> label_names)
      : labels(std::move(label_names)), counts(labels.size() * labels.size(), 0) {}

  int num_classes() const { return static_cast<int>(labels.size()); }
  std::int64_t at(int t, int p) const { return counts[t * num_classes() + p]; }
  void add(int true_class, int predicted_class, std::int64_t k = 1) {
    counts[true_class * num_classes() + predicted_class] += k;
  }
  std::int64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }
};

struct Metrics {
  double oa = 0.0;     // overall accuracy
  double aa = 0.0;     // average (per-class) accuracy
  double kappa = 0.0;  // chance-corrected agreement
};

inline Metrics metrics(const ConfusionMatrix& cm) {
  int L = cm.num_classes();
  std::int64_t total = cm.total();
  if (total <= 0) throw DataError("metrics: empty confusion matrix");

  std::vector<std::int64_t> row(L, 0), col(L, 0);
  std::int64_t diag = 0;
  for (int t = 0; t < L; ++t) {
    for (int p = 0; p < L; ++p) {
      row[t] += cm.at(t, p);
      col[p] += cm.at(t, p);
    }
    diag += cm.at(t, t);
  }

  Metrics m;
  m.oa = static_cast<double>(diag) / static_cast<double>(total);

  double aa_sum = 0.0;
  for (int t = 0; t < L; ++t) {
    if (row[t] == 0) {
      throw DataError("metrics: class '" + cm.labels[t] + "' has no true items (AA undefined)");
    }
    aa_sum += static_cast<double>(cm.at(t, t)) / static_cast<double>(row[t]);
  }
  m.aa = aa_sum / L;

  double pe = 0.0;
  for (int c = 0; c < L; ++c) {
    pe += static_cast<double>(row[c]) / total * (static_cast<double>(col[c]) / total);
  }
  if (pe >= 1.0) {
    // Degenerate chance agreement: a single populated row/column pair.
    m.kappa = m.oa == 1.0 ? 1.0 : 0.0;
  } else {
    m.kappa = (m.oa - pe) / (1.0 - pe);
  }
  return m;
}

// Two-sided Wilcoxon signed-rank test for matched samples.
struct WilcoxonResult {
  bool sufficient = false;  // false: fewer than 5 nonzero differences
  int n = 0;                // nonzero differences used
  double statistic = 0.0;   // W+ = rank sum of positive differences
  double p = 1.0;
};

// Zero differences are dropped; |differences| are ranked with average ranks
// for ties. n < 20 uses the exact permutation distribution (tie-aware, via
// doubled ranks so half-integer average ranks stay integral); n >= 20 uses
// the normal approximation with tie-corrected variance and no continuity
// correction.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.size() != b.size()) throw DataError("wilcoxon_signed_rank: length mismatch");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    if (diff != 0.0) d.push_back(diff);
  }
  WilcoxonResult r;
  r.n = static_cast<int>(d.size());
  if (r.n < 5) return r;  // insufficient data
  r.sufficient = true;

  int n = r.n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return std::fabs(d[x]) < std::fabs(d[y]); });

  std::vector<double> rank(n, 0.0);
  std::vector<int> tie_sizes;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && std::fabs(d[order[j]]) == std::fabs(d[order[i]])) ++j;
    double avg = (i + 1 + j) / 2.0;  // average of ranks i+1 .. j
    for (int k = i; k < j; ++k) rank[order[k]] = avg;
    tie_sizes.push_back(j - i);
    i = j;
  }

  double w_plus = 0.0;
  for (int i = 0; i < n; ++i) {
    if (d[i] > 0.0) w_plus += rank[i];
  }
  r.statistic = w_plus;

  if (n < 20) {
    // Exact distribution of W+ over the 2^n sign assignments, on doubled
    // ranks (integers even with tied average ranks).
    int maxsum = n * (n + 1);  // doubled total rank sum
    std::vector<double> count(maxsum + 1, 0.0);
    count[0] = 1.0;
    for (int i = 0; i < n; ++i) {
      int rr = static_cast<int>(std::llround(2.0 * rank[i]));
      for (int s = maxsum; s >= rr; --s) count[s] += count[s - rr];
    }
    double total = std::ldexp(1.0, n);  // 2^n
    int w2 = static_cast<int>(std::llround(2.0 * w_plus));
    double le = 0.0, ge = 0.0;
    for (int s = 0; s <= maxsum; ++s) {
      if (s <= w2) le += count[s];
      if (s >= w2) ge += count[s];
    }
    r.p = std::min(1.0, 2.0 * std::min(le, ge) / total);
  } else {
    double mu = n * (n + 1) / 4.0;
    double var = n * (n + 1) * (2.0 * n + 1) / 24.0;
    for (int t : tie_sizes) {
      var -= (static_cast<double>(t) * t * t - t) / 48.0;
    }
    double z = (w_plus - mu) / std::sqrt(var);
    r.p = std::erfc(std::fabs(z) / std::sqrt(2.0));
  }
  return r;
}

}  // namespace spk
