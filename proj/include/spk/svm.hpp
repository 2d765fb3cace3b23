#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "spk/errors.hpp"
#include "spk/gram.hpp"
#include "spk/rng.hpp"

namespace spk {

struct SvmParams {
  double C = 1.0;
  double kkt_tolerance = 1e-3;
  long max_iterations = 1000000;

  void check() const {
    if (C <= 0.0) throw DataError("C must be > 0");
    if (kkt_tolerance <= 0.0) throw DataError("kkt_tolerance must be > 0");
    if (max_iterations <= 0) throw DataError("max_iterations must be > 0");
  }
};

// One soft-margin binary machine. `support` holds positions within the item
// list the machine was trained on; `coef` the matching alpha_i * y_i.
struct BinarySvm {
  std::vector<int> support;
  std::vector<double> coef;
  double bias = 0.0;
  int label_pos = -1;  // class index mapped to +1
  int label_neg = -1;  // class index mapped to -1

  // kernel_row[i] = K(test item, training item i), same item order as in
  // training.
  double decision(const std::vector<double>& kernel_row) const {
    double f = bias;
    for (std::size_t s = 0; s < support.size(); ++s) f += coef[s] * kernel_row[support[s]];
    return f;
  }
};

namespace detail {

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;
  long iterations = 0;
  double kkt_violation = 0.0;
};

// Solves min ½ αᵀQα − eᵀα, 0 ≤ α ≤ C, yᵀα = 0 with Q_ij = y_i y_j K_ij,
// by sequential minimal optimization on the maximal-violating pair:
//   i = argmax_{t ∈ I_up} −y_t G_t,  j = argmin_{t ∈ I_low} −y_t G_t,
// stopping when the violation m(α) − M(α) drops to `kkt_tolerance`. The
// two-variable step moves along d_i = y_i, d_j = −y_j, which preserves yᵀα
// and has curvature K_ii + K_jj − 2 K_ij independent of the signs.
inline SmoResult solve_smo(const std::vector<double>& K, const std::vector<int>& y,
                           const SvmParams& prm) {
  prm.check();
  std::size_t n = y.size();
  if (K.size() != n * n) throw DataError("train_binary: gram size does not match labels");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw DataError("train_binary: labels must be +1 or -1");
  }
  if (!pos || !neg) throw DataError("train_binary: need at least one item per sign");

  const double C = prm.C;
  const double inf = std::numeric_limits<double>::infinity();
  SmoResult r;
  r.alpha.assign(n, 0.0);
  std::vector<double> G(n, -1.0);  // gradient of the dual at alpha = 0

  for (long it = 0;; ++it) {
    int i = -1, j = -1;
    double m = -inf, M = inf;
    for (std::size_t t = 0; t < n; ++t) {
      double v = -y[t] * G[t];
      bool up = (y[t] == 1 && r.alpha[t] < C) || (y[t] == -1 && r.alpha[t] > 0.0);
      bool low = (y[t] == -1 && r.alpha[t] < C) || (y[t] == 1 && r.alpha[t] > 0.0);
      if (up && v > m) {
        m = v;
        i = static_cast<int>(t);
      }
      if (low && v < M) {
        M = v;
        j = static_cast<int>(t);
      }
    }
    r.kkt_violation = m - M;
    r.iterations = it;
    if (!(r.kkt_violation > prm.kkt_tolerance)) break;
    if (it >= prm.max_iterations) {
      throw ConvergenceError("SVM solver hit max_iterations (" +
                             std::to_string(prm.max_iterations) + "); KKT violation " +
                             std::to_string(r.kkt_violation) + " > tolerance " +
                             std::to_string(prm.kkt_tolerance));
    }

    double quad = K[i * n + i] + K[j * n + j] - 2.0 * K[i * n + j];
    if (quad <= 0.0) quad = 1e-12;
    double lambda = (m - M) / quad;
    double di = y[i], dj = -y[j];
    // Box limits along the direction; a bound-limited step lands exactly on
    // the bound so working-set eligibility flips cleanly.
    double li = di > 0 ? C - r.alpha[i] : r.alpha[i];
    double lj = dj > 0 ? C - r.alpha[j] : r.alpha[j];
    lambda = std::min({lambda, li, lj});
    r.alpha[i] += lambda * di;
    r.alpha[j] += lambda * dj;
    if (lambda == li) r.alpha[i] = di > 0 ? C : 0.0;
    if (lambda == lj) r.alpha[j] = dj > 0 ? C : 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += lambda * y[t] * (K[t * n + i] - K[t * n + j]);
    }
  }

  // Bias from free support vectors (average of y·G there); midpoint of the
  // feasibility interval when none are free.
  double ub = inf, lb = -inf, sum_free = 0.0;
  int nr_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    double yg = y[t] * G[t];
    if (r.alpha[t] >= C) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (r.alpha[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++nr_free;
      sum_free += yg;
    }
  }
  r.rho = nr_free > 0 ? sum_free / nr_free : (ub + lb) / 2.0;
  return r;
}

// Dense sub-Gram over `idx` rows/columns.
inline std::vector<double> subgram(const GramMatrix& g, const std::vector<int>& idx) {
  std::size_t k = idx.size();
  std::vector<double> out(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) out[a * k + b] = g.at(idx[a], idx[b]);
  }
  return out;
}

}  // namespace detail

// Trains one binary machine on a dense k×k kernel matrix with ±1 labels.
inline BinarySvm train_binary(const std::vector<double>& gram, const std::vector<int>& y,
                              const SvmParams& params) {
  auto r = detail::solve_smo(gram, y, params);
  BinarySvm m;
  m.bias = -r.rho;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (r.alpha[t] > 0.0) {
      m.support.push_back(static_cast<int>(t));
      m.coef.push_back(r.alpha[t] * y[t]);
    }
  }
  return m;
}

// One-vs-one multiclass model over a fixed training-item order.
struct SvmModel {
  struct Machine {
    int class_a = -1, class_b = -1;
    std::vector<int> items;  // positions within the training list
    BinarySvm svm;
  };
  std::vector<Machine> machines;
  int num_classes = 0;
};

// `train_rows` are row indices of `gram` for the training items;
// `train_labels` the class index of each. One machine per unordered class
// pair, trained on that pair's items; +1 is the smaller class index.
inline SvmModel train(const GramMatrix& gram, const std::vector<int>& train_rows,
                      const std::vector<int>& train_labels, int num_classes,
                      const SvmParams& params) {
  if (train_rows.size() != train_labels.size()) {
    throw DataError("train: labels do not match training indices");
  }
  if (num_classes < 2) throw DataError("train: need at least 2 classes");
  SvmModel model;
  model.num_classes = num_classes;
  for (int a = 0; a < num_classes; ++a) {
    for (int b = a + 1; b < num_classes; ++b) {
      SvmModel::Machine mc;
      mc.class_a = a;
      mc.class_b = b;
      std::vector<int> rows;
      std::vector<int> y;
      for (std::size_t t = 0; t < train_rows.size(); ++t) {
        if (train_labels[t] == a || train_labels[t] == b) {
          mc.items.push_back(static_cast<int>(t));
          rows.push_back(train_rows[t]);
          y.push_back(train_labels[t] == a ? 1 : -1);
        }
      }
      bool has_a = std::find(y.begin(), y.end(), 1) != y.end();
      bool has_b = std::find(y.begin(), y.end(), -1) != y.end();
      if (!has_a || !has_b) {
        throw DataError("train: class " + std::to_string(has_a ? b : a) +
                        " has no training items");
      }
      mc.svm = train_binary(detail::subgram(gram, rows), y, params);
      mc.svm.label_pos = a;
      mc.svm.label_neg = b;
      model.machines.push_back(std::move(mc));
    }
  }
  return model;
}

// Predicts by majority vote; ties go to the lowest class index.
// kernel_rows[t][i] = K(test item t, training item i) in the training order
// used by train().
inline std::vector<int> predict(const SvmModel& model,
                                const std::vector<std::vector<double>>& kernel_rows,
                                std::size_t num_train) {
  std::vector<int> out;
  out.reserve(kernel_rows.size());
  std::vector<double> machine_row;
  for (const auto& row : kernel_rows) {
    if (row.size() != num_train) {
      throw DataError("predict: kernel row length " + std::to_string(row.size()) +
                      " does not match training-set size " + std::to_string(num_train));
    }
    std::vector<int> votes(model.num_classes, 0);
    for (const auto& mc : model.machines) {
      machine_row.clear();
      for (int item : mc.items) machine_row.push_back(row[item]);
      double f = mc.svm.decision(machine_row);
      ++votes[f > 0.0 ? mc.svm.label_pos : mc.svm.label_neg];
    }
    out.push_back(static_cast<int>(
        std::max_element(votes.begin(), votes.end()) - votes.begin()));
  }
  return out;
}

// Convenience: builds kernel_rows from a full Gram matrix.
inline std::vector<int> predict(const SvmModel& model, const GramMatrix& gram,
                                const std::vector<int>& train_rows,
                                const std::vector<int>& test_rows) {
  std::vector<std::vector<double>> rows;
  rows.reserve(test_rows.size());
  for (int t : test_rows) {
    std::vector<double> r(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) r[i] = gram.at(t, train_rows[i]);
    rows.push_back(std::move(r));
  }
  return predict(model, rows, train_rows.size());
}

// Hyperparameter search over (gamma, beta, C).
struct ParamGrids {
  std::vector<double> gammas{0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  std::vector<double> cs{1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> betas{0.0, 0.25, 0.5, 0.75, 1.0};
};

struct GridCell {
  double gamma = 0.0, beta = 0.0, C = 0.0;
  double mean_accuracy = 0.0, std_accuracy = 0.0;
};

struct GridSearchResult {
  KernelConfig config;   // copied from the winning Gram's fingerprint
  SvmParams params;      // winning C, with the caller's tolerance/iteration cap
  double best_score = -1.0;
  std::size_t best_gram = 0;  // index into the (gamma, beta) Gram list
  std::vector<GridCell> table;
};

// Stratified fold assignment: per class, seeded shuffle then round-robin.
// Returns fold index per training position.
inline std::vector<int> stratified_folds(const std::vector<int>& labels, int num_classes,
                                         int folds, std::uint64_t seed) {
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  Rng rng(seed);
  std::vector<int> fold(labels.size(), 0);
  for (int c = 0; c < num_classes; ++c) {
    std::vector<int> members;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (labels[t] == c) members.push_back(static_cast<int>(t));
    }
    rng.shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      fold[members[k]] = static_cast<int>(k % folds);
    }
  }
  return fold;
}

// Scores every (gamma, beta, C) cell by stratified k-fold cross-validation on
// the training items only. `grams` must hold one matrix per (gamma, beta) in
// gamma-major order, as produced by gram_matrix_grid with the same grids.
// Each (gamma, beta) Gram is reused across all C values. Best cell = highest
// mean CV accuracy. Small training sets saturate the CV score — whole regions
// tie at the maximum — so ties go to the cell whose grid neighborhood scores
// best (the interior of a plateau generalizes better than its edge); any
// remaining ties prefer smaller C, then gamma, then beta.
inline GridSearchResult grid_search(const std::vector<GramMatrix>& grams,
                                    const ParamGrids& grids,
                                    const std::vector<int>& train_rows,
                                    const std::vector<int>& train_labels, int num_classes,
                                    int folds, std::uint64_t fold_seed,
                                    const SvmParams& base_params) {
  if (grids.gammas.empty() || grids.betas.empty() || grids.cs.empty()) {
    throw DataError("grid_search: empty hyperparameter grid");
  }
  if (grams.size() != grids.gammas.size() * grids.betas.size()) {
    throw DataError("grid_search: gram list does not match the (gamma, beta) grid");
  }
  auto fold_of = stratified_folds(train_labels, num_classes, folds, fold_seed);

  // Per fold: local train/validation split of the training items. The split
  // depends only on the fold assignment, not on the cell under evaluation.
  struct FoldData {
    std::vector<int> tr_pos, va_pos;  // positions in train_rows
  };
  std::vector<FoldData> fd(folds);
  for (std::size_t t = 0; t < train_rows.size(); ++t) {
    for (int f = 0; f < folds; ++f) {
      if (fold_of[t] == f) fd[f].va_pos.push_back(static_cast<int>(t));
      else fd[f].tr_pos.push_back(static_cast<int>(t));
    }
  }

  const std::size_t nb = grids.betas.size(), nc = grids.cs.size();
  GridSearchResult best;
  best.params = base_params;
  best.table.reserve(grids.gammas.size() * nb * nc);
  for (std::size_t gi = 0; gi < grids.gammas.size(); ++gi) {
    for (std::size_t bi = 0; bi < nb; ++bi) {
      const GramMatrix& g = grams[gi * nb + bi];
      for (double C : grids.cs) {
        SvmParams prm = base_params;
        prm.C = C;
        double sum = 0.0, sumsq = 0.0;
        int counted = 0;
        for (int f = 0; f < folds; ++f) {
          if (fd[f].va_pos.empty()) continue;
          std::vector<int> tr_rows, tr_labels;
          for (int p : fd[f].tr_pos) {
            tr_rows.push_back(train_rows[p]);
            tr_labels.push_back(train_labels[p]);
          }
          std::vector<int> va_rows, va_labels;
          for (int p : fd[f].va_pos) {
            va_rows.push_back(train_rows[p]);
            va_labels.push_back(train_labels[p]);
          }
          SvmModel model = train(g, tr_rows, tr_labels, num_classes, prm);
          auto pred = predict(model, g, tr_rows, va_rows);
          int correct = 0;
          for (std::size_t k = 0; k < pred.size(); ++k) {
            if (pred[k] == va_labels[k]) ++correct;
          }
          double acc = static_cast<double>(correct) / static_cast<double>(pred.size());
          sum += acc;
          sumsq += acc * acc;
          ++counted;
        }
        double mean = counted ? sum / counted : 0.0;
        double var = counted > 1 ? (sumsq - sum * sum / counted) / (counted - 1) : 0.0;
        best.table.push_back(GridCell{grids.gammas[gi], grids.betas[bi], C, mean,
                                      std::sqrt(std::max(0.0, var))});
      }
    }
  }

  // Selection pass. Fold accuracies are exact rationals over a handful of
  // denominators, so equal scores compare equal bitwise and ties are real.
  double top = -1.0;
  for (const auto& c : best.table) top = std::max(top, c.mean_accuracy);
  auto cell_at = [&](std::size_t gi, std::size_t bi, std::size_t ci) -> const GridCell& {
    return best.table[(gi * nb + bi) * nc + ci];
  };
  // Mean CV score over the surrounding lattice box (up to 3x3x3, clipped at
  // grid edges, center excluded).
  auto neighborhood = [&](std::size_t gi, std::size_t bi, std::size_t ci) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t g2 = gi > 0 ? gi - 1 : 0; g2 < std::min(gi + 2, grids.gammas.size()); ++g2) {
      for (std::size_t b2 = bi > 0 ? bi - 1 : 0; b2 < std::min(bi + 2, nb); ++b2) {
        for (std::size_t c2 = ci > 0 ? ci - 1 : 0; c2 < std::min(ci + 2, nc); ++c2) {
          if (g2 == gi && b2 == bi && c2 == ci) continue;
          sum += cell_at(g2, b2, c2).mean_accuracy;
          ++n;
        }
      }
    }
    return n ? sum / n : 0.0;
  };
  double best_nbh = -1.0;
  bool have = false;
  for (std::size_t gi = 0; gi < grids.gammas.size(); ++gi) {
    for (std::size_t bi = 0; bi < nb; ++bi) {
      for (std::size_t ci = 0; ci < nc; ++ci) {
        const GridCell& cell = cell_at(gi, bi, ci);
        if (cell.mean_accuracy != top) continue;
        double nbh = neighborhood(gi, bi, ci);
        bool better = !have || nbh > best_nbh;
        if (!better && nbh == best_nbh) {
          better = cell.C < best.params.C ||
                   (cell.C == best.params.C &&
                    (cell.gamma < best.config.gamma ||
                     (cell.gamma == best.config.gamma && cell.beta < best.config.beta)));
        }
        if (better) {
          have = true;
          best_nbh = nbh;
          best.best_score = top;
          best.config = grams[gi * nb + bi].config;
          best.params.C = cell.C;
          best.best_gram = gi * nb + bi;
        }
      }
    }
  }
  return best;
}

// Convenience wrapper that computes the (gamma, beta) Gram grid itself.
inline GridSearchResult grid_search(const Dataset& ds, KernelKind kind, AtomicKind atomic_kind,
                                    const ParamGrids& grids,
                                    const std::vector<int>& train_rows,
                                    const std::vector<int>& train_labels, int num_classes,
                                    int folds, std::uint64_t fold_seed,
                                    const SvmParams& base_params, bool normalize = true,
                                    int bins = 4, int threads = 1) {
  auto grams = gram_matrix_grid(ds, atomic_kind, kind, grids.gammas, grids.betas, normalize,
                                bins, threads);
  return grid_search(grams, grids, train_rows, train_labels, num_classes, folds, fold_seed,
                     base_params);
}

// Score-table CSV: gamma, beta, C, mean CV accuracy, std.
inline void write_grid_csv(std::ostream& out, const GridSearchResult& r) {
  out << "gamma,beta,C,mean_cv_accuracy,std_cv_accuracy\n";
  char buf[160];
  for (const auto& c : r.table) {
    std::snprintf(buf, sizeof(buf), "%g,%g,%g,%.6f,%.6f\n", c.gamma, c.beta, c.C,
                  c.mean_accuracy, c.std_accuracy);
    out << buf;
  }
}

}  // namespace spk
