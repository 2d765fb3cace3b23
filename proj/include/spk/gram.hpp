#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "spk/atomic_kernel.hpp"
#include "spk/dataset_io.hpp"
#include "spk/errors.hpp"
#include "spk/subpath_kernel.hpp"
#include "spk/tree.hpp"

namespace spk {

enum class KernelKind { kSubpath, kRooted };

inline std::string to_string(KernelKind k) {
  return k == KernelKind::kSubpath ? "subpath" : "rooted";
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "subpath") return KernelKind::kSubpath;
  if (s == "rooted") return KernelKind::kRooted;
  throw DataError("unknown kernel kind '" + s + "'");
}

struct GramMatrix {
  std::vector<std::string> item_ids;
  std::vector<double> values;  // n x n, row-major
  KernelConfig config;
  KernelKind kind = KernelKind::kSubpath;

  std::size_t n() const { return item_ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * n() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n() + j]; }
};

namespace detail {

inline void normalize_gram(GramMatrix& g) {
  std::size_t n = g.n();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = g.at(i, i);
    if (d == 0.0) {
      throw DataError("cannot normalize Gram matrix: self-kernel of item '" + g.item_ids[i] +
                      "' is zero");
    }
    f[i] = std::sqrt(d);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v = g.at(i, j) / (f[i] * f[j]);
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  }
}

}  // namespace detail

// Computes one Gram matrix per (gamma, beta) combination in a single pass
// over tree pairs. Distances depend on neither parameter, so each pair's
// distance matrix is computed once and shared across the whole grid — this is
// what makes grid search affordable. Workers process disjoint pairs of the
// upper triangle and write disjoint cells; results are independent of
// `threads`. Cell (i,j) is computed once and mirrored, so symmetry is exact.
inline std::vector<GramMatrix> gram_matrix_grid(const Dataset& ds, AtomicKind atomic_kind,
                                                KernelKind kind,
                                                const std::vector<double>& gammas,
                                                const std::vector<double>& betas, bool normalize,
                                                int bins = 4, int threads = 1) {
  if (ds.items.empty()) throw DataError("cannot compute a Gram matrix of an empty dataset");
  if (gammas.empty() || betas.empty()) throw DataError("empty hyperparameter grid");
  std::size_t n = ds.items.size();
  std::size_t n_cfg = gammas.size() * betas.size();

  std::vector<GramMatrix> grams(n_cfg);
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      GramMatrix& g = grams[gi * betas.size() + bi];
      g.kind = kind;
      g.config = KernelConfig{atomic_kind, gammas[gi], betas[bi], normalize, bins};
      g.config.check();
      g.item_ids.reserve(n);
      for (const auto& it : ds.items) g.item_ids.push_back(it.tree.id);
      g.values.assign(n * n, 0.0);
    }
  }

  std::vector<detail::TreeView> views;
  views.reserve(n);
  for (const auto& it : ds.items) views.push_back(detail::make_view(it.tree));

  if (kind == KernelKind::kRooted) {
    // Root-only kernel: distances between root features, no DP.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double dist;
        try {
          dist = 0.0;
          detail::TreeView ra, rb;  // single-node views of the roots
          const detail::TreeView &A = views[i], &B = views[j];
          std::vector<double> one(1);
          // Reuse fill_distance on 1x1 "trees" made of the two roots.
          ra.n = rb.n = 1;
          ra.dim = A.dim;
          rb.dim = B.dim;
          ra.id = A.id;
          rb.id = B.id;
          ra.feat.assign(A.feat.begin() + static_cast<std::size_t>(A.root) * A.dim,
                         A.feat.begin() + static_cast<std::size_t>(A.root + 1) * A.dim);
          rb.feat.assign(B.feat.begin() + static_cast<std::size_t>(B.root) * B.dim,
                         B.feat.begin() + static_cast<std::size_t>(B.root + 1) * B.dim);
          detail::fill_distance(ra, rb, atomic_kind, one.data());
          dist = one[0];
        } catch (const DataError& e) {
          throw DataError("pair ('" + ds.items[i].tree.id + "', '" + ds.items[j].tree.id +
                          "'): " + e.what());
        }
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
          double sim;
          detail::fill_similarity(&dist, 1, atomic_kind, gammas[gi], &sim);
          for (std::size_t bi = 0; bi < betas.size(); ++bi) {
            // rel_size(root) = 1, so beta never changes the root-only value.
            GramMatrix& g = grams[gi * betas.size() + bi];
            g.at(i, j) = sim;
            g.at(j, i) = sim;
          }
        }
      }
    }
  } else {
    // Per-tree size weights for each beta.
    std::vector<std::vector<std::vector<double>>> weights(betas.size());
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      weights[bi].reserve(n);
      for (const auto& v : views) weights[bi].push_back(detail::size_weights(v, betas[bi]));
    }

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }

    int max_n = 0;
    for (const auto& v : views) max_n = std::max(max_n, v.n);
    std::size_t max_cells = static_cast<std::size_t>(max_n) * max_n;

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;

    auto worker = [&]() {
      std::vector<double> dist(max_cells), sim(max_cells);
      detail::DpScratch scratch;
      for (;;) {
        std::size_t t = next.fetch_add(1);
        if (t >= pairs.size()) return;
        auto [i, j] = pairs[t];
        try {
          const detail::TreeView &A = views[i], &B = views[j];
          std::size_t cells = static_cast<std::size_t>(A.n) * B.n;
          detail::fill_distance(A, B, atomic_kind, dist.data());
          for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            detail::fill_similarity(dist.data(), cells, atomic_kind, gammas[gi], sim.data());
            for (std::size_t bi = 0; bi < betas.size(); ++bi) {
              double v = detail::dp_kernel(A, B, sim.data(), weights[bi][i].data(),
                                           weights[bi][j].data(), scratch);
              GramMatrix& g = grams[gi * betas.size() + bi];
              g.at(i, j) = v;
              g.at(j, i) = v;
            }
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) {
            try {
              throw;
            } catch (const DataError& e) {
              first_error = std::make_exception_ptr(
                  DataError("pair ('" + ds.items[i].tree.id + "', '" + ds.items[j].tree.id +
                            "'): " + e.what()));
            } catch (...) {
              first_error = std::current_exception();
            }
          }
          return;
        }
      }
    };

    int nw = std::max(1, threads);
    if (nw == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(nw);
      for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  if (normalize) {
    for (auto& g : grams) detail::normalize_gram(g);
  }
  return grams;
}

inline GramMatrix gram_matrix(const Dataset& ds, const KernelConfig& cfg, KernelKind kind,
                              int threads = 1) {
  auto grams = gram_matrix_grid(ds, cfg.atomic, kind, {cfg.gamma}, {cfg.beta}, cfg.normalize,
                                cfg.bins, threads);
  return std::move(grams[0]);
}

// CSV layout: a `# {json}` header carrying kind + config, one row of item
// ids, then n rows of n values at 17 significant digits (value-preserving
// for doubles).
inline void write_gram_csv(std::ostream& out, const GramMatrix& g) {
  nlohmann::ordered_json header;
  header["kind"] = to_string(g.kind);
  nlohmann::ordered_json cfg;
  to_json(cfg, g.config);
  header["config"] = cfg;
  out << "# " << header.dump() << '\n';
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (g.item_ids[i].find(',') != std::string::npos ||
        g.item_ids[i].find('\n') != std::string::npos) {
      throw DataError("item id '" + g.item_ids[i] + "' cannot appear in a CSV header");
    }
    out << (i ? "," : "") << g.item_ids[i];
  }
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", g.at(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

inline GramMatrix read_gram_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw DataError("Gram CSV: missing '# {json}' header line");
  }
  GramMatrix g;
  try {
    auto header = nlohmann::json::parse(line.substr(2));
    g.kind = kernel_kind_from_string(header.at("kind").get<std::string>());
    g.config = header.at("config").get<KernelConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("Gram CSV: bad header: ") + e.what());
  }
  if (!std::getline(in, line)) throw DataError("Gram CSV: missing item-id row");
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    g.item_ids.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  std::size_t n = g.item_ids.size();
  g.values.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw DataError("Gram CSV: expected " + std::to_string(n) + " value rows, got " +
                      std::to_string(i));
    }
    const char* p = line.c_str();
    for (std::size_t j = 0; j < n; ++j) {
      char* end = nullptr;
      double v = std::strtod(p, &end);
      if (end == p) throw DataError("Gram CSV: bad number in row " + std::to_string(i));
      g.values.push_back(v);
      p = end;
      if (*p == ',') ++p;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.at(i, j) != g.at(j, i)) {
        throw DataError("Gram CSV: matrix is not symmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
    }
  }
  return g;
}

}  // namespace spk
