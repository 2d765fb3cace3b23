#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "spk/atomic_kernel.hpp"
#include "spk/errors.hpp"
#include "spk/tree.hpp"

namespace spk {

namespace detail {

// Flattened read-only view of a tree: postorder, CSR children, contiguous
// feature rows. Built once per tree, shared by every pair evaluation.
struct TreeView {
  int n = 0;
  int root = 0;
  int dim = 0;
  std::vector<int> post;
  std::vector<int> child_begin;  // size n+1
  std::vector<int> child_list;
  std::vector<double> feat;  // n x dim, row-major
  std::vector<double> rel;
  std::string id;
};

inline TreeView make_view(const Tree& t) {
  TreeView v;
  v.n = t.size();
  v.root = t.root;
  v.id = t.id;
  if (t.root < 0) throw DataError("tree '" + t.id + "' not finalized");
  v.post = t.postorder();
  if (static_cast<int>(v.post.size()) != v.n) {
    throw DataError("tree '" + t.id + "' is not a connected rooted tree");
  }
  v.child_begin.assign(v.n + 1, 0);
  for (int i = 0; i < v.n; ++i) {
    v.child_begin[i + 1] = v.child_begin[i] + static_cast<int>(t.nodes[i].children.size());
  }
  v.child_list.reserve(v.child_begin[v.n]);
  for (int i = 0; i < v.n; ++i) {
    for (int c : t.nodes[i].children) v.child_list.push_back(c);
  }
  v.dim = -1;
  for (int i = 0; i < v.n; ++i) {
    if (!t.nodes[i].has_features) {
      throw DataError("tree '" + t.id + "': node '" + t.node_names[i] +
                      "' has no features (extract features first)");
    }
    int d = static_cast<int>(t.nodes[i].features.size());
    if (v.dim < 0) v.dim = d;
    if (d != v.dim) throw DataError("tree '" + t.id + "': inconsistent feature dimensions");
  }
  v.feat.resize(static_cast<std::size_t>(v.n) * v.dim);
  v.rel.resize(v.n);
  for (int i = 0; i < v.n; ++i) {
    std::copy(t.nodes[i].features.begin(), t.nodes[i].features.end(),
              v.feat.begin() + static_cast<std::size_t>(i) * v.dim);
    v.rel[i] = t.nodes[i].rel_size;
  }
  return v;
}

// Fills out[i*B.n+j] with the atomic's distance between node i of A and node
// j of B — squared Euclidean or chi-squared — or, for the delta atomic, with
// the 0/1 equality indicator. Distances depend on neither gamma nor beta, so
// one fill serves a whole hyperparameter grid.
inline void fill_distance(const TreeView& A, const TreeView& B, AtomicKind kind, double* out) {
  if (A.dim != B.dim && kind != AtomicKind::kDelta) {
    throw DataError("feature dimension mismatch between trees '" + A.id + "' (" +
                    std::to_string(A.dim) + ") and '" + B.id + "' (" + std::to_string(B.dim) +
                    ")");
  }
  int d = A.dim;
  for (int i = 0; i < A.n; ++i) {
    const double* x = A.feat.data() + static_cast<std::size_t>(i) * d;
    double* row = out + static_cast<std::size_t>(i) * B.n;
    for (int j = 0; j < B.n; ++j) {
      const double* y = B.feat.data() + static_cast<std::size_t>(j) * B.dim;
      switch (kind) {
        case AtomicKind::kGaussian: {
          double s = 0.0;
          for (int k = 0; k < d; ++k) {
            double diff = x[k] - y[k];
            s += diff * diff;
          }
          row[j] = s;
          break;
        }
        case AtomicKind::kChi2: {
          double s = 0.0;
          for (int k = 0; k < d; ++k) {
            if (x[k] < 0.0 || y[k] < 0.0) {
              throw DataError("chi2_distance: negative feature entry (trees '" + A.id +
                              "', '" + B.id + "')");
            }
            double denom = x[k] + y[k];
            if (denom != 0.0) {
              double diff = x[k] - y[k];
              s += diff * diff / denom;
            }
          }
          row[j] = s;
          break;
        }
        case AtomicKind::kDelta: {
          bool eq = A.dim == B.dim;
          for (int k = 0; eq && k < d; ++k) eq = x[k] == y[k];
          row[j] = eq ? 1.0 : 0.0;
          break;
        }
      }
    }
  }
}

// Distance matrix -> base similarity matrix (before rel-size weighting).
inline void fill_similarity(const double* dist, std::size_t count, AtomicKind kind, double gamma,
                            double* out) {
  if (kind == AtomicKind::kDelta) {
    std::copy(dist, dist + count, out);  // equality indicator is the similarity
  } else {
    for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(-gamma * dist[i]);
  }
}

// rel_size^beta per node; the per-pair weight factorizes, so these are
// precomputed per tree.
inline std::vector<double> size_weights(const TreeView& v, double beta) {
  std::vector<double> w(v.n, 1.0);
  if (beta != 0.0) {
    for (int i = 0; i < v.n; ++i) w[i] = std::pow(v.rel[i], beta);
  }
  return w;
}

// Scratch buffer for one pair evaluation; reusable across pairs/configs.
struct DpScratch {
  std::vector<double> p;
};

// The O(|T|·|T'|) evaluation. With k(i,j) = wA[i]·wB[j]·sim[i][j]:
//   P(i,j) = k(i,j)·(1 + Σ_{children pairs} P)   — path pairs starting at (i,j)
// Every pair of equal-length downward paths has a unique topmost node pair,
// so K = Σ_{(i,j)} P(i,j) over all node pairs. Children are iterated in
// canonical stored order, pairs row-major, so the result is bit-reproducible.
inline double dp_kernel(const TreeView& A, const TreeView& B, const double* sim,
                        const double* wA, const double* wB, DpScratch& s) {
  std::size_t cells = static_cast<std::size_t>(A.n) * B.n;
  s.p.resize(cells);
  double* P = s.p.data();
  const int* acb = A.child_begin.data();
  const int* acl = A.child_list.data();
  const int* bcb = B.child_begin.data();
  const int* bcl = B.child_list.data();

  double K = 0.0;
  for (int ia : A.post) {
    const int* ac = acl + acb[ia];
    int an = acb[ia + 1] - acb[ia];
    const double* simrow = sim + static_cast<std::size_t>(ia) * B.n;
    double* prow = P + static_cast<std::size_t>(ia) * B.n;
    double wa = wA[ia];
    for (int jb : B.post) {
      const int* bc = bcl + bcb[jb];
      int bn = bcb[jb + 1] - bcb[jb];
      double sp = 0.0;
      for (int u = 0; u < an; ++u) {
        const double* pc = P + static_cast<std::size_t>(ac[u]) * B.n;
        for (int v = 0; v < bn; ++v) sp += pc[bc[v]];
      }
      double p = wa * wB[jb] * simrow[jb] * (1.0 + sp);
      prow[jb] = p;
      K += p;
    }
  }

  return K;
}

// One-shot unnormalized evaluation (view construction and buffers included).
inline double subpath_unnormalized(const TreeView& A, const TreeView& B,
                                   const KernelConfig& cfg) {
  std::size_t cells = static_cast<std::size_t>(A.n) * B.n;
  std::vector<double> dist(cells), sim(cells);
  fill_distance(A, B, cfg.atomic, dist.data());
  fill_similarity(dist.data(), cells, cfg.atomic, cfg.gamma, sim.data());
  auto wA = size_weights(A, cfg.beta);
  auto wB = size_weights(B, cfg.beta);
  DpScratch s;
  return dp_kernel(A, B, sim.data(), wA.data(), wB.data(), s);
}

}  // namespace detail

// Fast evaluation of the tree kernel: sum over all pairs of equal-length
// downward paths of the product of node-wise atomic values, in O(|T|·|T'|)
// node-pair work. With cfg.normalize the value is divided by the geometric
// mean of the two self-kernels.
inline double subpath_kernel(const Tree& a, const Tree& b, const KernelConfig& cfg) {
  cfg.check();
  auto A = detail::make_view(a);
  auto B = detail::make_view(b);
  double k = detail::subpath_unnormalized(A, B, cfg);
  if (!cfg.normalize) return k;
  double ka = detail::subpath_unnormalized(A, A, cfg);
  double kb = detail::subpath_unnormalized(B, B, cfg);
  if (ka == 0.0 || kb == 0.0) {
    throw DataError("cannot normalize: self-kernel is zero for tree '" +
                    (ka == 0.0 ? a.id : b.id) + "'");
  }
  return k / std::sqrt(ka * kb);
}

// Brute-force reference: enumerates every downward path of both trees and
// sums the products of atomic values over same-length pairs, nodes aligned
// top to bottom. O(|T|²·|T'|²) — for small trees and cross-checks only.
inline double subpath_kernel_oracle(const Tree& a, const Tree& b, const KernelConfig& cfg) {
  cfg.check();
  // All downward paths, grouped by node count.
  auto enumerate = [](const Tree& t) {
    std::vector<std::vector<std::vector<int>>> by_len;  // by_len[L-1] = paths of L nodes
    std::vector<int> chain;
    // Depth-first over path extensions: a path is extended by any child of
    // its last node.
    auto extend = [&](auto&& self, int node) -> void {
      chain.push_back(node);
      if (by_len.size() < chain.size()) by_len.resize(chain.size());
      by_len[chain.size() - 1].push_back(chain);
      for (int c : t.nodes[node].children) self(self, c);
      chain.pop_back();
    };
    for (int v = 0; v < t.size(); ++v) extend(extend, v);
    return by_len;
  };
  auto pa = enumerate(a);
  auto pb = enumerate(b);
  double total = 0.0;
  std::size_t lmax = std::min(pa.size(), pb.size());
  for (std::size_t l = 0; l < lmax; ++l) {
    for (const auto& s : pa[l]) {
      for (const auto& sp : pb[l]) {
        double prod = 1.0;
        for (std::size_t i = 0; i <= l; ++i) {
          prod *= atomic(a.nodes[s[i]], b.nodes[sp[i]], cfg);
          if (prod == 0.0) break;
        }
        total += prod;
      }
    }
  }
  if (!cfg.normalize) return total;
  double ka = subpath_kernel_oracle(a, a, KernelConfig{cfg.atomic, cfg.gamma, cfg.beta, false, cfg.bins});
  double kb = subpath_kernel_oracle(b, b, KernelConfig{cfg.atomic, cfg.gamma, cfg.beta, false, cfg.bins});
  if (ka == 0.0 || kb == 0.0) {
    throw DataError("cannot normalize: self-kernel is zero for tree '" +
                    (ka == 0.0 ? a.id : b.id) + "'");
  }
  return total / std::sqrt(ka * kb);
}

// Baseline that looks at the roots only.
inline double rooted_kernel(const Tree& a, const Tree& b, const KernelConfig& cfg) {
  cfg.check();
  if (a.root < 0 || b.root < 0) throw DataError("rooted_kernel: tree not finalized");
  const Node& ra = a.nodes[a.root];
  const Node& rb = b.nodes[b.root];
  if (!ra.has_features || !rb.has_features) {
    throw DataError("rooted_kernel: root features missing (extract features first)");
  }
  double k = atomic(ra, rb, cfg);
  if (!cfg.normalize) return k;
  double ka = atomic(ra, ra, cfg);
  double kb = atomic(rb, rb, cfg);
  if (ka == 0.0 || kb == 0.0) {
    throw DataError("cannot normalize: root self-similarity is zero");
  }
  return k / std::sqrt(ka * kb);
}

// Census of a tree's downward paths: counts per length and (optionally) per
// feature-sequence signature. The signature census realizes the symbolic
// occurrence counts h(s, T); two paths share a signature iff their node
// feature vectors are pairwise equal, matching the delta atomic's notion of
// equality.
struct SubpathCensus {
  std::map<int, std::int64_t> by_length;
  std::map<std::string, std::int64_t> by_signature;
};

inline SubpathCensus subpath_census(const Tree& t, bool with_signatures = false) {
  SubpathCensus c;
  c.by_length = subpath_length_census(t);
  if (!with_signatures) return c;
  std::string key;
  auto append_features = [&](int node) {
    const auto& f = t.nodes[node].features;
    std::uint32_t d = static_cast<std::uint32_t>(f.size());
    key.append(reinterpret_cast<const char*>(&d), sizeof(d));
    for (double v : f) {
      if (v == 0.0) v = 0.0;  // collapse -0.0 onto +0.0, matching operator==
      key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  };
  std::vector<int> chain;
  auto extend = [&](auto&& self, int node, std::size_t key_len) -> void {
    append_features(node);
    ++c.by_signature[key];
    std::size_t here = key.size();
    for (int ch : t.nodes[node].children) self(self, ch, here);
    key.resize(key_len);
  };
  for (int v = 0; v < t.size(); ++v) {
    if (!t.nodes[v].has_features) {
      throw DataError("signature census requires features on every node");
    }
    key.clear();
    extend(extend, v, 0);
  }
  return c;
}

}  // namespace spk
