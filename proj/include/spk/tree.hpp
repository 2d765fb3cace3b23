#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spk/errors.hpp"

namespace spk {

// How leaf observations are turned into per-node feature vectors.
struct FeatureSpec {
  enum class Mode { kMeanVariance, kHistogram };

  Mode mode = Mode::kMeanVariance;
  int bins = 4;  // histogram bins per dimension
  // Declared value range for histogram binning; must satisfy lo < hi when
  // mode == kHistogram. Out-of-range values are clamped into the end bins.
  double range_lo = 0.0;
  double range_hi = 0.0;

  // Extracted dimensionality for leaf observations of dimension d.
  int feature_dims(int leaf_dims) const {
    return mode == Mode::kMeanVariance ? 2 * leaf_dims : bins * leaf_dims;
  }
};

struct Node {
  int parent = -1;            // -1 only for the root
  std::vector<int> children;  // canonical order: ascending node index
  std::optional<double> size;               // absolute size (e.g. pixel count)
  std::vector<double> leaf_values;          // raw observations, leaves only
  bool has_leaf_values = false;             // [] is a valid observation vector
  std::vector<double> features;             // extracted feature vector
  bool has_features = false;
  double rel_size = 1.0;  // size relative to the root, in (0, 1]
};

// Rooted tree with dense integer node ids. Mutating helpers are meant for
// builders (parsers, generators); after finalize() a tree is treated as
// immutable by every kernel/Gram routine, which is what makes concurrent
// reads safe.
struct Tree {
  std::string id;
  std::vector<std::string> node_names;  // external node ids, parallel to nodes
  std::vector<Node> nodes;
  int root = -1;

  int size() const { return static_cast<int>(nodes.size()); }
  bool is_leaf(int i) const { return nodes[i].children.empty(); }

  // Appends a node; parent < 0 declares a root. Child links are rebuilt by
  // finalize(), so nodes may arrive in any order.
  int add_node(int parent, std::string name = {}) {
    int idx = size();
    Node n;
    n.parent = parent;
    nodes.push_back(std::move(n));
    node_names.push_back(name.empty() ? std::to_string(idx) : std::move(name));
    return idx;
  }

  // Rebuilds children lists in canonical (ascending-index) order and locates
  // the root. Canonical child order is what makes every kernel and feature
  // computation bit-identical under permutations of the input's child lists.
  void finalize() {
    root = -1;
    for (auto& n : nodes) n.children.clear();
    for (int i = 0; i < size(); ++i) {
      int p = nodes[i].parent;
      if (p < 0) {
        root = i;  // validate_tree reports duplicates
      } else if (p < size()) {
        nodes[p].children.push_back(i);
      }
    }
    for (auto& n : nodes) std::sort(n.children.begin(), n.children.end());
  }

  // Children-before-parents order; starts at the root, so unreachable nodes
  // are absent (validate_tree catches those).
  std::vector<int> postorder() const {
    std::vector<int> out;
    if (root < 0) return out;
    out.reserve(nodes.size());
    // Explicit stack; second visit emits the node.
    std::vector<std::pair<int, int>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, next_child] = stack.back();
      if (next_child < static_cast<int>(nodes[v].children.size())) {
        int c = nodes[v].children[next_child++];
        stack.emplace_back(c, 0);
      } else {
        out.push_back(v);
        stack.pop_back();
      }
    }
    return out;
  }

  // Depth of each node (root = 0); unreachable nodes get -1.
  std::vector<int> depths() const {
    std::vector<int> d(nodes.size(), -1);
    if (root < 0) return d;
    d[root] = 0;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : nodes[v].children) {
        d[c] = d[v] + 1;
        stack.push_back(c);
      }
    }
    return d;
  }
};

// Structural and invariant checks. Returns human-readable violations, one per
// finding; empty means valid. Never throws: callers decide severity.
inline std::vector<std::string> validate_tree(const Tree& t) {
  std::vector<std::string> out;
  auto bad = [&](std::string msg) { out.push_back("tree '" + t.id + "': " + std::move(msg)); };

  if (t.nodes.empty()) {
    bad("empty tree");
    return out;
  }
  int n = t.size();
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Node& nd = t.nodes[i];
    if (nd.parent < 0) {
      ++roots;
    } else if (nd.parent >= n) {
      bad("node '" + t.node_names[i] + "' has out-of-range parent");
    }
    for (int c : nd.children) {
      if (c < 0 || c >= n) {
        bad("node '" + t.node_names[i] + "' has out-of-range child");
      } else if (t.nodes[c].parent != i) {
        bad("child link " + t.node_names[i] + " -> " + t.node_names[c] +
            " not mirrored by parent link");
      }
    }
  }
  if (roots != 1) bad("expected exactly one root, found " + std::to_string(roots));
  if (t.root < 0 || t.root >= n || (roots == 1 && t.nodes[t.root].parent >= 0)) {
    bad("root index not set to the parentless node (tree not finalized?)");
    return out;  // traversals below need a sane root
  }

  // Reachability doubles as the cycle check: parent pointers give every node
  // at most one in-edge, so n reachable nodes == connected and acyclic.
  auto po = t.postorder();
  if (static_cast<int>(po.size()) != n) {
    bad("only " + std::to_string(po.size()) + " of " + std::to_string(n) +
        " nodes reachable from the root (cycle or disconnected component)");
    return out;
  }

  if (t.nodes[t.root].rel_size != 1.0) bad("root rel_size must be exactly 1");
  for (int i = 0; i < n; ++i) {
    const Node& nd = t.nodes[i];
    if (!(nd.rel_size > 0.0)) {
      bad("node '" + t.node_names[i] + "' has non-positive rel_size");
    }
    if (nd.parent >= 0 && nd.rel_size > t.nodes[nd.parent].rel_size) {
      bad("node '" + t.node_names[i] + "' rel_size exceeds its parent's");
    }
  }

  // Feature/observation presence: either every node carries features, or
  // every leaf carries leaf_values (pre-extraction state).
  bool all_features = std::all_of(t.nodes.begin(), t.nodes.end(),
                                  [](const Node& nd) { return nd.has_features; });
  if (!all_features) {
    std::size_t leaf_dim = 0;
    bool have_dim = false;
    for (int i = 0; i < n; ++i) {
      if (!t.is_leaf(i)) continue;
      if (!t.nodes[i].has_leaf_values) {
        bad("leaf '" + t.node_names[i] + "' has neither features nor leaf_values");
        continue;
      }
      if (!have_dim) {
        leaf_dim = t.nodes[i].leaf_values.size();
        have_dim = true;
      } else if (t.nodes[i].leaf_values.size() != leaf_dim) {
        bad("leaf '" + t.node_names[i] + "' observation dimension differs within the tree");
      }
    }
  }
  if (all_features) {
    std::size_t dim = t.nodes[t.root].features.size();
    for (int i = 0; i < n; ++i) {
      if (t.nodes[i].features.size() != dim) {
        bad("node '" + t.node_names[i] + "' feature dimension differs within the tree");
      }
    }
  }
  return out;
}

// How rel_size is derived.
enum class SizeMode {
  kLeafCount,  // descendant-leaf count relative to the root's
  kPixel,      // declared absolute sizes relative to the root's
};

// Fills Node::rel_size. Leaf-count mode needs no stored sizes; pixel mode
// requires a size on every node and a nonzero root size.
inline Tree compute_rel_sizes(Tree t, SizeMode mode) {
  if (t.root < 0) t.finalize();
  auto po = t.postorder();
  if (static_cast<int>(po.size()) != t.size()) {
    throw DataError("tree '" + t.id + "': cannot compute rel_size on a disconnected tree");
  }
  if (mode == SizeMode::kLeafCount) {
    std::vector<double> leaves(t.size(), 0.0);
    for (int v : po) {
      if (t.is_leaf(v)) {
        leaves[v] = 1.0;
      } else {
        for (int c : t.nodes[v].children) leaves[v] += leaves[c];
      }
    }
    double root_leaves = leaves[t.root];
    for (int i = 0; i < t.size(); ++i) t.nodes[i].rel_size = leaves[i] / root_leaves;
  } else {
    for (int i = 0; i < t.size(); ++i) {
      if (!t.nodes[i].size.has_value()) {
        throw DataError("tree '" + t.id + "': node '" + t.node_names[i] +
                        "' lacks a size (required for pixel rel_size)");
      }
    }
    double root_size = *t.nodes[t.root].size;
    if (root_size == 0.0) {
      throw DataError("tree '" + t.id + "': root size is zero");
    }
    for (int i = 0; i < t.size(); ++i) t.nodes[i].rel_size = *t.nodes[i].size / root_size;
  }
  return t;
}

// Computes per-node features from the leaf observations beneath each node.
// Mean-variance: [mean_1..mean_D, var_1..var_D] with population variance.
// Histogram: per dimension, `bins` equal-width bins over the declared range,
// out-of-range clamped into the end bins, normalized to sum 1 per dimension.
// Leaves under a node are gathered in canonical child order, so the result is
// invariant under child-list permutations of the input.
inline Tree extract_features(Tree t, const FeatureSpec& spec) {
  if (t.root < 0) t.finalize();
  if (spec.mode == FeatureSpec::Mode::kHistogram) {
    if (spec.bins < 1) throw DataError("histogram feature spec needs bins >= 1");
    if (!(spec.range_lo < spec.range_hi)) {
      throw DataError("histogram feature spec needs a declared range (lo < hi)");
    }
  }

  auto po = t.postorder();
  if (static_cast<int>(po.size()) != t.size()) {
    throw DataError("tree '" + t.id + "': cannot extract features on a disconnected tree");
  }

  int dims = -1;
  for (int v : po) {
    if (!t.is_leaf(v)) continue;
    if (!t.nodes[v].has_leaf_values) {
      throw DataError("tree '" + t.id + "': leaf '" + t.node_names[v] +
                      "' has no leaf_values; cannot extract features");
    }
    int d = static_cast<int>(t.nodes[v].leaf_values.size());
    if (dims < 0) dims = d;
    if (d != dims) {
      throw DataError("tree '" + t.id + "': leaf '" + t.node_names[v] +
                      "' observation dimension differs from other leaves");
    }
  }
  if (dims <= 0) {
    throw DataError("tree '" + t.id + "': leaf observations are empty");
  }

  // Per node, the list of descendant-leaf observation rows (canonical order).
  // Sums are accumulated bottom-up; variances need sums of squares as well.
  int n = t.size();
  std::vector<double> cnt(n, 0.0);
  std::vector<std::vector<double>> sum(n), sumsq(n);
  std::vector<std::vector<double>> hist(n);  // histogram counts, bins*dims
  bool mv = spec.mode == FeatureSpec::Mode::kMeanVariance;
  int out_dims = spec.feature_dims(dims);

  for (int v : po) {
    if (mv) {
      sum[v].assign(dims, 0.0);
      sumsq[v].assign(dims, 0.0);
    } else {
      hist[v].assign(out_dims, 0.0);
    }
    if (t.is_leaf(v)) {
      cnt[v] = 1.0;
      const auto& x = t.nodes[v].leaf_values;
      if (mv) {
        for (int j = 0; j < dims; ++j) {
          sum[v][j] = x[j];
          sumsq[v][j] = x[j] * x[j];
        }
      } else {
        double width = spec.range_hi - spec.range_lo;
        for (int j = 0; j < dims; ++j) {
          double rel = (x[j] - spec.range_lo) / width;
          int b = static_cast<int>(std::floor(rel * spec.bins));
          b = std::clamp(b, 0, spec.bins - 1);
          hist[v][j * spec.bins + b] += 1.0;
        }
      }
    } else {
      for (int c : t.nodes[v].children) {
        cnt[v] += cnt[c];
        if (mv) {
          for (int j = 0; j < dims; ++j) {
            sum[v][j] += sum[c][j];
            sumsq[v][j] += sumsq[c][j];
          }
        } else {
          for (int j = 0; j < out_dims; ++j) hist[v][j] += hist[c][j];
        }
      }
    }
    auto& f = t.nodes[v].features;
    f.assign(out_dims, 0.0);
    if (mv) {
      for (int j = 0; j < dims; ++j) {
        double mean = sum[v][j] / cnt[v];
        f[j] = mean;
        f[dims + j] = sumsq[v][j] / cnt[v] - mean * mean;
        if (f[dims + j] < 0.0) f[dims + j] = 0.0;  // FP guard; variance >= 0
      }
    } else {
      for (int j = 0; j < out_dims; ++j) f[j] = hist[v][j] / cnt[v];
    }
    t.nodes[v].has_features = true;
  }
  return t;
}

// Number of subpaths per length. A subpath of length L is a downward chain of
// L nodes; each node at depth d starts exactly one chain of every length up
// to d+1, so count[L] = #{nodes with depth >= L-1}.
inline std::map<int, std::int64_t> subpath_length_census(const Tree& t) {
  std::map<int, std::int64_t> census;
  auto d = t.depths();
  std::vector<std::int64_t> by_depth;
  for (int v = 0; v < t.size(); ++v) {
    if (d[v] < 0) continue;
    if (static_cast<int>(by_depth.size()) <= d[v]) by_depth.resize(d[v] + 1, 0);
    ++by_depth[d[v]];
  }
  std::int64_t at_least = 0;
  for (int depth = static_cast<int>(by_depth.size()) - 1; depth >= 0; --depth) {
    at_least += by_depth[depth];
    census[depth + 1] = at_least;  // nodes with depth >= L-1, L = depth+1
  }
  return census;
}

}  // namespace spk
