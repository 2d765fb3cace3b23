#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "spk/dataset_io.hpp"
#include "spk/errors.hpp"
#include "spk/rng.hpp"
#include "spk/tree.hpp"

namespace spk {

// Two-class benchmark families:
//   a  — only root-level statistics discriminate (leaf values A vs B)
//   b  — only structure discriminates (fanout ranges differ, values all A)
//   c  — only node compositions discriminate (mixed vs segregated parents)
//   c1 — scenario c with a fraction of leaves redrawn as outliers
//   c2 — scenario c with a fraction of each leaf type flipped to the other
enum class Scenario { kA, kB, kC, kC1, kC2 };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kA: return "a";
    case Scenario::kB: return "b";
    case Scenario::kC: return "c";
    case Scenario::kC1: return "c1";
    case Scenario::kC2: return "c2";
  }
  return "?";
}

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "a") return Scenario::kA;
  if (s == "b") return Scenario::kB;
  if (s == "c") return Scenario::kC;
  if (s == "c1") return Scenario::kC1;
  if (s == "c2") return Scenario::kC2;
  throw DataError("unknown scenario '" + s + "'");
}

struct ScenarioParams {
  Scenario scenario = Scenario::kA;
  int trees_per_class = 120;
  std::pair<int, int> leaf_range{16, 32};            // leaves per tree, inclusive
  std::pair<int, int> fanout_range_class1{2, 3};     // children per merge, inclusive
  std::pair<int, int> fanout_range_class2{5, 8};     // scenario b only
  double distortion_ratio = 0.0;  // outlier ratio (c1) or flip ratio (c2)
  int extra_noise_dims = 0;
  std::uint64_t seed = 0;
};

// Leaf-value intervals. The paper-style types use non-overlapping uniform
// intervals; the declared histogram range covers all of them.
inline constexpr double kTypeALo = 0.0, kTypeAHi = 1.0;
inline constexpr double kTypeBLo = 2.0, kTypeBHi = 3.0;
inline constexpr double kOutlierLo = 4.0, kOutlierHi = 5.0;
inline constexpr double kNoiseLo = 0.0, kNoiseHi = 5.0;
inline constexpr double kDeclaredRangeLo = 0.0, kDeclaredRangeHi = 5.0;

namespace detail {

inline void check_params(const ScenarioParams& p) {
  if (p.trees_per_class < 21) {
    throw DataError("trees_per_class must be >= 21 (20 training samples per class)");
  }
  auto range_ok = [](std::pair<int, int> r) { return r.first <= r.second; };
  if (!range_ok(p.leaf_range) || p.leaf_range.first < 2) {
    throw DataError("leaf_range must be a non-empty interval with at least 2 leaves");
  }
  if (!range_ok(p.fanout_range_class1) || p.fanout_range_class1.first < 2 ||
      !range_ok(p.fanout_range_class2) || p.fanout_range_class2.first < 2) {
    throw DataError("fanout ranges must be non-empty intervals with minimum >= 2");
  }
  if (p.extra_noise_dims < 0) throw DataError("extra_noise_dims must be >= 0");
  switch (p.scenario) {
    case Scenario::kC1:
      if (p.distortion_ratio < 0.0 || p.distortion_ratio > 1.0) {
        throw DataError("scenario c1 needs distortion_ratio in [0, 1]");
      }
      break;
    case Scenario::kC2:
      if (p.distortion_ratio < 0.0 || p.distortion_ratio > 0.5) {
        throw DataError("scenario c2 needs distortion_ratio in [0, 0.5]");
      }
      break;
    default:
      if (p.distortion_ratio != 0.0) {
        throw DataError("distortion_ratio must be 0 for scenarios a, b, c");
      }
  }
}

// Groups `level` into parents with fanout drawn from [lo, hi]; a would-be
// lone trailing child is absorbed into the last group. Parent nodes are
// appended to `t` and returned as the next level.
inline std::vector<int> merge_level(Tree& t, const std::vector<int>& level, Rng& rng, int lo,
                                    int hi) {
  std::vector<int> parents;
  std::size_t pos = 0;
  while (pos < level.size()) {
    std::size_t f = static_cast<std::size_t>(rng.uniform_int(lo, hi));
    std::size_t left = level.size() - pos;
    if (f > left) f = left;
    if (left - f == 1) ++f;
    int p = t.add_node(-1);
    for (std::size_t u = 0; u < f; ++u) t.nodes[level[pos + u]].parent = p;
    pos += f;
    parents.push_back(p);
  }
  return parents;
}

// Merges `level` upward until a single node remains and returns it. The
// caller may leave it as the root or attach it under another node.
inline int merge_to_root(Tree& t, std::vector<int> level, Rng& rng, int lo, int hi) {
  while (level.size() > 1) {
    rng.shuffle(level);
    level = merge_level(t, level, rng, lo, hi);
  }
  return level[0];
}

enum LeafType { kTypeA = 0, kTypeB = 1 };

inline double draw_typed_value(Rng& rng, int type) {
  return type == kTypeA ? rng.uniform(kTypeALo, kTypeAHi) : rng.uniform(kTypeBLo, kTypeBHi);
}

inline int add_leaf(Tree& t, Rng& value_rng, int type, int noise_dims,
                    std::vector<int>& leaf_types) {
  int idx = t.add_node(-1);
  Node& n = t.nodes[idx];
  n.leaf_values.push_back(draw_typed_value(value_rng, type));
  for (int d = 0; d < noise_dims; ++d) n.leaf_values.push_back(value_rng.uniform(kNoiseLo, kNoiseHi));
  n.has_leaf_values = true;
  leaf_types.push_back(type);
  return idx;
}

// Builds one tree. `class_idx` is 0 or 1; shape draws come from `shape_rng`
// (shared across classes for a given tree index), value draws from
// `value_rng` (class-specific).
inline Tree build_tree(const ScenarioParams& p, int class_idx, Rng& shape_rng, Rng& value_rng) {
  Tree t;
  std::vector<int> leaf_types;  // parallel to leaf creation order
  std::vector<int> leaf_nodes;

  bool paired = p.scenario == Scenario::kC || p.scenario == Scenario::kC1 ||
                p.scenario == Scenario::kC2;
  if (paired) {
    // Equal A/B counts under 2-child parents: m parents, 2m leaves, m even so
    // class 2 can split parents into A-only and B-only halves.
    int half_lo = (p.leaf_range.first + 3) / 4, half_hi = p.leaf_range.second / 4;
    if (half_lo > half_hi) {
      throw DataError("leaf_range too narrow for paired scenarios (needs a multiple of 4)");
    }
    int m = 2 * static_cast<int>(shape_rng.uniform_int(half_lo, half_hi));
    std::vector<int> parents;
    parents.reserve(m);
    for (int i = 0; i < m; ++i) {
      int ta, tb;
      if (class_idx == 0) {
        ta = kTypeA;  // every parent mixes the two types
        tb = kTypeB;
      } else {
        ta = tb = i < m / 2 ? kTypeA : kTypeB;  // segregated parents
      }
      int la = add_leaf(t, value_rng, ta, p.extra_noise_dims, leaf_types);
      int lb = add_leaf(t, value_rng, tb, p.extra_noise_dims, leaf_types);
      int par = t.add_node(-1);
      t.nodes[la].parent = par;
      t.nodes[lb].parent = par;
      parents.push_back(par);
      leaf_nodes.push_back(la);
      leaf_nodes.push_back(lb);
    }
    // Same-type leaves merge together at *every* level: each half of the
    // parent list (for class 2, the A-only half and the B-only half) grows
    // into its own subtree, and the two join only at the root. Class 1 splits
    // into the same halves with the same shape stream, so tree shape still
    // carries no class signal — but every class-2 internal node aggregates a
    // single leaf type, while class-1 internal nodes stay half-and-half.
    auto [lo, hi] = p.fanout_range_class1;
    int top_a = merge_to_root(t, {parents.begin(), parents.begin() + m / 2}, shape_rng, lo, hi);
    int top_b = merge_to_root(t, {parents.begin() + m / 2, parents.end()}, shape_rng, lo, hi);
    int root = t.add_node(-1);
    t.nodes[top_a].parent = root;
    t.nodes[top_b].parent = root;
  } else {
    int L = static_cast<int>(shape_rng.uniform_int(p.leaf_range.first, p.leaf_range.second));
    auto fanout = p.scenario == Scenario::kB && class_idx == 1 ? p.fanout_range_class2
                                                               : p.fanout_range_class1;
    // Scenario a discriminates on values (class 1 type A, class 2 type B);
    // scenario b keeps all values type A.
    int type = p.scenario == Scenario::kA && class_idx == 1 ? kTypeB : kTypeA;
    std::vector<int> level;
    level.reserve(L);
    for (int i = 0; i < L; ++i) {
      level.push_back(add_leaf(t, value_rng, type, p.extra_noise_dims, leaf_types));
    }
    leaf_nodes = level;
    merge_to_root(t, std::move(level), shape_rng, fanout.first, fanout.second);
  }

  // Distortions redraw values only, never structure.
  if (p.scenario == Scenario::kC1 && p.distortion_ratio > 0.0) {
    auto chosen = leaf_nodes;
    value_rng.shuffle(chosen);
    std::size_t k = static_cast<std::size_t>(
        std::llround(p.distortion_ratio * static_cast<double>(chosen.size())));
    chosen.resize(std::min(k, chosen.size()));
    std::sort(chosen.begin(), chosen.end());
    for (int v : chosen) t.nodes[v].leaf_values[0] = value_rng.uniform(kOutlierLo, kOutlierHi);
  } else if (p.scenario == Scenario::kC2 && p.distortion_ratio > 0.0) {
    for (int type : {kTypeA, kTypeB}) {
      std::vector<int> of_type;
      for (std::size_t i = 0; i < leaf_nodes.size(); ++i) {
        if (leaf_types[i] == type) of_type.push_back(leaf_nodes[i]);
      }
      value_rng.shuffle(of_type);
      std::size_t k = static_cast<std::size_t>(
          std::llround(p.distortion_ratio * static_cast<double>(of_type.size())));
      of_type.resize(std::min(k, of_type.size()));
      std::sort(of_type.begin(), of_type.end());
      int flipped = type == kTypeA ? kTypeB : kTypeA;
      for (int v : of_type) t.nodes[v].leaf_values[0] = draw_typed_value(value_rng, flipped);
    }
  }

  t.finalize();
  return t;
}

}  // namespace detail

// Generates the two-class dataset for `params`. Pure in all fields including
// the seed: identical params give a bit-identical dataset. Tree ids encode
// class and index only, so scenario variants at distortion 0 reproduce
// scenario c exactly.
inline Dataset generate(const ScenarioParams& params) {
  detail::check_params(params);
  Dataset ds;
  std::vector<std::string> labels;
  char idbuf[32];
  for (int cls = 0; cls < 2; ++cls) {
    for (int t = 0; t < params.trees_per_class; ++t) {
      // Shape sub-seed shared across classes; value sub-seed class-specific.
      Rng shape_rng(mix_seed(mix_seed(params.seed, 0x5348), t));
      Rng value_rng(mix_seed(mix_seed(mix_seed(params.seed, 0x56414C), cls), t));
      Tree tree = detail::build_tree(params, cls, shape_rng, value_rng);
      std::snprintf(idbuf, sizeof(idbuf), "%d-%03d", cls + 1, t);
      tree.id = idbuf;
      tree = compute_rel_sizes(std::move(tree), SizeMode::kLeafCount);
      ds.items.push_back({std::move(tree), -1});
      labels.push_back(std::to_string(cls + 1));
    }
  }
  finalize_dataset(ds, labels);
  return ds;
}

// One dataset per ratio, each under a seed derived from (base.seed, index).
inline std::vector<Dataset> scenario_suite(const ScenarioParams& base,
                                           const std::vector<double>& ratios) {
  if (ratios.empty()) throw DataError("scenario_suite needs at least one ratio");
  std::vector<Dataset> out;
  out.reserve(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    ScenarioParams p = base;
    p.distortion_ratio = ratios[i];
    p.seed = mix_seed(base.seed, i);
    out.push_back(generate(p));
  }
  return out;
}

}  // namespace spk
