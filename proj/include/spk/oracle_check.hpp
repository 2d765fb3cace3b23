#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "spk/atomic_kernel.hpp"
#include "spk/rng.hpp"
#include "spk/subpath_kernel.hpp"
#include "spk/tree.hpp"

namespace spk {

// Random tree with attached parents (uniform over earlier nodes), extracted
// features in place, and leaf-count rel_sizes. With integer_features the
// feature entries are small integers, giving the delta atomic a nontrivial
// match structure.
inline Tree random_feature_tree(Rng& rng, int max_nodes, int dims, bool integer_features) {
  Tree t;
  int n = static_cast<int>(rng.uniform_int(1, max_nodes));
  t.add_node(-1);
  for (int i = 1; i < n; ++i) t.add_node(static_cast<int>(rng.uniform_int(0, i - 1)));
  t.finalize();
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) {
      double v = integer_features ? static_cast<double>(rng.uniform_int(0, 2))
                                  : rng.uniform(0.0, 2.0);
      t.nodes[i].features.push_back(v);
    }
    t.nodes[i].has_features = true;
  }
  return compute_rel_sizes(std::move(t), SizeMode::kLeafCount);
}

struct OracleCheckOptions {
  int max_nodes = 12;
  int cases = 200;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;  // relative to max(1, |oracle|)
};

struct OracleCheckResult {
  int cases_run = 0;
  int mismatches = 0;
  double max_rel_error = 0.0;
  std::string first_mismatch;  // description of the first failing case

  bool ok() const { return mismatches == 0; }
};

// Cross-checks the DP evaluation against the brute-force enumeration on
// random tree pairs, cycling through all three atomics, random gamma in
// [0, 5] and beta in {0, 0.5, 1}.
inline OracleCheckResult oracle_check(const OracleCheckOptions& opt) {
  OracleCheckResult res;
  for (int c = 0; c < opt.cases; ++c) {
    Rng rng(mix_seed(opt.seed, c));
    AtomicKind atomic_kind = static_cast<AtomicKind>(c % 3);
    bool integers = atomic_kind == AtomicKind::kDelta;
    int dims = static_cast<int>(rng.uniform_int(1, 3));
    Tree a = random_feature_tree(rng, opt.max_nodes, dims, integers);
    Tree b = random_feature_tree(rng, opt.max_nodes, dims, integers);
    a.id = "case" + std::to_string(c) + "-a";
    b.id = "case" + std::to_string(c) + "-b";

    KernelConfig cfg;
    cfg.atomic = atomic_kind;
    cfg.gamma = rng.uniform(0.0, 5.0);
    cfg.beta = 0.5 * static_cast<double>(rng.uniform_int(0, 2));
    cfg.normalize = false;

    double fast = subpath_kernel(a, b, cfg);
    double slow = subpath_kernel_oracle(a, b, cfg);
    double rel = std::fabs(fast - slow) / std::max(1.0, std::fabs(slow));
    res.max_rel_error = std::max(res.max_rel_error, rel);
    ++res.cases_run;
    if (rel > opt.tolerance) {
      ++res.mismatches;
      if (res.first_mismatch.empty()) {
        res.first_mismatch = "case " + std::to_string(c) + " (" + to_string(atomic_kind) +
                             ", gamma=" + std::to_string(cfg.gamma) +
                             ", beta=" + std::to_string(cfg.beta) + "): dp=" +
                             std::to_string(fast) + " oracle=" + std::to_string(slow);
      }
    }
  }
  return res;
}

}  // namespace spk
