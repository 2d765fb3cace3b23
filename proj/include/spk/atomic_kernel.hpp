#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "spk/errors.hpp"
#include "spk/tree.hpp"

namespace spk {

enum class AtomicKind { kGaussian, kChi2, kDelta };

inline std::string to_string(AtomicKind k) {
  switch (k) {
    case AtomicKind::kGaussian: return "gaussian";
    case AtomicKind::kChi2: return "chi2";
    case AtomicKind::kDelta: return "delta";
  }
  return "?";
}

inline AtomicKind atomic_kind_from_string(const std::string& s) {
  if (s == "gaussian") return AtomicKind::kGaussian;
  if (s == "chi2") return AtomicKind::kChi2;
  if (s == "delta") return AtomicKind::kDelta;
  throw DataError("unknown atomic kernel '" + s + "'");
}

// Everything needed to evaluate one node-vs-node kernel value.
struct KernelConfig {
  AtomicKind atomic = AtomicKind::kGaussian;
  double gamma = 1.0;  // RBF width; gamma = 0 turns the RBF into counting
  double beta = 0.0;   // exponent of the relative-size weight; 0 disables it
  bool normalize = false;
  int bins = 4;  // histogram bin count (relevant with histogram features)

  void check() const {
    if (gamma < 0.0) throw DataError("gamma must be >= 0");
    if (beta < 0.0) throw DataError("beta must be >= 0");
    if (bins < 1) throw DataError("bins must be >= 1");
  }
};

inline void to_json(nlohmann::ordered_json& j, const KernelConfig& c) {
  j = nlohmann::ordered_json{{"atomic", to_string(c.atomic)},
                             {"gamma", c.gamma},
                             {"beta", c.beta},
                             {"normalize", c.normalize},
                             {"bins", c.bins}};
}

inline void from_json(const nlohmann::json& j, KernelConfig& c) {
  c.atomic = atomic_kind_from_string(j.at("atomic").get<std::string>());
  c.gamma = j.at("gamma").get<double>();
  c.beta = j.at("beta").get<double>();
  c.normalize = j.value("normalize", false);
  c.bins = j.value("bins", 4);
  c.check();
}

// Squared Euclidean distance.
inline double gaussian_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DataError("gaussian_distance: dimension mismatch (" + std::to_string(x.size()) +
                    " vs " + std::to_string(y.size()) + ")");
  }
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double diff = x[j] - y[j];
    d += diff * diff;
  }
  return d;
}

// Chi-squared distance sum_j (x_j - y_j)^2 / (x_j + y_j), with 0/0 := 0.
// Negative entries are invalid (the distance assumes nonnegative features,
// e.g. histograms).
inline double chi2_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DataError("chi2_distance: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  }
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0.0 || y[j] < 0.0) {
      throw DataError("chi2_distance: negative feature entry");
    }
    double denom = x[j] + y[j];
    if (denom == 0.0) continue;
    double diff = x[j] - y[j];
    d += diff * diff / denom;
  }
  return d;
}

// exp(-gamma * d). At gamma = 0 this is exactly 1 for any finite d (IEEE
// exp(-0.0) == 1.0), which is what makes the subpath-counting identity exact.
inline double rbf(double distance, double gamma) { return std::exp(-gamma * distance); }

inline bool features_equal(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != y[j]) return false;
  }
  return true;
}

// Node-vs-node kernel value: rel-size weight times the atomic similarity.
// The delta atomic compares feature vectors bitwise (1 if equal, else 0) and
// ignores gamma.
inline double atomic(const Node& n, const Node& m, const KernelConfig& cfg) {
  double w = 1.0;
  if (cfg.beta != 0.0) {
    w = std::pow(n.rel_size, cfg.beta) * std::pow(m.rel_size, cfg.beta);
  }
  switch (cfg.atomic) {
    case AtomicKind::kGaussian:
      return w * rbf(gaussian_distance(n.features, m.features), cfg.gamma);
    case AtomicKind::kChi2:
      return w * rbf(chi2_distance(n.features, m.features), cfg.gamma);
    case AtomicKind::kDelta:
      return w * (features_equal(n.features, m.features) ? 1.0 : 0.0);
  }
  return 0.0;
}

}  // namespace spk
