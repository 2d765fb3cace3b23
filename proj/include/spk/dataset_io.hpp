#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spk/errors.hpp"
#include "spk/tree.hpp"

namespace spk {

struct DatasetItem {
  Tree tree;
  int label = -1;  // index into Dataset::labels
};

// A labelled tree collection. `labels` is the ordered class alphabet
// (lexicographically sorted), which fixes label indices, vote tie-breaking
// and report ordering independently of file order.
struct Dataset {
  std::vector<DatasetItem> items;
  std::vector<std::string> labels;
  bool features_extracted = false;
  int feature_dims = 0;  // valid when features_extracted
  int leaf_dims = 0;     // valid when raw observations are present

  const std::string& label_name(int idx) const { return labels[idx]; }

  std::vector<int> class_counts() const {
    std::vector<int> c(labels.size(), 0);
    for (const auto& it : items) ++c[it.label];
    return c;
  }
};

namespace detail {

inline bool tree_has_all_features(const Tree& t) {
  return std::all_of(t.nodes.begin(), t.nodes.end(),
                     [](const Node& n) { return n.has_features; });
}

inline void throw_violations(const std::vector<std::string>& violations) {
  if (violations.empty()) return;
  std::string msg = "invalid tree:";
  std::size_t shown = std::min<std::size_t>(violations.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + violations[i];
  if (violations.size() > shown) {
    msg += "\n  (+" + std::to_string(violations.size() - shown) + " more)";
  }
  throw DataError(msg);
}

}  // namespace detail

// Finishes a freshly built dataset: sorts the label alphabet, resolves label
// indices, validates every tree, and checks cross-tree consistency of
// feature/observation dimensionality. `raw_labels` holds one label string per
// item, parallel to `ds.items`.
inline void finalize_dataset(Dataset& ds, const std::vector<std::string>& raw_labels) {
  std::set<std::string> alphabet(raw_labels.begin(), raw_labels.end());
  ds.labels.assign(alphabet.begin(), alphabet.end());
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    auto pos = std::lower_bound(ds.labels.begin(), ds.labels.end(), raw_labels[i]);
    ds.items[i].label = static_cast<int>(pos - ds.labels.begin());
  }

  std::set<std::string> seen_ids;
  for (const auto& it : ds.items) {
    if (!seen_ids.insert(it.tree.id).second) {
      throw DataError("duplicate tree id '" + it.tree.id + "'");
    }
    detail::throw_violations(validate_tree(it.tree));
  }

  int with_features = 0;
  for (const auto& it : ds.items) {
    if (detail::tree_has_all_features(it.tree)) ++with_features;
  }
  if (with_features != 0 && with_features != static_cast<int>(ds.items.size())) {
    throw DataError("dataset mixes trees with and without extracted features");
  }
  ds.features_extracted = with_features > 0 && !ds.items.empty();

  if (ds.features_extracted) {
    ds.feature_dims = -1;
    for (const auto& it : ds.items) {
      int d = static_cast<int>(it.tree.nodes[it.tree.root].features.size());
      if (ds.feature_dims < 0) ds.feature_dims = d;
      if (d != ds.feature_dims) {
        throw DataError("tree '" + it.tree.id + "': feature dimension " + std::to_string(d) +
                        " differs from the dataset's " + std::to_string(ds.feature_dims));
      }
    }
  } else {
    ds.leaf_dims = -1;
    for (const auto& it : ds.items) {
      for (int v = 0; v < it.tree.size(); ++v) {
        if (!it.tree.is_leaf(v)) continue;
        int d = static_cast<int>(it.tree.nodes[v].leaf_values.size());
        if (ds.leaf_dims < 0) ds.leaf_dims = d;
        if (d != ds.leaf_dims) {
          throw DataError("tree '" + it.tree.id + "': leaf observation dimension " +
                          std::to_string(d) + " differs from the dataset's " +
                          std::to_string(ds.leaf_dims));
        }
        break;  // dims within a tree already validated
      }
    }
  }
}

// Parses the JSON-lines dataset format: one object per line,
//   {"id": str, "label": str, "nodes": [{"id": str, "parent": str|null,
//    "size": num|null, "leaf_values": [num]|null, "features": [num]|null}]}
// Absent keys mean null. Throws DataError with the offending line number.
inline Dataset parse_dataset(std::istream& in) {
  using json = nlohmann::json;
  Dataset ds;
  std::vector<std::string> raw_labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& msg) -> DataError {
      return DataError("line " + std::to_string(line_no) + ": " + msg);
    };
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(std::string("JSON parse error: ") + e.what());
    }
    try {
      if (!rec.is_object()) throw fail("expected a JSON object");
      if (!rec.contains("id") || !rec["id"].is_string() || rec["id"].get<std::string>().empty()) {
        throw fail("record needs a non-empty string 'id'");
      }
      if (!rec.contains("label") || !rec["label"].is_string() ||
          rec["label"].get<std::string>().empty()) {
        throw fail("record needs a non-empty string 'label'");
      }
      if (!rec.contains("nodes") || !rec["nodes"].is_array() || rec["nodes"].empty()) {
        throw fail("record needs a non-empty 'nodes' array");
      }

      Tree t;
      t.id = rec["id"].get<std::string>();
      const json& nodes = rec["nodes"];
      std::map<std::string, int> index_of;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const json& nd = nodes[i];
        if (!nd.is_object() || !nd.contains("id") || !nd["id"].is_string()) {
          throw fail("node " + std::to_string(i) + " needs a string 'id'");
        }
        std::string name = nd["id"].get<std::string>();
        if (!index_of.emplace(name, static_cast<int>(i)).second) {
          throw fail("duplicate node id '" + name + "'");
        }
      }
      auto is_null = [](const json& o, const char* key) {
        return !o.contains(key) || o[key].is_null();
      };
      int size_count = 0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const json& nd = nodes[i];
        std::string name = nd["id"].get<std::string>();
        int parent = -1;
        if (!is_null(nd, "parent")) {
          if (!nd["parent"].is_string()) throw fail("node '" + name + "': parent must be a string or null");
          auto it = index_of.find(nd["parent"].get<std::string>());
          if (it == index_of.end()) {
            throw fail("node '" + name + "': parent '" + nd["parent"].get<std::string>() +
                       "' not found in this tree");
          }
          parent = it->second;
        }
        int idx = t.add_node(parent, name);
        Node& node = t.nodes[idx];
        if (!is_null(nd, "size")) {
          if (!nd["size"].is_number()) throw fail("node '" + name + "': size must be a number or null");
          node.size = nd["size"].get<double>();
          ++size_count;
        }
        if (!is_null(nd, "leaf_values")) {
          if (!nd["leaf_values"].is_array()) {
            throw fail("node '" + name + "': leaf_values must be an array or null");
          }
          for (const auto& v : nd["leaf_values"]) {
            if (!v.is_number()) throw fail("node '" + name + "': leaf_values must be numeric");
            node.leaf_values.push_back(v.get<double>());
          }
          node.has_leaf_values = true;
        }
        if (!is_null(nd, "features")) {
          if (!nd["features"].is_array()) {
            throw fail("node '" + name + "': features must be an array or null");
          }
          for (const auto& v : nd["features"]) {
            if (!v.is_number()) throw fail("node '" + name + "': features must be numeric");
            node.features.push_back(v.get<double>());
          }
          node.has_features = true;
        }
      }
      t.finalize();
      for (int v = 0; v < t.size(); ++v) {
        if (t.nodes[v].has_leaf_values && !t.is_leaf(v)) {
          throw fail("node '" + t.node_names[v] + "': leaf_values on an internal node");
        }
      }
      if (size_count != 0 && size_count != t.size()) {
        throw fail("tree '" + t.id + "': size present on some nodes but not all");
      }
      t = compute_rel_sizes(t, size_count > 0 ? SizeMode::kPixel : SizeMode::kLeafCount);

      ds.items.push_back({std::move(t), -1});
      raw_labels.push_back(rec["label"].get<std::string>());
    } catch (const json::exception& e) {
      throw fail(std::string("bad record: ") + e.what());
    }
  }
  if (ds.items.empty()) throw DataError("dataset contains no records");
  finalize_dataset(ds, raw_labels);
  return ds;
}

// Writes the dataset in the same JSON-lines format parse_dataset reads.
// Key order and number formatting are deterministic, so identical datasets
// serialize to identical bytes.
inline void serialize_dataset(const Dataset& ds, std::ostream& out) {
  using json = nlohmann::ordered_json;
  for (const auto& item : ds.items) {
    const Tree& t = item.tree;
    json rec;
    rec["id"] = t.id;
    rec["label"] = ds.labels[item.label];
    json nodes = json::array();
    for (int i = 0; i < t.size(); ++i) {
      const Node& n = t.nodes[i];
      json nd;
      nd["id"] = t.node_names[i];
      nd["parent"] = n.parent < 0 ? json(nullptr) : json(t.node_names[n.parent]);
      if (n.size.has_value()) nd["size"] = *n.size;
      if (n.has_leaf_values) nd["leaf_values"] = n.leaf_values;
      if (n.has_features) nd["features"] = n.features;
      nodes.push_back(std::move(nd));
    }
    rec["nodes"] = std::move(nodes);
    out << rec.dump() << '\n';
  }
}

// Applies extract_features to every tree; checks the resulting dimensionality
// is uniform across the dataset.
inline Dataset extract_dataset_features(Dataset ds, const FeatureSpec& spec) {
  int dims = -1;
  for (auto& item : ds.items) {
    item.tree = extract_features(std::move(item.tree), spec);
    int d = static_cast<int>(item.tree.nodes[item.tree.root].features.size());
    if (dims < 0) dims = d;
    if (d != dims) {
      throw DataError("tree '" + item.tree.id +
                      "': extracted feature dimension differs across the dataset");
    }
  }
  ds.features_extracted = true;
  ds.feature_dims = dims;
  return ds;
}

inline std::string dataset_to_string(const Dataset& ds) {
  std::ostringstream os;
  serialize_dataset(ds, os);
  return os.str();
}

inline Dataset dataset_from_string(const std::string& s) {
  std::istringstream is(s);
  return parse_dataset(is);
}

}  // namespace spk
