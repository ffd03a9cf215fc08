// Copyright 2026 The Backhaul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "backhaul/tree.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>

namespace backhaul {
namespace {

using nlohmann::json;

Rational json_rational(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<int64_t>());
  if (v.is_number()) return Rational::from_double(v.get<double>());
  throw TreeError("expected a number or rational string");
}

// Reads "<key>_num"/"<key>_den" or "<key>_bps" (converted with `per_packet`),
// whichever is present.
std::optional<Rational> read_capacity(const json& j, const std::string& key, const std::optional<Rational>& bps_unit) {
  if (j.contains(key + "_num")) {
    Rational num = json_rational(j.at(key + "_num"));
    Rational den = j.contains(key + "_den") ? json_rational(j.at(key + "_den")) : Rational(1);
    if (den.sign() <= 0) throw TreeError(key + "_den must be positive");
    return num / den;
  }
  if (j.contains(key + "_bps")) {
    if (!bps_unit) throw TreeError(key + "_bps requires lambda_bps");
    return json_rational(j.at(key + "_bps")) / *bps_unit;
  }
  if (j.contains(key)) return json_rational(j.at(key));
  return std::nullopt;
}

void parse_node(const json& j, int parent, const std::optional<Rational>& unit, std::vector<TreeNode>& out) {
  if (!j.is_object()) throw TreeError("node must be an object");
  TreeNode n;
  n.id = j.at("id").get<std::string>();
  n.parent = parent;
  if (parent >= 0) {
    auto c = read_capacity(j, "capacity", unit);
    if (!c) throw TreeError("node '" + n.id + "' lacks a capacity");
    n.capacity = *c;
  }
  const bool has_children = j.contains("children") && !j.at("children").empty();
  const int self = static_cast<int>(out.size());
  if (has_children) {
    if (j.contains("flows")) throw TreeError("internal node '" + n.id + "' may not carry flows");
    out.push_back(n);
    for (const json& c : j.at("children")) {
      out[self].children.push_back(static_cast<int>(out.size()));
      parse_node(c, self, unit, out);
    }
    return;
  }
  if (!j.contains("flows")) throw TreeError("leaf '" + n.id + "' lacks a flow count");
  n.flows = j.at("flows").get<int64_t>();
  if (n.flows > 0) {
    auto fc = read_capacity(j, "flow_capacity", unit);
    if (!fc) throw TreeError("AP '" + n.id + "' lacks a flow_capacity");
    n.flow_capacity = *fc;
  } else if (auto fc = read_capacity(j, "flow_capacity", unit)) {
    n.flow_capacity = *fc;
  }
  out.push_back(n);
}

json emit_rational(json& j, const std::string& key, const Rational& r) {
  j[key + "_num"] = r.num();
  j[key + "_den"] = r.den();
  return j;
}

json emit_node(const TreeTopology& t, int v) {
  const TreeNode& n = t.node(v);
  json j;
  j["id"] = n.id;
  if (v != TreeTopology::root()) emit_rational(j, "capacity", n.capacity);
  if (n.is_ap()) {
    j["flows"] = n.flows;
    emit_rational(j, "flow_capacity", n.flow_capacity);
  } else {
    json kids = json::array();
    for (int c : n.children) kids.push_back(emit_node(t, c));
    j["children"] = kids;
  }
  return j;
}

}  // namespace

void SlaParams::validate() const {
  if (lambda.sign() <= 0) throw std::invalid_argument("SLA: lambda must be positive");
  if (tau < 1) throw std::invalid_argument("SLA: tau must be >= 1");
  if (duration && *duration < 1) throw std::invalid_argument("SLA: duration must be positive");
}

TreeTopology::TreeTopology(std::vector<TreeNode> in) {
  if (in.empty()) throw TreeError("empty tree");
  int root = -1;
  for (size_t i = 0; i < in.size(); ++i) {
    if (in[i].parent < 0) {
      if (root >= 0) throw TreeError("multiple roots");
      root = static_cast<int>(i);
    } else if (in[i].parent >= static_cast<int>(in.size())) {
      throw TreeError("parent index out of range");
    }
  }
  if (root < 0) throw TreeError("no root");
  // Rebuild children from parent links so the two views cannot disagree; keep
  // the given child order when it is consistent.
  std::vector<std::vector<int>> kids(in.size());
  for (size_t i = 0; i < in.size(); ++i) {
    for (int c : in[i].children) {
      if (c < 0 || c >= static_cast<int>(in.size()) || in[c].parent != static_cast<int>(i)) {
        throw TreeError("child list disagrees with parent links");
      }
      kids[i].push_back(c);
    }
  }
  for (size_t i = 0; i < in.size(); ++i) {
    int p = in[i].parent;
    if (p >= 0 && std::find(kids[p].begin(), kids[p].end(), static_cast<int>(i)) == kids[p].end()) {
      kids[p].push_back(static_cast<int>(i));
    }
  }

  // Breadth-first relabeling.
  std::vector<int> order, new_index(in.size(), -1);
  std::deque<int> q{root};
  new_index[root] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    order.push_back(v);
    for (int c : kids[v]) {
      if (new_index[c] >= 0) throw TreeError("cycle in tree");
      new_index[c] = static_cast<int>(order.size() + q.size());
      q.push_back(c);
    }
  }
  if (order.size() != in.size()) throw TreeError("disconnected node");

  nodes_.resize(in.size());
  std::map<std::string, int> ids;
  for (size_t i = 0; i < order.size(); ++i) {
    TreeNode n = in[order[i]];
    n.parent = n.parent < 0 ? -1 : new_index[n.parent];
    n.children.clear();
    for (int c : kids[order[i]]) n.children.push_back(new_index[c]);
    n.level = n.parent < 0 ? 0 : nodes_[n.parent].level + 1;
    if (!ids.emplace(n.id, static_cast<int>(i)).second) throw TreeError("duplicate node id '" + n.id + "'");
    if (n.parent >= 0 && n.capacity.sign() <= 0) throw TreeError("nonpositive capacity on '" + n.id + "'");
    if (n.is_ap()) {
      if (n.flows < 0) throw TreeError("negative flow count on '" + n.id + "'");
      if (n.flows > 0 && n.flow_capacity.sign() <= 0) throw TreeError("nonpositive flow capacity on '" + n.id + "'");
    } else if (n.flows != 0) {
      throw TreeError("internal node '" + n.id + "' may not carry flows");
    }
    nodes_[i] = std::move(n);
  }

  ap_level_ = -1;
  for (const TreeNode& n : nodes_) {
    if (!n.is_ap()) continue;
    if (ap_level_ < 0) ap_level_ = n.level;
    if (n.level != ap_level_) throw TreeError("leaves at mixed depths");
  }
  level_begin_.assign(ap_level_ + 2, static_cast<int>(nodes_.size()));
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) level_begin_[nodes_[i].level] = i;
}

std::vector<int> TreeTopology::level(int d) const {
  std::vector<int> out;
  if (d < 0 || d > ap_level_) return out;
  for (int v = level_begin_[d]; v < level_begin_[d + 1]; ++v) out.push_back(v);
  return out;
}

int64_t TreeTopology::total_flows() const { return subtree_flows(root()); }

int64_t TreeTopology::subtree_flows(int v) const {
  const TreeNode& n = nodes_[v];
  if (n.is_ap()) return n.flows;
  int64_t s = 0;
  for (int c : n.children) s += subtree_flows(c);
  return s;
}

std::optional<int> TreeTopology::find(const std::string& id) const {
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

bool operator==(const TreeTopology& a, const TreeTopology& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (size_t i = 0; i < a.nodes_.size(); ++i) {
    const TreeNode& x = a.nodes_[i];
    const TreeNode& y = b.nodes_[i];
    if (x.id != y.id || x.parent != y.parent || x.level != y.level || x.capacity != y.capacity ||
        x.children != y.children || x.flows != y.flows || x.flow_capacity != y.flow_capacity) {
      return false;
    }
  }
  return true;
}

LoadedTree load_tree(const json& doc) {
  if (!doc.is_object() || !doc.contains("root")) throw TreeError("document must have a root");
  std::optional<Rational> unit;
  Rational lambda(1);
  if (doc.contains("lambda_bps")) {
    // One packet is what a lambda-rate flow emits per slot; capacities in
    // packets per slot are therefore c_bps / lambda_bps.
    unit = json_rational(doc.at("lambda_bps"));
    if (unit->sign() <= 0) throw TreeError("lambda_bps must be positive");
  } else if (auto l = read_capacity(doc, "lambda", std::nullopt)) {
    lambda = *l;
    if (lambda.sign() <= 0) throw TreeError("lambda must be positive");
  }
  std::vector<TreeNode> nodes;
  parse_node(doc.at("root"), -1, unit, nodes);
  return LoadedTree{TreeTopology(std::move(nodes)), lambda};
}

LoadedTree load_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_tree(json::parse(in));
}

json emit_tree(const TreeTopology& tree, const Rational& lambda) {
  json doc;
  emit_rational(doc, "lambda", lambda);
  doc["root"] = emit_node(tree, TreeTopology::root());
  return doc;
}

std::vector<Route> routes(const TreeTopology& tree) {
  std::vector<Route> out;
  for (int ap : tree.aps()) {
    std::vector<int> path;
    for (int v = ap; v != TreeTopology::root(); v = tree.node(v).parent) path.push_back(v);
    for (int64_t f = 0; f < tree.node(ap).flows; ++f) out.push_back(Route{ap, f, path});
  }
  return out;
}

int64_t capacity_bound(const TreeTopology& tree, const Rational& lambda) {
  int64_t best = tree.total_flows();
  for (int d = 0; d <= tree.ap_level(); ++d) {
    int64_t level_sum = 0;
    for (int v : tree.level(d)) {
      const TreeNode& n = tree.node(v);
      Rational widest;
      if (n.is_ap()) {
        if (n.flows > 0) widest = n.flow_capacity;
      } else {
        for (int c : n.children) widest = std::max(widest, tree.node(c).capacity);
      }
      level_sum += floor_div(widest, lambda);
    }
    best = std::min(best, level_sum);
  }
  return best;
}

}  // namespace backhaul
