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

// Tree backhaul topology. The root (server) is level 0 and the access points
// are the leaves at level D-1. Customers attached to an AP form level D: each
// customer has its own link into the AP with the AP's flow capacity. A route
// therefore crosses D links: the customer link plus the uplinks of the AP and
// of every non-root ancestor.
//
// Capacities are stored in packets per slot.

#ifndef BACKHAUL_TREE_HPP_
#define BACKHAUL_TREE_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "backhaul/rational.hpp"
#include "json.hpp"

namespace backhaul {

struct SlaParams {
  Rational lambda{1};  // Packets per slot per flow.
  int64_t tau = 1;     // Deadline in slots.
  std::optional<int64_t> duration;  // SLA duration T in slots; nullopt = unbounded.

  void validate() const;
};

struct TreeNode {
  std::string id;
  int parent = -1;
  int level = 0;
  Rational capacity;       // Uplink e(v); zero at the root.
  std::vector<int> children;
  // APs only.
  int64_t flows = 0;
  Rational flow_capacity;  // Capacity of each customer link.

  bool is_ap() const { return children.empty(); }
};

class TreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable validated tree. Node 0 is the root and nodes are stored level by
// level, so every level is a contiguous index range.
class TreeTopology {
 public:
  TreeTopology() = default;
  // Validates and reorders; `nodes[0]` need not be the root.
  explicit TreeTopology(std::vector<TreeNode> nodes);

  size_t size() const { return nodes_.size(); }
  const TreeNode& node(int v) const { return nodes_[v]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  static constexpr int root() { return 0; }

  // Links per route, the customer link included.
  int depth() const { return ap_level_ + 1; }
  int ap_level() const { return ap_level_; }
  // Nodes at level d, in storage order.
  std::vector<int> level(int d) const;
  std::vector<int> aps() const { return level(ap_level_); }
  int64_t total_flows() const;
  // Flows in the subtree rooted at v.
  int64_t subtree_flows(int v) const;
  std::optional<int> find(const std::string& id) const;

  friend bool operator==(const TreeTopology& a, const TreeTopology& b);

 private:
  std::vector<TreeNode> nodes_;
  std::vector<int> level_begin_;  // level_begin_[d]..level_begin_[d+1]
  int ap_level_ = 0;
};

struct LoadedTree {
  TreeTopology tree;
  Rational lambda{1};  // Per-flow rate in the same packets-per-slot unit.
};

// Accepts either physical units ({"slot_us", "lambda_bps", capacities in
// "capacity_bps" / "flow_capacity_bps"}; one packet = lambda_bps * slot bits,
// so lambda becomes 1) or normalized units ("capacity_num"/"capacity_den",
// "flow_capacity_num"/"flow_capacity_den", optional "lambda_num"/"lambda_den").
// Throws nlohmann::json::exception on malformed JSON, TreeError on structure.
LoadedTree load_tree(const nlohmann::json& doc);
LoadedTree load_tree_file(const std::string& path);
// Normalized form; load_tree(emit_tree(t, l)) reproduces t and l.
nlohmann::json emit_tree(const TreeTopology& tree, const Rational& lambda = Rational(1));

struct Route {
  int ap = 0;
  int64_t customer = 0;    // Index among the AP's flows.
  std::vector<int> nodes;  // AP first, then ancestors below the root; their uplinks.
  size_t length() const { return nodes.size() + 1; }  // Including the customer link.
};

std::vector<Route> routes(const TreeTopology& tree);

// min(total flows, min over levels d < D of sum over level-d nodes v of
// floor(max child-link capacity / lambda)).
int64_t capacity_bound(const TreeTopology& tree, const Rational& lambda);

}  // namespace backhaul

#endif  // BACKHAUL_TREE_HPP_
