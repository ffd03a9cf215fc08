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

#include "backhaul/symmetric.hpp"

#include <numeric>
#include <stdexcept>

namespace backhaul::symmetric {

void SymmetricTreeSpec::validate() const {
  if (branching.empty()) throw std::invalid_argument("symmetric spec: depth must be >= 1");
  if (branching.size() != capacities.size()) throw std::invalid_argument("symmetric spec: length mismatch");
  for (int64_t n : branching) {
    if (n < 1) throw std::invalid_argument("symmetric spec: branching must be positive");
  }
  for (const Rational& c : capacities) {
    if (c.sign() <= 0) throw std::invalid_argument("symmetric spec: capacities must be positive");
  }
}

int64_t SymmetricTreeSpec::flows() const {
  int64_t f = 1;
  for (int64_t n : branching) f *= n;
  return f;
}

Rational lambda_star(const SymmetricTreeSpec& spec) {
  spec.validate();
  const int D = spec.depth();
  Rational best;
  int64_t below = 1;
  // Walk d from D-1 down to 0 so the product of N_{d+1..D} accumulates.
  for (int d = D - 1; d >= 0; --d) {
    below *= spec.branching[d];
    Rational r = spec.capacities[d] / Rational(below);
    if (d == D - 1 || r < best) best = r;
  }
  return best;
}

int64_t tau_star(const SymmetricTreeSpec& spec) {
  spec.validate();
  return std::accumulate(spec.branching.begin(), spec.branching.end(), int64_t{0});
}

bool in_region(const SymmetricTreeSpec& spec, const Rational& lambda, int64_t tau) {
  return lambda <= lambda_star(spec) && tau >= tau_star(spec);
}

std::optional<SymmetricTreeSpec> spec_from_tree(const TreeTopology& tree) {
  SymmetricTreeSpec spec;
  for (int d = 0; d < tree.depth(); ++d) {
    const std::vector<int> nodes = tree.level(d);
    const TreeNode& first = tree.node(nodes.front());
    const bool ap = d == tree.ap_level();
    const int64_t n = ap ? first.flows : static_cast<int64_t>(first.children.size());
    const Rational c = ap ? first.flow_capacity : tree.node(first.children.front()).capacity;
    for (int v : nodes) {
      const TreeNode& node = tree.node(v);
      if (node.is_ap() != ap) return std::nullopt;
      if (ap) {
        if (node.flows != n || node.flow_capacity != c) return std::nullopt;
        continue;
      }
      if (static_cast<int64_t>(node.children.size()) != n) return std::nullopt;
      for (int ch : node.children) {
        if (tree.node(ch).capacity != c) return std::nullopt;
      }
    }
    if (n < 1 || c.sign() <= 0) return std::nullopt;
    spec.branching.push_back(n);
    spec.capacities.push_back(c);
  }
  return spec;
}

TreeTopology build_tree(const SymmetricTreeSpec& spec) {
  spec.validate();
  const int D = spec.depth();
  std::vector<TreeNode> nodes;
  TreeNode root;
  root.id = "r";
  nodes.push_back(root);
  std::vector<int> frontier{0};
  for (int d = 1; d < D; ++d) {
    std::vector<int> next;
    for (int p : frontier) {
      for (int64_t i = 0; i < spec.branching[d - 1]; ++i) {
        TreeNode n;
        n.id = nodes[p].id + "." + std::to_string(i);
        n.parent = p;
        n.capacity = spec.capacities[d - 1];
        const int idx = static_cast<int>(nodes.size());
        nodes[p].children.push_back(idx);
        nodes.push_back(n);
        next.push_back(idx);
      }
    }
    frontier = std::move(next);
  }
  for (int ap : frontier) {
    nodes[ap].flows = spec.branching[D - 1];
    nodes[ap].flow_capacity = spec.capacities[D - 1];
  }
  return TreeTopology(std::move(nodes));
}

std::vector<NodeSchedule> urr_schedule(const TreeTopology& tree) {
  std::vector<NodeSchedule> out;
  for (size_t v = 0; v < tree.size(); ++v) {
    const TreeNode& n = tree.node(static_cast<int>(v));
    const int64_t m = n.is_ap() ? n.flows : static_cast<int64_t>(n.children.size());
    NodeSchedule s;
    s.node = static_cast<int>(v);
    s.k = KVector(std::vector<int64_t>(m, m));
    s.schedule.slots.resize(m);
    std::iota(s.schedule.slots.begin(), s.schedule.slots.end(), 0);
    out.push_back(std::move(s));
  }
  return out;
}

PruneResult greedy_prune(const SymmetricTreeSpec& spec, int64_t tau) {
  spec.validate();
  if (tau < spec.depth()) throw std::domain_error("greedy_prune: tau below the tree depth");
  PruneResult res;
  res.pruned = spec;
  int64_t excess = tau_star(spec) - tau;
  int64_t room = 0;
  for (int64_t n : spec.branching) room += n - 1;
  if (excess > room) throw std::domain_error("greedy_prune: deadline unreachable by pruning");
  for (; excess > 0; --excess) {
    int best = 0;
    for (int d = 0; d < spec.depth(); ++d) {
      if (res.pruned.branching[d] >= res.pruned.branching[best]) best = d;  // Deepest among ties.
    }
    res.log.push_back(PruneStep{best + 1, res.pruned.branching[best]});
    --res.pruned.branching[best];
  }
  res.remaining_flows = res.pruned.flows();
  return res;
}

}  // namespace backhaul::symmetric
