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

// Level-by-level dynamic program for the admitted-flow maximization: every
// node tabulates the best admission count for each remaining deadline budget,
// then a top-down pass fixes k vectors, quotas and schedules.

#ifndef BACKHAUL_DSUM_HPP_
#define BACKHAUL_DSUM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "backhaul/rational.hpp"
#include "backhaul/schedule.hpp"
#include "backhaul/tree.hpp"
#include "json.hpp"

namespace backhaul::dsum {

// Best choice at one node for one budget tau_v.
struct TableEntry {
  int64_t sigma = 0;           // Flows admissible below the node.
  std::vector<int64_t> k;      // Per child; kInfinity when pruned.
  std::vector<int64_t> admit;  // Per child admissions at that k.
};

struct SigmaTable {
  int node = 0;
  int64_t tau_min = 1;              // entries[i] holds tau_v = tau_min + i.
  std::vector<TableEntry> entries;

  int64_t tau_max() const { return tau_min + static_cast<int64_t>(entries.size()) - 1; }
  const TableEntry* at(int64_t tau_v) const;
  // 0 below tau_min; the last entry above tau_max.
  int64_t sigma(int64_t tau_v) const;
};

// Table of an AP over tau_v in [1, tau_max]: min(N, tau_v, floor(c/lambda)).
SigmaTable ap_table(int node, int64_t flows, const Rational& flow_capacity, const Rational& lambda,
                    int64_t tau_max);

struct P2Child {
  Rational capacity;          // Of the link into the child.
  const SigmaTable* table = nullptr;
};

struct P2Stats {
  size_t leaves = 0;
  size_t is_checks = 0;
};

// Exact solution of the per-node subproblem at budget tau_v. `incumbent` is a
// feasible entry for a smaller budget used as the starting lower bound.
TableEntry solve_p2(std::span<const P2Child> children, int64_t tau_v, const Rational& lambda,
                    const TableEntry* incumbent = nullptr, P2Stats* stats = nullptr);

// Per-child admissions at uplink value k and budget tau_v.
int64_t child_value(const P2Child& c, int64_t tau_v, int64_t k, const Rational& lambda);

struct NodeSolution {
  int64_t k = kInfinity;         // Max inter-scheduling time of the uplink.
  int64_t tau_v = 0;             // Deadline budget left for the links below.
  int64_t sigma = 0;             // Admitted flows in the subtree.
  KVector child_k;               // Over children, or over admitted customers at an AP.
  CyclicSchedule schedule;       // Task ids are child positions or customer indices.
};

struct SolutionBundle {
  int64_t tau = 0;
  Rational lambda{1};
  int64_t sigma = 0;
  std::vector<NodeSolution> nodes;  // Indexed like the tree.

  nlohmann::json to_json(const TreeTopology& tree) const;
  static SolutionBundle from_json(const TreeTopology& tree, const nlohmann::json& doc);
};

// Every violated constraint as a readable line; empty when the bundle is valid.
std::vector<std::string> validate_bundle(const TreeTopology& tree, const SolutionBundle& b);

struct DsumOptions {
  int threads = 1;
};

struct DsumResult {
  SolutionBundle bundle;
  std::vector<SigmaTable> tables;     // Indexed like the tree; the root holds tau only.
  std::vector<double> node_ms;        // Forward-pass time per node.
  double parallel_ms = 0;             // Sum over levels of the slowest node.
  double wall_ms = 0;
  P2Stats stats;
};

DsumResult solve(const TreeTopology& tree, const Rational& lambda, int64_t tau, const DsumOptions& opt = {});

// Uniform round robin with symmetric per-level pruning caps, the best cap
// vector over all of them, and capacity trimming.
SolutionBundle urr_baseline(const TreeTopology& tree, const Rational& lambda, int64_t tau);

}  // namespace backhaul::dsum

#endif  // BACKHAUL_DSUM_HPP_
