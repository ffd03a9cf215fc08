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

// Closed forms for trees that are symmetric at every level: every node at
// level d-1 has N_d children, links into level d-1 have capacity c_d, and
// N_D / c_D describe the customers of each AP.

#ifndef BACKHAUL_SYMMETRIC_HPP_
#define BACKHAUL_SYMMETRIC_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "backhaul/rational.hpp"
#include "backhaul/schedule.hpp"
#include "backhaul/tree.hpp"

namespace backhaul::symmetric {

struct SymmetricTreeSpec {
  std::vector<int64_t> branching;     // N_1..N_D
  std::vector<Rational> capacities;   // c_1..c_D

  void validate() const;  // Throws std::invalid_argument.
  int depth() const { return static_cast<int>(branching.size()); }
  int64_t flows() const;
  friend bool operator==(const SymmetricTreeSpec&, const SymmetricTreeSpec&) = default;
};

// min over 0 <= d < D of c_{d+1} / prod_{d' > d} N_{d'}.
Rational lambda_star(const SymmetricTreeSpec& spec);
// sum of N_d.
int64_t tau_star(const SymmetricTreeSpec& spec);
bool in_region(const SymmetricTreeSpec& spec, const Rational& lambda, int64_t tau);

// The spec of a tree whose nodes on each level share one degree and one
// uplink capacity and whose APs share one flow count and customer-link
// capacity; nullopt otherwise.
std::optional<SymmetricTreeSpec> spec_from_tree(const TreeTopology& tree);

// Materializes the spec as a tree; node ids are "r", "r.0", "r.0.3", ...
TreeTopology build_tree(const SymmetricTreeSpec& spec);

struct NodeSchedule {
  int node = 0;
  KVector k;                // Over children (or over customers at an AP).
  CyclicSchedule schedule;  // Task ids are child positions.
};

// Round robin over the children of every node and over the customers of every
// AP; one entry per node in tree order.
std::vector<NodeSchedule> urr_schedule(const TreeTopology& tree);

struct PruneStep {
  int level = 0;          // d of the pruned N_d (1-based).
  int64_t before = 0;     // N_d before the prune.
};

struct PruneResult {
  SymmetricTreeSpec pruned;
  std::vector<PruneStep> log;
  int64_t remaining_flows = 0;
};

// Performs tau*(spec) - tau prunes, each at the deepest level among those
// with the largest N_d. Throws std::domain_error when tau cannot be reached.
PruneResult greedy_prune(const SymmetricTreeSpec& spec, int64_t tau);

}  // namespace backhaul::symmetric

#endif  // BACKHAUL_SYMMETRIC_HPP_
