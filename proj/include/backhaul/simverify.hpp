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

// Slot-level fluid simulation of a solution bundle: every flow owns one slice
// (width lambda * k_e) on each link of its route, slices are FIFO queues, and
// a scheduled link forwards min(queue, width) of each of its slices.

#ifndef BACKHAUL_SIMVERIFY_HPP_
#define BACKHAUL_SIMVERIFY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "backhaul/dsum.hpp"
#include "backhaul/rational.hpp"
#include "backhaul/tree.hpp"
#include "json.hpp"

namespace backhaul::sim {

enum class Pattern { kSaturating, kRandom, kBurst };

// "saturating", "random" or "burst"; throws std::invalid_argument.
Pattern parse_pattern(const std::string& name);
std::string pattern_name(Pattern p);

struct SimConfig {
  Pattern pattern = Pattern::kSaturating;  // kBurst: lambda per slot for tau slots, then nothing.
  int64_t periods = 5;                     // Horizon in global periods unless `horizon` is set.
  std::optional<int64_t> horizon;
  uint64_t seed = 0;                       // kRandom only.
};

// Link served by `node` at some slot: a child position, or a customer index at an AP.
struct ScheduledLink {
  int node = 0;
  int task = 0;
};

// lcm of every non-empty node schedule period (1 when there are none).
// Throws std::overflow_error above 2^62.
int64_t global_period(const dsum::SolutionBundle& bundle);

// Links transmitting at slot t; at most one per node.
std::vector<ScheduledLink> scheduled_links(const dsum::SolutionBundle& bundle, int64_t t);

struct FlowReport {
  int ap = 0;
  int64_t customer = 0;
  int64_t route_k = 0;       // Sum of k over the route, customer link included.
  int64_t max_delay = 0;     // Over measured generation slots; delivery at slot s counts as s + 1.
  int64_t violations = 0;    // Measured generation slots not delivered within tau.
  Rational generated;
  Rational delivered;
  Rational queued;           // Left in the flow's slices at the horizon.
};

struct SliceReport {
  int flow = 0;
  int hop = 0;               // 0 is the customer link.
  Rational width;
  Rational max_queue;        // After arrivals, before service, from slot 0.
  Rational steady_max_queue; // Same, from the second global period on.
};

struct SimReport {
  int64_t horizon = 0;
  int64_t global_period = 0;
  int64_t measured_until = 0;  // Generation slots below this are measured.
  std::vector<FlowReport> flows;
  std::vector<SliceReport> slices;
  int64_t violations = 0;
  int64_t max_delay = 0;
  Rational generated;
  Rational delivered;
  bool conservation_ok = true;

  nlohmann::json to_json() const;
};

// Throws std::invalid_argument when the horizon is shorter than one global
// period or the bundle does not match the tree.
SimReport simulate(const TreeTopology& tree, const dsum::SolutionBundle& bundle, int64_t tau,
                   const SimConfig& config = {});

}  // namespace backhaul::sim

#endif  // BACKHAUL_SIMVERIFY_HPP_
