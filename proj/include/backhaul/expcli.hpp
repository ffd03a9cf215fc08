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

// Seeded corpora, experiment drivers and CSV emission. Every output that
// lands in a CSV is a pure function of the config; timings go to separate
// files.

#ifndef BACKHAUL_EXPCLI_HPP_
#define BACKHAUL_EXPCLI_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "backhaul/dsum.hpp"
#include "backhaul/rational.hpp"
#include "backhaul/schedule.hpp"
#include "backhaul/tree.hpp"
#include "json.hpp"

namespace backhaul::exp {

inline constexpr size_t kMaxConsecutiveFailures = 100'000;

// Seed of the stream for item `index` (a vector length or a tree number).
uint64_t stream_seed(uint64_t seed, uint64_t index);

// Runs body(i) for i in [0, n) on `threads` workers; rethrows the first exception.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& body);

struct VectorCorpus {
  int M = 0;
  std::vector<KVector> vectors;  // Sorted ascending, pairwise distinct.
  bool truncated = false;        // Stopped after kMaxConsecutiveFailures rejections.
  size_t attempts = 0;
};

// Entries i.i.d. uniform on [2, 3M-1] from SplitMix64(stream_seed(seed, M));
// keeps a draw when its density lies in (lo, hi] and its sorted form is new.
VectorCorpus gen_random_vectors(int M, size_t count, const Rational& lo, const Rational& hi, uint64_t seed);

struct IsSxyConfig {
  uint64_t seed = 1;
  int m_min = 4;
  int m_max = 12;
  std::vector<int> ms;  // Explicit lengths; overrides [m_min, m_max] when non-empty.
  Rational lo{7, 10};
  Rational hi{1};
  size_t count = 1000;  // Per length.
  int threads = 1;

  std::vector<int> lengths() const;
  static IsSxyConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Exact reciprocal sum; numerator and denominator can exceed 64 bits.
struct Density {
  std::string num;
  std::string den;
  double value = 0;
};

struct IsSxyRecord {
  int M = 0;
  std::vector<int64_t> k;
  Density density;
  bool sxy = false;
  bool is = false;
  bool sxy_verified = false;  // A verifier-passing Sxy schedule was built.
  bool is_verified = false;   // A verifier-passing IS schedule was built.
  size_t is_period = 0;
  CyclicSchedule is_schedule;  // Retained when is_verified.
};

struct IsSxyRow {
  int M = 0;
  size_t n = 0;
  size_t sxy_success = 0;
  size_t is_success = 0;
  std::optional<Density> sxy_min_unsched;
  std::optional<Density> is_min_unsched;
  bool truncated = false;
  size_t attempts = 0;

  double gap_pp() const;
};

struct IsSxyResult {
  std::vector<IsSxyRow> rows;
  std::vector<IsSxyRecord> records;  // Ordered by M, then corpus order.
};

IsSxyResult run_is_vs_sxy(const IsSxyConfig& config);

// RFC 4180 documents; rationals as 6 significant digits plus exact num/den.
std::string is_sxy_csv(const std::vector<IsSxyRow>& rows);
std::string is_sxy_records_csv(const std::vector<IsSxyRecord>& records);
// One JSON object per line: {"M", "k", "is_schedule"} for each IS success.
std::string is_schedules_jsonl(const std::vector<IsSxyRecord>& records);

struct TreeConfig {
  int depth = 3;                            // Links per route, customer link included.
  int deg_min = 2;
  int deg_max = 6;
  int64_t flows = 400;
  int64_t lambda_mbps = 10;
  int64_t customer_mbps = 250;
  std::vector<int64_t> cmax_mbps{4000, 1000};  // Per uplink level, root side first.

  static TreeConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Random tree in normalized units (lambda = 1, capacities in flows):
// degrees uniform on [deg_min, deg_max], level-d uplinks uniform on
// [cmax/2, cmax] in whole Mbps, each flow on a uniform AP.
TreeTopology gen_random_tree(const TreeConfig& config, uint64_t seed);

struct DsumExpConfig {
  uint64_t seed = 1;
  int trees = 10;
  TreeConfig tree;
  std::vector<int64_t> taus{3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96};
  int threads = 1;            // Across trees.
  bool simulate = false;      // Replay every bundle in the simulator.
  int64_t sim_periods = 5;

  static DsumExpConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct DsumRow {
  int tree = 0;
  uint64_t tree_seed = 0;
  int64_t tau = 0;
  int64_t flows = 0;
  int64_t sigma_dsum = 0;
  int64_t sigma_urr = 0;
  int64_t capacity_bound = 0;
  bool bundle_valid = false;
  // Simulation, when enabled.
  bool simulated = false;
  int64_t global_period = 0;
  int64_t sim_violations = 0;
  int64_t sim_max_delay = 0;
  bool sim_conservation = false;
  // Timing, kept out of the deterministic CSV.
  double parallel_ms = 0;
  double wall_ms = 0;
  size_t is_checks = 0;

  Rational normalized_dsum() const;
  Rational normalized_urr() const;
};

std::vector<DsumRow> run_dsum_experiment(const DsumExpConfig& config);
std::string dsum_csv(const std::vector<DsumRow>& rows);
std::string dsum_timing_csv(const std::vector<DsumRow>& rows);

// Exhaustive optimum: every child k vector (values < budget or absent) at
// every node, admissions trimmed by slice capacity, each vector accepted by
// `schedulable`. Undecided vectors are counted and treated as unschedulable.
struct BruteForceResult {
  int64_t sigma = 0;
  size_t vectors = 0;
  size_t undecided = 0;
};

enum class Decider { kOracle, kIs };
BruteForceResult brute_force_sigma(const TreeTopology& tree, const Rational& lambda, int64_t tau, Decider decider);

// 6 significant digits, fixed notation where it fits.
std::string decimal6(const Rational& r);
// FNV-1a 64 of a byte string, hex.
std::string fnv1a_hex(const std::string& bytes);
Density density_of(std::span<const int64_t> k);

}  // namespace backhaul::exp

#endif  // BACKHAUL_EXPCLI_HPP_
