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

// Pinwheel scheduling: given per-task maximum inter-scheduling times k, find a
// cyclic schedule in which task i appears in every window of k_i slots.
//
// Two polynomial-time schedulers are provided. Sxy specializes every k_i down
// to x*2^a or y*2^a and accepts when
//
//     ceil(x * rho_x) / x + ceil(y * rho_y) / y <= 1.
//
// Inductive scheduling (IS) repeatedly regularizes the smallest remaining task
// (serves it exactly every k_j slots), which shrinks the others by
// ceil(k_i / k_j), until Sxy accepts the reduced vector; the removed tasks are
// then re-inserted in reverse order. Every schedule returned by this module has
// passed verify_schedule against the caller's vector.

#ifndef BACKHAUL_PINWHEEL_HPP_
#define BACKHAUL_PINWHEEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "backhaul/rational.hpp"
#include "backhaul/schedule.hpp"

namespace backhaul::pinwheel {

// Sum of 1/k_i over finite entries.
Rational density(const KVector& k);
// Exact sign of density(k) - 1 without forming the (possibly huge) sum.
int compare_density_to_one(const KVector& k);

struct Violation {
  int task = 0;
  int64_t gap = 0;  // kInfinity when the task never appears.
  friend bool operator==(const Violation&, const Violation&) = default;
};

// nullopt when every finite task's cyclic gap (including the wrap-around
// between the last and first occurrence) is at most k_i.
std::optional<Violation> verify_schedule(const CyclicSchedule& pi, const KVector& k);

// Each task once, in the given order.
CyclicSchedule round_robin(std::span<const int> tasks);

struct SxyWitness {
  int64_t x = 1;
  int64_t y = 1;  // Equal to x when the y group is empty.
  // Per task of the input vector; kInfinity / unused for absent tasks.
  std::vector<int64_t> specialized;
  std::vector<uint8_t> in_x;
  std::vector<int> exponent;

  // ceil(x*rho_x)/x + ceil(y*rho_y)/y evaluated exactly.
  Rational load() const;
};

std::optional<SxyWitness> sxy_feasible(const KVector& k);
// Builds the schedule for a witness; nullopt if the construction does not
// verify against k.
std::optional<CyclicSchedule> sxy_build(const KVector& k, const SxyWitness& witness);
std::optional<CyclicSchedule> sxy_schedule(const KVector& k);

// Raised when a regularization step drives an entry below 1.
class EvolutionInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One IS step on a vector sorted ascending over its finite entries:
// k_i <- k_i - ceil(k_i / k_j) for i > j, k_j <- inf.
KVector is_regularize(const KVector& k, size_t j);

// Inserts task m before every (k_m - 1) slots of pi (pi first extended to
// lcm(period, k_m - 1)), so m recurs exactly every k_m slots.
CyclicSchedule is_reinsert(const CyclicSchedule& pi, int m, int64_t k_m);

struct IsIteration {
  int j = 0;
  KVector k;                 // k^j in the caller's task ids.
  int removed = -1;          // Task regularized at this iteration, -1 if none.
  bool schedulable_here = false;
};

struct IsTrace {
  std::vector<IsIteration> iterations;
  std::optional<SxyWitness> witness;  // Over the terminating k^j.
  // Finite task ids sorted by (k, id); iteration j regularizes order[j].
  std::vector<int> order;

  bool succeeded() const { return witness.has_value(); }
};

// Decision only; no schedule is materialized. Cached on the sorted multiset.
IsTrace is_trace(const KVector& k);
bool is_schedulable(const KVector& k);
// Same, for an already sorted list of finite values (hot path for the solver).
bool is_schedulable_sorted(std::span<const int64_t> sorted);

// Searches for an IS-schedulable sorted vector w with w <= sorted elementwise,
// visiting at most visit_limit vectors. Any schedule for w also serves the
// input, so this closes the IS decision downward. Memoized.
inline constexpr size_t kDominatedVisitLimit = 256;
std::optional<std::vector<int64_t>> is_dominated_witness(std::span<const int64_t> sorted,
                                                         size_t visit_limit = kDominatedVisitLimit);

std::optional<std::pair<CyclicSchedule, IsTrace>> is_schedule(const KVector& k);

// Upper bound on materialized schedule periods; larger constructions fail.
inline constexpr size_t kMaxSchedulePeriod = size_t{1} << 24;

// Brute-force decision over "slots since last service" states.
enum class OracleVerdict { kSchedulable, kUnschedulable, kResourceLimit };

struct OracleResult {
  OracleVerdict verdict = OracleVerdict::kResourceLimit;
  std::optional<CyclicSchedule> schedule;
  size_t states_explored = 0;
};

OracleResult brute_force_schedulable(const KVector& k, size_t state_cap = 20'000'000);

// Memoized oracle decision on the sorted multiset; kResourceLimit is not cached.
OracleVerdict oracle_verdict_cached(const KVector& k, size_t state_cap = 20'000'000);

void clear_caches();

}  // namespace backhaul::pinwheel

#endif  // BACKHAUL_PINWHEEL_HPP_
