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

#ifndef BACKHAUL_SCHEDULE_HPP_
#define BACKHAUL_SCHEDULE_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace backhaul {

// Marks a task that is absent from a vector (it places no constraint).
inline constexpr int64_t kInfinity = std::numeric_limits<int64_t>::max();

// Per-task maximum inter-scheduling times. Task ids are the vector indices.
class KVector {
 public:
  KVector() = default;
  // Throws std::invalid_argument if a finite entry is < 1.
  explicit KVector(std::vector<int64_t> entries);
  KVector(std::initializer_list<int64_t> entries) : KVector(std::vector<int64_t>(entries)) {}

  size_t size() const { return k_.size(); }
  int64_t operator[](size_t task) const { return k_[task]; }
  bool finite(size_t task) const { return k_[task] != kInfinity; }
  size_t finite_count() const;
  std::span<const int64_t> entries() const { return k_; }
  // Finite entries only, in task order.
  std::vector<int64_t> finite_values() const;

  // "3,5,inf,9"; whitespace ignored; "inf" or "∞" for absent tasks.
  static KVector parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const KVector&, const KVector&) = default;

 private:
  std::vector<int64_t> k_;
};

// A cyclic slot assignment. slots[t] is the task served at t (mod period), or
// kIdle.
struct CyclicSchedule {
  static constexpr int kIdle = -1;

  std::vector<int> slots;

  size_t period() const { return slots.size(); }
  bool empty() const { return slots.empty(); }
  int at(uint64_t t) const { return slots[t % slots.size()]; }

  std::string to_string() const;
  friend bool operator==(const CyclicSchedule&, const CyclicSchedule&) = default;
};

}  // namespace backhaul

#endif  // BACKHAUL_SCHEDULE_HPP_
