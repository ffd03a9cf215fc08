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

#include "backhaul/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace backhaul {

KVector::KVector(std::vector<int64_t> entries) : k_(std::move(entries)) {
  for (int64_t k : k_) {
    if (k < 1) throw std::invalid_argument("KVector: entries must be >= 1");
  }
}

size_t KVector::finite_count() const {
  return static_cast<size_t>(std::count_if(k_.begin(), k_.end(), [](int64_t k) { return k != kInfinity; }));
}

std::vector<int64_t> KVector::finite_values() const {
  std::vector<int64_t> out;
  for (int64_t k : k_) {
    if (k != kInfinity) out.push_back(k);
  }
  return out;
}

KVector KVector::parse(std::string_view text) {
  std::vector<int64_t> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) throw std::invalid_argument("KVector: empty entry");
    if (token == "inf" || token == "INF" || token == "∞") {
      out.push_back(kInfinity);
    } else {
      size_t used = 0;
      long long v = std::stoll(token, &used);
      if (used != token.size()) throw std::invalid_argument("KVector: bad entry '" + token + "'");
      out.push_back(v);
    }
    token.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (c != ' ' && c != '\t' && c != '(' && c != ')') {
      token.push_back(c);
    }
  }
  if (!token.empty() || !out.empty()) flush();
  return KVector(std::move(out));
}

std::string KVector::to_string() const {
  std::string s = "(";
  for (size_t i = 0; i < k_.size(); ++i) {
    if (i) s += ",";
    s += k_[i] == kInfinity ? std::string("inf") : std::to_string(k_[i]);
  }
  return s + ")";
}

std::string CyclicSchedule::to_string() const {
  std::string s = "{";
  for (size_t i = 0; i < slots.size(); ++i) {
    if (i) s += ",";
    s += slots[i] == kIdle ? std::string("-") : "v" + std::to_string(slots[i]);
  }
  return s + "}";
}

}  // namespace backhaul
