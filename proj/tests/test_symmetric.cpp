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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>

#include "backhaul/pinwheel.hpp"
#include "backhaul/symmetric.hpp"

using namespace backhaul;
using namespace backhaul::symmetric;

namespace {

SymmetricTreeSpec example() { return {{5, 5}, {Rational(18), Rational(9, 2)}}; }

// Best remaining-flow count over every sequence of `prunes` level prunes.
int64_t best_prune_bruteforce(std::vector<int64_t> n, int prunes) {
  if (prunes == 0) {
    int64_t f = 1;
    for (int64_t x : n) f *= x;
    return f;
  }
  int64_t best = -1;
  for (size_t d = 0; d < n.size(); ++d) {
    if (n[d] <= 1) continue;
    --n[d];
    best = std::max(best, best_prune_bruteforce(n, prunes - 1));
    ++n[d];
  }
  return best;
}

}  // namespace

TEST_CASE("lambda_star") {
  CHECK(lambda_star(example()) == Rational(18, 25));
  CHECK(lambda_star({{4}, {Rational(1)}}) == Rational(1, 4));
  CHECK(lambda_star({{4, 4}, {Rational(18), Rational(9, 2)}}) == Rational(9, 8));
}

TEST_CASE("tau_star") {
  CHECK(tau_star(example()) == 10);
  CHECK(tau_star({{2, 8}, {Rational(1), Rational(1)}}) == 10);
  CHECK(tau_star({{7}, {Rational(1)}}) == 7);
}

TEST_CASE("in_region") {
  CHECK(in_region(example(), Rational(18, 25), 10));
  CHECK_FALSE(in_region(example(), Rational(1), 10));
  CHECK_FALSE(in_region(example(), Rational(18, 25), 9));
  CHECK(in_region(example(), Rational(0), 10));
}

TEST_CASE("urr_schedule") {
  TreeTopology t = build_tree(example());
  auto s = urr_schedule(t);
  REQUIRE(s.size() == t.size());
  for (const NodeSchedule& ns : s) {
    for (int64_t k : ns.k.entries()) CHECK(k == 5);
    CHECK_FALSE(pinwheel::verify_schedule(ns.schedule, ns.k));
  }
  CHECK(5 + 5 == tau_star(example()));

  TreeTopology chain = build_tree({{1, 1}, {Rational(1), Rational(1)}});
  for (const NodeSchedule& ns : urr_schedule(chain)) {
    CHECK(ns.schedule.period() == 1);
    CHECK(ns.k == KVector{1});
  }
}

TEST_CASE("urr_schedule on an asymmetric tree") {
  nlohmann::json doc = {
      {"root",
       {{"id", "r"},
        {"children",
         {{{"id", "a"}, {"capacity_num", 9}, {"flows", 3}, {"flow_capacity_num", 9}},
          {{"id", "b"}, {"capacity_num", 9}, {"flows", 1}, {"flow_capacity_num", 9}}}}}}};
  TreeTopology t = load_tree(doc).tree;
  auto s = urr_schedule(t);
  CHECK(s[0].k == KVector{2, 2});
  CHECK(s[1].k == KVector{3, 3, 3});
  CHECK(s[2].k == KVector{1});
}

TEST_CASE("greedy_prune examples") {
  auto r8 = greedy_prune(example(), 8);
  CHECK(r8.pruned.branching == std::vector<int64_t>{4, 4});
  CHECK(r8.remaining_flows == 16);
  CHECK(r8.log.size() == 2);
  CHECK(lambda_star(r8.pruned) == Rational(9, 8));

  auto r10 = greedy_prune(example(), 10);
  CHECK(r10.log.empty());
  CHECK(r10.remaining_flows == 25);

  auto r9 = greedy_prune(example(), 9);
  CHECK(r9.log.size() == 1);
  CHECK(r9.log[0].level == 2);  // Deepest tied level.
  CHECK(r9.remaining_flows == 20);

  CHECK_THROWS_AS(greedy_prune(example(), 1), std::domain_error);
  CHECK_THROWS_AS(greedy_prune({{1, 1}, {Rational(1), Rational(1)}}, 1), std::domain_error);
}

TEST_CASE("greedy_prune optimality and invariants over small specs") {
  std::vector<int64_t> n(3);
  for (int D = 1; D <= 3; ++D) {
    std::function<void(int)> rec = [&](int d) {
      if (d == D) {
        SymmetricTreeSpec spec{std::vector<int64_t>(n.begin(), n.begin() + D),
                               std::vector<Rational>(D, Rational(7, 3))};
        const int64_t ts = tau_star(spec);
        for (int64_t tau = D; tau <= ts; ++tau) {
          int64_t room = 0;
          for (int64_t x : spec.branching) room += x - 1;
          if (ts - tau > room) continue;
          PruneResult r = greedy_prune(spec, tau);
          CHECK(tau_star(r.pruned) == tau);
          CHECK(r.remaining_flows == best_prune_bruteforce(spec.branching, static_cast<int>(ts - tau)));
          CHECK(lambda_star(r.pruned) >= lambda_star(spec));
          // Each prune lowers tau* by exactly one.
          CHECK(static_cast<int64_t>(r.log.size()) == ts - tau);
        }
        return;
      }
      for (int64_t x = 1; x <= 6; ++x) {
        n[d] = x;
        rec(d + 1);
      }
    };
    rec(0);
  }
}
