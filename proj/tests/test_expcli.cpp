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

#include <atomic>
#include <random>
#include <set>

#include "backhaul/expcli.hpp"
#include "backhaul/pinwheel.hpp"
#include "test_trees.hpp"

using namespace backhaul;
using namespace backhaul::exp;

TEST_CASE("vector generator respects the density window and dedupes") {
  const VectorCorpus c = gen_random_vectors(8, 3, Rational(7, 10), Rational(1), 5);
  CHECK(c.vectors.size() == 3);
  CHECK_FALSE(c.truncated);
  std::set<std::string> seen;
  for (const KVector& k : c.vectors) {
    CHECK(k.size() == 8);
    const std::vector<int64_t> v = k.finite_values();
    CHECK(std::is_sorted(v.begin(), v.end()));
    for (int64_t x : v) {
      CHECK(x >= 2);
      CHECK(x <= 23);
    }
    const Density d = density_of(v);
    CHECK(d.value > 0.7);
    CHECK(d.value <= 1.0);
    CHECK(seen.insert(k.to_string()).second);
  }
  // Same seed, same corpus.
  const VectorCorpus again = gen_random_vectors(8, 3, Rational(7, 10), Rational(1), 5);
  CHECK(again.attempts == c.attempts);
  for (size_t i = 0; i < 3; ++i) CHECK(again.vectors[i] == c.vectors[i]);
}

TEST_CASE("an unreachable window truncates") {
  // Entries in [2, 11] for M = 4: few densities land in (0.99, 0.991].
  const VectorCorpus c = gen_random_vectors(4, 1000, Rational(99, 100), Rational(991, 1000), 1);
  CHECK(c.truncated);
  CHECK(c.vectors.size() < 1000);
}

TEST_CASE("density is exact beyond 64 bits") {
  std::vector<int64_t> k;
  for (int64_t p : {31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83}) k.push_back(p);
  const Density d = density_of(k);
  CHECK(d.den.size() > 19);
  CHECK(d.value == doctest::Approx(0.2565).epsilon(0.01));
  const Density half = density_of(std::vector<int64_t>{4, 4});
  CHECK(half.num == "1");
  CHECK(half.den == "2");
}

TEST_CASE("random experiment tree matches the generator contract") {
  const TreeConfig cfg;
  for (uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    const TreeTopology t = gen_random_tree(cfg, seed);
    CHECK(t.depth() == 3);
    CHECK(t.total_flows() == 400);
    for (const TreeNode& n : t.nodes()) {
      if (!n.is_ap()) {
        CHECK(n.children.size() >= 2);
        CHECK(n.children.size() <= 6);
      }
      if (n.level == 1) {
        CHECK(n.capacity >= Rational(200));
        CHECK(n.capacity <= Rational(400));
      } else if (n.level == 2) {
        CHECK(n.capacity >= Rational(50));
        CHECK(n.capacity <= Rational(100));
        CHECK(n.flow_capacity == Rational(25));
      }
    }
    CHECK(gen_random_tree(cfg, seed) == t);
  }
  TreeConfig shallow = cfg;
  shallow.depth = 2;
  shallow.cmax_mbps = {1000};
  shallow.flows = 30;
  const TreeTopology s = gen_random_tree(shallow, 4);
  CHECK(s.depth() == 2);
  CHECK(s.total_flows() == 30);
}

TEST_CASE("config JSON round trip") {
  IsSxyConfig a;
  a.seed = 42;
  a.ms = {8, 10};
  a.lo = Rational(3, 4);
  a.count = 17;
  const IsSxyConfig b = IsSxyConfig::from_json(a.to_json());
  CHECK(b.to_json() == a.to_json());
  CHECK(b.lengths() == std::vector<int>{8, 10});
  CHECK(IsSxyConfig{}.lengths().size() == 9);
  DsumExpConfig d;
  d.taus = {4, 9};
  d.tree.flows = 100;
  CHECK(DsumExpConfig::from_json(d.to_json()).to_json() == d.to_json());
  CHECK_THROWS(IsSxyConfig::from_json(nlohmann::json{{"seed", "x"}}));
}

TEST_CASE("IS contains Sxy and every retained schedule verifies") {
  IsSxyConfig cfg;
  cfg.seed = 11;
  cfg.ms = {4, 6, 8};
  cfg.count = 120;
  const IsSxyResult res = run_is_vs_sxy(cfg);
  REQUIRE(res.rows.size() == 3);
  for (const IsSxyRow& r : res.rows) {
    CHECK(r.n == 120);
    CHECK(r.is_success >= r.sxy_success);
    CHECK(r.gap_pp() >= 0);
  }
  for (const IsSxyRecord& r : res.records) {
    if (r.sxy) CHECK(r.is);
    CHECK(r.is == r.is_verified);
    CHECK(r.sxy == r.sxy_verified);
    if (r.is) {
      const KVector k(r.k);
      CHECK_FALSE(pinwheel::verify_schedule(r.is_schedule, k).has_value());
    }
    // Density above one is never schedulable; the window excludes it anyway.
    CHECK(r.density.value <= 1.0);
  }
}

TEST_CASE("CSVs are identical across worker counts") {
  IsSxyConfig cfg;
  cfg.seed = 5;
  cfg.ms = {5, 7, 9};
  cfg.count = 60;
  cfg.threads = 1;
  const IsSxyResult one = run_is_vs_sxy(cfg);
  cfg.threads = 4;
  const IsSxyResult four = run_is_vs_sxy(cfg);
  CHECK(is_sxy_csv(one.rows) == is_sxy_csv(four.rows));
  CHECK(is_sxy_records_csv(one.records) == is_sxy_records_csv(four.records));
  CHECK(is_schedules_jsonl(one.records) == is_schedules_jsonl(four.records));
  const std::string csv = is_sxy_csv(one.rows);
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(csv.rfind("M,n,", 0) == 0);

  DsumExpConfig d;
  d.seed = 3;
  d.trees = 3;
  d.taus = {3, 8, 12};
  d.tree.flows = 60;
  d.simulate = true;
  d.sim_periods = 2;
  d.threads = 1;
  const std::vector<DsumRow> r1 = run_dsum_experiment(d);
  d.threads = 3;
  const std::vector<DsumRow> r3 = run_dsum_experiment(d);
  CHECK(dsum_csv(r1) == dsum_csv(r3));
  CHECK(dsum_timing_csv(r1).rfind("tree,tau,", 0) == 0);
}

TEST_CASE("DSUM rows dominate URR, stay under the bound and simulate cleanly") {
  DsumExpConfig d;
  d.seed = 8;
  d.trees = 3;
  d.taus = {3, 5, 8, 12, 20};
  d.tree.flows = 80;
  d.simulate = true;
  d.sim_periods = 2;
  const std::vector<DsumRow> rows = run_dsum_experiment(d);
  CHECK(rows.size() == 15);
  for (const DsumRow& r : rows) {
    CAPTURE(r.tree);
    CAPTURE(r.tau);
    CHECK(r.bundle_valid);
    CHECK(r.sigma_dsum >= r.sigma_urr);
    CHECK(r.sigma_dsum <= r.capacity_bound);
    CHECK(r.flows == 80);
    CHECK(r.simulated);
    CHECK(r.sim_violations == 0);
    CHECK(r.sim_conservation);
    CHECK(r.sim_max_delay <= r.tau);
  }
  // Admission is monotone in the deadline on each tree.
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].tree == rows[i - 1].tree) CHECK(rows[i].sigma_dsum >= rows[i - 1].sigma_dsum);
  }
}

TEST_CASE("brute force agrees with DSUM on tiny trees") {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 25; ++iter) {
    const TreeTopology t = backhaul::testing::random_tree(rng, 2, 3, 3);
    const int64_t tau = 2 + static_cast<int64_t>(rng() % 5);
    const BruteForceResult bf = brute_force_sigma(t, Rational(1), tau, Decider::kOracle);
    CAPTURE(emit_tree(t).dump());
    CAPTURE(tau);
    CHECK(bf.undecided == 0);
    CHECK(dsum::solve(t, Rational(1), tau).bundle.sigma == bf.sigma);
  }
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(stream_seed(1, 0) == 1);
  CHECK(stream_seed(1, 1) != stream_seed(2, 1));
}

TEST_CASE("formatting helpers") {
  CHECK(decimal6(Rational(1, 3)) == "0.333333");
  CHECK(decimal6(Rational(10)) == "10");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
