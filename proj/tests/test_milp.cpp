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

#include <chrono>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "backhaul/milp.hpp"
#include "backhaul/pinwheel.hpp"
#include "test_trees.hpp"

#ifndef BACKHAUL_DATA_DIR
#define BACKHAUL_DATA_DIR "data"
#endif

using namespace backhaul;
using namespace backhaul::milp;

namespace {

TreeTopology example_tree() { return load_tree_file(std::string(BACKHAUL_DATA_DIR) + "/example_tree.json").tree; }

std::vector<Rational> caps_of(std::initializer_list<int64_t> c) {
  std::vector<Rational> out;
  for (int64_t x : c) out.emplace_back(x);
  return out;
}

int var(const MilpModel& m, const std::string& name) {
  auto v = m.find(name);
  REQUIRE_MESSAGE(v.has_value(), name);
  return *v;
}

// Rows whose name starts with `prefix`, evaluated on a sparse assignment.
bool rows_hold(const MilpModel& m, const std::string& prefix, const std::map<int, Rational>& vals) {
  bool any = false;
  for (const Constraint& c : m.constraints()) {
    if (c.name.rfind(prefix, 0) != 0) continue;
    any = true;
    Rational lhs;
    for (const Term& t : c.terms) lhs += t.coef * vals.at(t.var);
    if (c.sense == Sense::kLe && lhs > c.rhs) return false;
    if (c.sense == Sense::kGe && lhs < c.rhs) return false;
    if (c.sense == Sense::kEq && lhs != c.rhs) return false;
  }
  REQUIRE_MESSAGE(any, prefix);
  return true;
}

// Exhaustive envelope check: z = b*y is the only value (on a 1/4 grid inside
// z's bounds) that the rows accept, for every binary b and grid y.
void check_envelope(const MilpModel& m, const std::string& prefix, int z, int b, int y, const Rational& y_step) {
  const Variable& yv = m.variables()[y];
  const Variable& zv = m.variables()[z];
  for (int64_t bb = 0; bb <= 1; ++bb) {
    for (Rational yy = yv.lower; yy <= yv.upper; yy += y_step) {
      for (Rational zz = zv.lower; zz <= zv.upper; zz += Rational(1, 4)) {
        const bool ok = rows_hold(m, prefix, {{z, zz}, {b, bb}, {y, yy}});
        CHECK_MESSAGE(ok == (zz == Rational(bb) * yy), prefix, " b=", bb, " y=", yy, " z=", zz);
      }
    }
  }
}

// Minimal LP reader: row name -> (var -> coef), sense, rhs; plus the sets of
// general and binary names and the bounds.
struct ParsedLp {
  bool maximize = false;
  std::map<std::string, std::map<std::string, Rational>> rows;
  std::map<std::string, std::string> senses;
  std::map<std::string, Rational> rhs;
  std::map<std::string, std::pair<Rational, Rational>> bounds;
  std::vector<std::string> generals, binaries;
};

ParsedLp parse_lp(const std::string& text) {
  ParsedLp out;
  std::istringstream in(text);
  std::string line, section, cur;
  std::string pending;
  auto flush_row = [&](const std::string& body) {
    std::istringstream rs(body);
    std::string tok;
    rs >> tok;
    REQUIRE(tok.back() == ':');
    const std::string name = tok.substr(0, tok.size() - 1);
    REQUIRE_MESSAGE(!out.rows.contains(name), name);
    auto& row = out.rows[name];
    int sign = 1;
    while (rs >> tok) {
      if (tok == "+") {
        sign = 1;
      } else if (tok == "-") {
        sign = -1;
      } else if (tok == "<=" || tok == ">=" || tok == "=") {
        out.senses[name] = tok;
        std::string r;
        rs >> r;
        out.rhs[name] = Rational::parse(r);
      } else {
        const Rational coef = Rational::parse(tok) * Rational(sign);
        std::string v;
        rs >> v;
        row[v] += coef;
      }
    }
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '\\') continue;
    if (line == "Maximize" || line == "Minimize") {
      out.maximize = line == "Maximize";
      section = "obj";
      continue;
    }
    if (line == "Subject To" || line == "Bounds" || line == "Generals" || line == "Binaries" || line == "End") {
      if (!pending.empty()) flush_row(pending);
      pending.clear();
      section = line;
      continue;
    }
    if (section == "Subject To") {
      if (line.rfind("  ", 0) == 0) {
        pending += " " + line;
      } else {
        if (!pending.empty()) flush_row(pending);
        pending = line;
      }
    } else if (section == "Bounds") {
      std::istringstream bs(line);
      std::string lo, le1, name, le2, hi;
      bs >> lo >> le1 >> name >> le2 >> hi;
      out.bounds[name] = {Rational::parse(lo), Rational::parse(hi)};
    } else if (section == "Generals" || section == "Binaries") {
      std::istringstream ns(line);
      std::string name;
      while (ns >> name) (section == "Generals" ? out.generals : out.binaries).push_back(name);
    }
  }
  return out;
}

const char* sense_of(Sense s) { return s == Sense::kLe ? "<=" : s == Sense::kGe ? ">=" : "="; }

// Every model row must reappear as a positive multiple in the parsed text.
void check_round_trip(const MilpModel& m) {
  const ParsedLp p = parse_lp(emit_lp(m));
  CHECK(p.maximize == m.maximize);
  for (const Constraint& c : m.constraints()) {
    REQUIRE_MESSAGE(p.rows.contains(c.name), c.name);
    const auto& row = p.rows.at(c.name);
    CHECK(p.senses.at(c.name) == sense_of(c.sense));
    std::map<std::string, Rational> want;
    for (const Term& t : c.terms) want[m.variables()[t.var].name] += t.coef;
    std::erase_if(want, [](const auto& kv) { return kv.second.is_zero(); });
    if (want.empty()) continue;
    REQUIRE(row.size() == want.size());
    const Rational scale = row.begin()->second / want.at(row.begin()->first);
    CHECK(scale.sign() > 0);
    for (const auto& [name, coef] : want) CHECK(row.at(name) == coef * scale);
    CHECK(p.rhs.at(c.name) == c.rhs * scale);
  }
  size_t bins = 0, gens = 0;
  for (const Variable& v : m.variables()) {
    if (v.kind == VarKind::kBinary) ++bins;
    if (v.kind == VarKind::kInteger) ++gens;
    if (v.kind != VarKind::kBinary) {
      REQUIRE(p.bounds.contains(v.name));
      CHECK(p.bounds.at(v.name).first == Rational(v.lower.floor()));
      CHECK(p.bounds.at(v.name).second == Rational(v.upper.ceil()));
    }
  }
  CHECK(p.binaries.size() == bins);
  CHECK(p.generals.size() == gens);
}

Report node_report(const MilpModel& m, std::vector<int64_t> k, std::vector<int64_t> sigma,
                   std::vector<std::string>* errs = nullptr) {
  std::vector<std::string> local;
  std::vector<std::string>& e = errs ? *errs : local;
  const std::vector<Rational> vals = node_certificate(m, k, sigma, &e);
  Report r = evaluate(m, vals);
  r.errors.insert(r.errors.end(), e.begin(), e.end());
  return r;
}

}  // namespace

TEST_CASE("binary_expand examples") {
  CHECK(binary_expand(5, 9) == std::vector<int>{1, 0, 1, 0});
  CHECK(binary_expand(9, 9) == std::vector<int>{1, 0, 0, 1});
  CHECK(binary_expand(0, 9) == std::vector<int>{0, 0, 0, 0});
  CHECK(binary_expand(0, 1) == std::vector<int>{0});
  CHECK(binary_expand(7, 8) == std::vector<int>{1, 1, 1, 0});
  CHECK_THROWS_AS(binary_expand(10, 9), std::out_of_range);
  CHECK_THROWS_AS(binary_expand(-1, 9), std::out_of_range);
  CHECK(bit_count(2) == 2);
  CHECK(bit_count(10) == 4);
  CHECK(bit_count(16) == 5);
}

TEST_CASE("binary_expand sums back to the value") {
  for (int64_t km = 1; km <= 70; ++km) {
    for (int64_t v = 0; v <= km; ++v) {
      const std::vector<int> b = binary_expand(v, km);
      CHECK(b.size() == static_cast<size_t>(bit_count(km)));
      int64_t s = 0;
      for (size_t l = 0; l < b.size(); ++l) s += int64_t{b[l]} << l;
      CHECK(s == v);
    }
  }
}

TEST_CASE("model bookkeeping rejects bad input") {
  MilpModel m;
  m.add_var("a", VarKind::kInteger, 0, 3);
  CHECK_THROWS_AS(m.add_var("a", VarKind::kInteger, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(m.add_var("b", VarKind::kReal, 2, 1), std::invalid_argument);
  m.add_constraint({"c", "f", false, {{0, 1}}, Sense::kLe, 2});
  CHECK_THROWS_AS(m.add_constraint({"c", "f", false, {{0, 1}}, Sense::kLe, 2}), std::invalid_argument);
  CHECK_THROWS_AS(m.add_constraint({"d", "f", false, {{5, 1}}, Sense::kLe, 2}), std::invalid_argument);
}

TEST_CASE("model invariants: declared references and binary bounds") {
  const MilpModel m = build_global_model(example_tree(), Rational(1), 10);
  for (const Variable& v : m.variables()) {
    if (v.kind == VarKind::kBinary) {
      CHECK(v.lower == Rational(0));
      CHECK(v.upper == Rational(1));
    }
  }
  for (const Constraint& c : m.constraints()) {
    for (const Term& t : c.terms) CHECK(t.var < static_cast<int>(m.variables().size()));
  }
}

TEST_CASE("single child model is degenerate") {
  const MilpModel m = build_node_model(caps_of({6}), Rational(1), 4);
  CHECK(m.find("n_perm_0_0").has_value());
  CHECK_FALSE(m.find("n_perm_0_1").has_value());
  CHECK_FALSE(m.find("n_kj_1_1").has_value());
  CHECK_FALSE(m.find("n_r_0_1").has_value());
  CHECK(node_report(m, {1}, {6}).passed());
  CHECK(node_report(m, {3}, {2}).passed());
  CHECK_FALSE(node_report(m, {3}, {3}).family_passed("slice_capacity"));
}

TEST_CASE("node model size regression") {
  const MilpModel m = build_node_model(caps_of({10, 10, 10, 10, 10}), Rational(1), 10);
  // Closed form with L = bit_count(k_max):
  //   (2L + 3)/2 * M^2 + (10L + 9)/2 * M - L.
  const int64_t M = 5, L = 4;
  CHECK(m.count(VarKind::kBinary) == 256);
  CHECK(static_cast<int64_t>(m.count(VarKind::kBinary)) == ((2 * L + 3) * M * M + (10 * L + 9) * M) / 2 - L);
  for (int64_t km : {3, 7, 20, 100}) {
    for (int64_t mm = 1; mm <= 7; ++mm) {
      const int64_t ll = bit_count(km);
      const MilpModel x = build_node_model(std::vector<Rational>(mm, Rational(4)), Rational(1), km);
      CHECK(static_cast<int64_t>(x.count(VarKind::kBinary)) == ((2 * ll + 3) * mm * mm + (10 * ll + 9) * mm) / 2 - ll);
    }
  }
}

TEST_CASE("binary count is exactly quadratic in the child count") {
  // For fixed k_max the count is a quadratic in M: second differences are
  // constant and positive.
  for (int64_t km : {6, 10, 40}) {
    std::vector<int64_t> bins, rows;
    for (int M = 2; M <= 8; ++M) {
      const MilpModel m = build_node_model(std::vector<Rational>(M, Rational(8)), Rational(1), km);
      bins.push_back(static_cast<int64_t>(m.count(VarKind::kBinary)));
      rows.push_back(static_cast<int64_t>(m.constraints().size()));
    }
    for (size_t i = 2; i < bins.size(); ++i) {
      const int64_t d2 = bins[i] - 2 * bins[i - 1] + bins[i - 2];
      CHECK(d2 > 0);
      CHECK(d2 == bins[2] - 2 * bins[1] + bins[0]);
      const int64_t r2 = rows[i] - 2 * rows[i - 1] + rows[i - 2];
      CHECK(r2 > 0);
    }
  }
}

TEST_CASE("global model size is the sum of its node blocks") {
  const TreeTopology t = example_tree();
  const MilpModel g = build_global_model(t, Rational(1), 10);
  const MilpModel n = build_node_model(caps_of({18, 18, 18, 18, 18}), Rational(1), 10);
  // Node blocks differ only in the sigma variables they own.
  CHECK(g.count(VarKind::kBinary) == n.count(VarKind::kBinary) + t.aps().size());
}

TEST_CASE("McCormick envelopes are exact for binary factors") {
  const MilpModel m = build_node_model(caps_of({5, 7, 9}), Rational(1), 6);
  check_envelope(m, "n_zeta_0_1_", var(m, "n_zeta_0_1"), var(m, "n_perm_0_1"), var(m, "n_k_1"), Rational(1));
  check_envelope(m, "n_xi_0_2_1_", var(m, "n_xi_0_2_1"), var(m, "n_kapj_0_1"), var(m, "n_r_0_2"), Rational(1));
  check_envelope(m, "n_u_1_2_0_", var(m, "n_u_1_2_0"), var(m, "n_kaps_1_2_0"), var(m, "n_mu_1_2"), Rational(1, 4));
  check_envelope(m, "n_v_0_1_", var(m, "n_v_0_1"), var(m, "n_nu_0_1"), var(m, "n_mu_0_1"), Rational(1, 4));
  check_envelope(m, "n_dx_0_2_", var(m, "n_dx_0_2"), var(m, "n_chi_0_2"), var(m, "n_rhox_0"), Rational(1, 2));
  check_envelope(m, "n_wy_2_0_", var(m, "n_wy_2_0"), var(m, "n_psi_2_0"), var(m, "n_ay_2"), Rational(1, 2));
  check_envelope(m, "n_ix_1_", var(m, "n_ix_1"), var(m, "n_theta_1"), var(m, "n_ax_1"), Rational(1, 2));
  check_envelope(m, "n_p_0_0_1_", var(m, "n_p_0_0_1"), var(m, "n_nu_0_0"), var(m, "n_chi_0_1"), Rational(1));
}

TEST_CASE("slice envelope: gamma equals lambda*sigma*kappa") {
  const MilpModel m = build_node_model(caps_of({6}), Rational(3, 2), 4);
  const int g = var(m, "n_gam_0_1"), s = var(m, "n_sigma_0"), k = var(m, "n_kap_0_1");
  for (int64_t b = 0; b <= 1; ++b) {
    for (int64_t sv = 0; sv <= 4; ++sv) {
      for (Rational gv; gv <= Rational(6); gv += Rational(1, 4)) {
        const bool ok = rows_hold(m, "n_gam_0_1_", {{g, gv}, {s, sv}, {k, b}});
        CHECK(ok == (gv == Rational(3, 2) * Rational(sv) * Rational(b)));
      }
    }
  }
}

TEST_CASE("node certificates on IS-schedulable vectors pass every family") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int iter = 0; iter < 400 && checked < 120; ++iter) {
    const int M = 1 + static_cast<int>(rng() % 6);
    std::vector<int64_t> k(M);
    for (auto& x : k) x = 1 + static_cast<int64_t>(rng() % 16);
    if (!pinwheel::is_schedulable(KVector(k))) continue;
    ++checked;
    // Unsorted input, a pruned child and sigma at the slice limit.
    std::shuffle(k.begin(), k.end(), rng);
    k.push_back(kInfinity);
    std::vector<Rational> caps;
    std::vector<int64_t> sigma;
    for (size_t i = 0; i < k.size(); ++i) {
      caps.emplace_back(1 + static_cast<int64_t>(rng() % 40));
      sigma.push_back(k[i] == kInfinity ? 0 : floor_div(caps.back(), Rational(k[i])));
    }
    const MilpModel m = build_node_model(caps, Rational(1), 16);
    const Report r = node_report(m, k, sigma);
    CAPTURE(KVector(k).to_string());
    CHECK(r.errors.empty());
    for (const FamilyReport& f : r.families) CHECK_MESSAGE(f.violated == 0, f.name, " ", f.first_violation);
  }
  CHECK(checked >= 100);
}

TEST_CASE("two-child model: certificate exists exactly at density <= 1") {
  const MilpModel m = build_node_model(caps_of({3, 3}), Rational(1), 3);
  for (int64_t a = 1; a <= 3; ++a) {
    for (int64_t b = 1; b <= 3; ++b) {
      std::vector<std::string> errs;
      const Report r = node_report(m, {a, b}, {0, 0}, &errs);
      const bool fits = a * b >= a + b;
      CAPTURE(a);
      CAPTURE(b);
      CHECK(r.passed() == fits);
    }
  }
}

TEST_CASE("unsorted permutation fails the sorting families") {
  const MilpModel m = build_node_model(caps_of({9, 9, 9}), Rational(1), 8);
  std::vector<std::string> errs;
  std::vector<Rational> v = node_certificate(m, std::vector<int64_t>{2, 4, 8}, std::vector<int64_t>{1, 1, 1}, &errs);
  REQUIRE(errs.empty());
  REQUIRE(evaluate(m, v).passed());
  // Swap sorted positions 0 and 1 consistently through the permutation block.
  for (int j = 0; j < 3; ++j) {
    std::swap(v[var(m, "n_perm_0_" + std::to_string(j))], v[var(m, "n_perm_1_" + std::to_string(j))]);
    std::swap(v[var(m, "n_zeta_0_" + std::to_string(j))], v[var(m, "n_zeta_1_" + std::to_string(j))]);
  }
  std::swap(v[var(m, "n_k0_0")], v[var(m, "n_k0_1")]);
  const Report r = evaluate(m, v);
  CHECK(r.family_passed("perm_rows"));
  CHECK(r.family_passed("perm_link"));
  CHECK_FALSE(r.family_passed("sorted"));
}

TEST_CASE("example tree: DSUM bundle certifies, k+1 on a saturated link does not") {
  const TreeTopology t = example_tree();
  const dsum::DsumResult res = dsum::solve(t, Rational(1), 10);
  REQUIRE(res.bundle.sigma == 17);
  const MilpModel m = build_global_model(t, Rational(1), 10);
  const Report r = check_certificate(m, t, res.bundle);
  CAPTURE(r.to_json().dump());
  CHECK(r.passed());
  std::set<std::string> gated;
  for (const FamilyReport& f : r.families) {
    if (f.gated) gated.insert(f.name);
  }
  CHECK(gated.contains("sxy"));
  CHECK(gated.contains("reciprocal"));

  // Objective value equals the admitted flows.
  const std::vector<Rational> vals = global_certificate(m, t, res.bundle);
  Rational obj;
  for (const Term& tm : m.objective) obj += tm.coef * vals[tm.var];
  CHECK(obj == Rational(17));

  bool mutated = false;
  for (size_t v = 1; v < t.size() && !mutated; ++v) {
    dsum::SolutionBundle b = res.bundle;
    dsum::NodeSolution& s = b.nodes[v];
    if (s.k == kInfinity || s.sigma == 0) continue;
    if (Rational(s.sigma) * Rational(s.k + 1) <= t.node(static_cast<int>(v)).capacity) continue;
    s.k += 1;
    mutated = true;
    const Report bad = check_certificate(m, t, b);
    CHECK_FALSE(bad.family_passed("slice_capacity"));
  }
  CHECK(mutated);
}

TEST_CASE("truncated k_max: the example bundle is a point of value >= 16") {
  const TreeTopology t = example_tree();
  const MilpModel m = build_global_model(t, Rational(1), 10, 6);
  const dsum::DsumResult res = dsum::solve(t, Rational(1), 10);
  const Report r = check_certificate(m, t, res.bundle);
  CHECK(r.passed());
  CHECK(res.bundle.sigma >= 16);
}

TEST_CASE("random tree DSUM bundles certify") {
  std::mt19937_64 rng(41);
  const Rational lambdas[] = {Rational(1), Rational(1, 2), Rational(2, 3)};
  for (int iter = 0; iter < 30; ++iter) {
    const int depth = 2 + static_cast<int>(rng() % 2);
    const TreeTopology t = backhaul::testing::random_tree(rng, depth, depth == 2 ? 4 : 3, 4);
    const Rational lambda = lambdas[rng() % 3];
    const int64_t tau = depth + static_cast<int64_t>(rng() % 6);
    const dsum::DsumResult res = dsum::solve(t, lambda, tau);
    const MilpModel m = build_global_model(t, lambda, tau);
    const Report r = check_certificate(m, t, res.bundle);
    CAPTURE(emit_tree(t, lambda).dump());
    CAPTURE(tau);
    CAPTURE(r.to_json().dump());
    CHECK(r.passed());
  }
}

TEST_CASE("root AP and short deadlines") {
  nlohmann::json doc = {{"root", {{"id", "r"}, {"flows", 1}, {"flow_capacity_num", 1}}}};
  const TreeTopology t = load_tree(doc).tree;
  const MilpModel m = build_global_model(t, Rational(1), 1);
  const dsum::DsumResult res = dsum::solve(t, Rational(1), 1);
  CHECK(res.bundle.sigma == 1);
  CHECK(check_certificate(m, t, res.bundle).passed());
  // Below the route length nothing is admitted and the zero bundle certifies.
  const TreeTopology f = example_tree();
  const dsum::DsumResult zero = dsum::solve(f, Rational(1), 1);
  CHECK(zero.bundle.sigma == 0);
  CHECK(check_certificate(build_global_model(f, Rational(1), 1), f, zero.bundle).passed());
}

TEST_CASE("LP emission parses back and is deterministic") {
  const MilpModel n = build_node_model(caps_of({5, 7, 9, 4}), Rational(3, 2), 9);
  check_round_trip(n);
  const MilpModel g = build_global_model(example_tree(), Rational(2, 3), 10);
  check_round_trip(g);
  CHECK(emit_lp(g) == emit_lp(build_global_model(example_tree(), Rational(2, 3), 10)));
  const MilpModel empty;
  const std::string e = emit_lp(empty);
  CHECK(e.find("Subject To") != std::string::npos);
  CHECK(e.find("End") != std::string::npos);
}

TEST_CASE("LP emission of a large model is fast") {
  const MilpModel m = build_node_model(std::vector<Rational>(14, Rational(20)), Rational(1), 40);
  REQUIRE(m.constraints().size() >= 10000);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string text = emit_lp(m);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s < 1.0);
  CHECK(text.size() > 100000);
}
