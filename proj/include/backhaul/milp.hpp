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

// Mixed-integer linear model of the admission problem with the IS
// schedulability conditions linearized (binary expansions, a sorting
// permutation, McCormick envelopes), LP-format emission, and a certificate
// checker that evaluates every row exactly on an assignment derived from a
// solution bundle.

#ifndef BACKHAUL_MILP_HPP_
#define BACKHAUL_MILP_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "backhaul/dsum.hpp"
#include "backhaul/rational.hpp"
#include "backhaul/tree.hpp"
#include "json.hpp"

namespace backhaul::milp {

enum class VarKind { kBinary, kInteger, kReal };
enum class Sense { kLe, kEq, kGe };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kReal;
  Rational lower;
  Rational upper;
};

struct Term {
  int var = 0;
  Rational coef;
};

struct Constraint {
  std::string name;
  std::string family;
  bool gated = false;  // Only binding when an iteration certifies (theta_j = 1).
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  Rational rhs;
};

// One node's schedulability block: the k vector over its M children.
struct BlockInfo {
  std::string prefix;
  int node = 0;  // Tree index, or -1 for a standalone node model.
  int M = 0;
};

class MilpModel {
 public:
  // Throws std::invalid_argument on a duplicate name or inverted bounds.
  int add_var(std::string name, VarKind kind, Rational lower, Rational upper);
  // Throws std::invalid_argument on a duplicate name or unknown variable.
  void add_constraint(Constraint c);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  std::optional<int> find(const std::string& name) const;
  size_t count(VarKind kind) const;

  std::vector<Term> objective;
  bool maximize = true;
  int64_t k_max = 0;
  int bits = 0;  // floor(log2 k_max) + 1
  Rational lambda{1};
  int64_t tau = 0;
  std::vector<BlockInfo> blocks;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> con_index_;
};

int bit_count(int64_t k_max);
// Little-endian bits of length bit_count(k_max). Throws std::out_of_range.
std::vector<int> binary_expand(int64_t value, int64_t k_max);

// Block for M children with the given uplink capacities, plus per-child
// admission variables bounded by floor(c/lambda); maximizes total admissions.
MilpModel build_node_model(std::span<const Rational> capacities, const Rational& lambda, int64_t k_max);

// Per-node blocks plus flow conservation, AP bounds, customer-link capacity
// and admission-gated route deadlines. k_max <= 0 selects tau.
MilpModel build_global_model(const TreeTopology& tree, const Rational& lambda, int64_t tau, int64_t k_max = 0);

// CPLEX LP text; rows are scaled to integer coefficients.
std::string emit_lp(const MilpModel& model);

struct FamilyReport {
  std::string name;
  bool gated = false;
  size_t rows = 0;
  size_t violated = 0;
  Rational worst;                 // Largest violation.
  std::string first_violation;    // Row name.
};

struct Report {
  std::vector<FamilyReport> families;
  std::vector<std::string> errors;  // Bound violations and assignment problems.

  bool passed() const;
  bool family_passed(const std::string& name) const;
  nlohmann::json to_json() const;
};

Report evaluate(const MilpModel& model, const std::vector<Rational>& values);

// Assignment for a standalone node model: k[i] == kInfinity marks a child
// that is not scheduled. Missing pieces are reported through `errors`.
std::vector<Rational> node_certificate(const MilpModel& model, std::span<const int64_t> k,
                                       std::span<const int64_t> sigma, std::vector<std::string>* errors = nullptr);

std::vector<Rational> global_certificate(const MilpModel& model, const TreeTopology& tree,
                                         const dsum::SolutionBundle& bundle, std::vector<std::string>* errors = nullptr);

// Builds the assignment from the bundle and evaluates every row.
Report check_certificate(const MilpModel& model, const TreeTopology& tree, const dsum::SolutionBundle& bundle);

}  // namespace backhaul::milp

#endif  // BACKHAUL_MILP_HPP_
