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

#include "backhaul/milp.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "backhaul/pinwheel.hpp"

namespace backhaul::milp {
namespace {

std::string cat(const std::string& p, std::initializer_list<int64_t> idx, const char* base) {
  std::string s = p + base;
  for (int64_t i : idx) s += "_" + std::to_string(i);
  return s;
}

Rational pow2(int e) { return Rational(int64_t{1} << e); }

// Range of sum(coef * var) over the variable bounds.
std::pair<Rational, Rational> row_range(const MilpModel& m, const std::vector<Term>& terms) {
  Rational lo, hi;
  for (const Term& t : terms) {
    const Variable& v = m.variables()[t.var];
    if (t.coef.sign() >= 0) {
      lo += t.coef * v.lower;
      hi += t.coef * v.upper;
    } else {
      lo += t.coef * v.upper;
      hi += t.coef * v.lower;
    }
  }
  return {lo, hi};
}

class Builder {
 public:
  explicit Builder(MilpModel& m) : m_(m) {}

  int var(const std::string& name, VarKind kind, Rational lo, Rational hi) {
    return m_.add_var(name, kind, std::move(lo), std::move(hi));
  }
  int bin(const std::string& name) { return var(name, VarKind::kBinary, 0, 1); }

  void row(const std::string& family, const std::string& name, std::vector<Term> terms, Sense sense, Rational rhs,
           bool gated = false) {
    m_.add_constraint(Constraint{name, family, gated, std::move(terms), sense, std::move(rhs)});
  }

  // Row that binds only when every gate binary is 1; the relaxation constant is
  // derived from the variable bounds.
  void gated_row(const std::string& family, const std::string& name, std::vector<Term> terms, Sense sense,
                 Rational rhs, const std::vector<int>& gates, bool theta_gated = false) {
    if (sense == Sense::kEq) {
      gated_row(family, name + "_le", terms, Sense::kLe, rhs, gates, theta_gated);
      gated_row(family, name + "_ge", std::move(terms), Sense::kGe, std::move(rhs), gates, theta_gated);
      return;
    }
    auto [lo, hi] = row_range(m_, terms);
    Rational big = sense == Sense::kLe ? hi - rhs : rhs - lo;
    if (big.sign() < 0) big = Rational(0);
    const Rational g(static_cast<int64_t>(gates.size()));
    for (int gv : gates) terms.push_back({gv, sense == Sense::kLe ? big : -big});
    rhs += sense == Sense::kLe ? big * g : -(big * g);
    row(family, name, std::move(terms), sense, std::move(rhs), theta_gated);
  }

  // z = b * y for binary b and y within [ylo, yhi].
  void mccormick(const std::string& family, const std::string& name, int z, int b, int y, bool gated = false) {
    const Rational ylo = m_.variables()[y].lower, yhi = m_.variables()[y].upper;
    row(family, name + "_a", {{z, 1}, {b, -yhi}}, Sense::kLe, 0, gated);
    row(family, name + "_b", {{z, 1}, {b, -ylo}}, Sense::kGe, 0, gated);
    row(family, name + "_c", {{z, 1}, {y, -1}, {b, -ylo}}, Sense::kLe, -ylo, gated);
    row(family, name + "_d", {{z, 1}, {y, -1}, {b, -yhi}}, Sense::kGe, -yhi, gated);
  }

  MilpModel& model() { return m_; }

 private:
  MilpModel& m_;
};

struct BlockVars {
  std::vector<int> k;
  std::vector<int> act;
};

// The schedulability block for one node's children. sigma[i] are the
// admission variables of the children, created by the caller.
BlockVars add_block(Builder& b, const std::string& P, std::span<const Rational> caps, std::span<const int> sigma) {
  MilpModel& m = b.model();
  const int M = static_cast<int>(caps.size());
  const int64_t K = m.k_max;
  const int L = m.bits;
  const Rational& lambda = m.lambda;
  const Rational bitmax = pow2(L) - Rational(1);
  BlockVars out;

  // Uplink k, binary expansion, activity and slice capacity per child.
  for (int i = 0; i < M; ++i) {
    const int k = b.var(cat(P, {i}, "k"), VarKind::kInteger, 1, K);
    const int act = b.bin(cat(P, {i}, "act"));
    out.k.push_back(k);
    out.act.push_back(act);
    std::vector<Term> expand{{k, 1}};
    std::vector<Term> cap;
    for (int l = 0; l < L; ++l) {
      const int kap = b.bin(cat(P, {i, l}, "kap"));
      expand.push_back({kap, -pow2(l)});
      const int gam = b.var(cat(P, {i, l}, "gam"), VarKind::kReal, 0, caps[i]);
      // gamma = lambda * sigma * kappa; lambda*sigma lies in [0, c].
      const std::string gn = cat(P, {i, l}, "gam");
      b.row("slice_mccormick", gn + "_a", {{gam, 1}, {sigma[i], -lambda}}, Sense::kLe, 0);
      b.row("slice_mccormick", gn + "_b", {{gam, 1}, {kap, -caps[i]}}, Sense::kLe, 0);
      b.row("slice_mccormick", gn + "_c", {{gam, 1}, {sigma[i], -lambda}, {kap, -caps[i]}}, Sense::kGe, -caps[i]);
      cap.push_back({gam, pow2(l)});
    }
    b.row("kappa_link", cat(P, {i}, "kappa_link"), expand, Sense::kEq, 0);
    b.row("slice_capacity", cat(P, {i}, "slice_capacity"), cap, Sense::kLe, caps[i]);
    const Rational smax = m.variables()[sigma[i]].upper;
    b.row("activity", cat(P, {i}, "act_sigma"), {{sigma[i], 1}, {act, -smax}}, Sense::kLe, 0);
    b.row("activity", cat(P, {i}, "act_k"), {{k, 1}, {act, Rational(K - 1)}}, Sense::kGe, K);
  }

  // Sorting permutation k0 = Phi k, with active entries first.
  std::vector<int> k0(M), a0(M);
  std::vector<std::vector<int>> perm(M, std::vector<int>(M));
  for (int i = 0; i < M; ++i) {
    k0[i] = b.var(cat(P, {i}, "k0"), VarKind::kInteger, 1, K);
    a0[i] = b.bin(cat(P, {i}, "a0"));
    for (int j = 0; j < M; ++j) perm[i][j] = b.bin(cat(P, {i, j}, "perm"));
  }
  for (int i = 0; i < M; ++i) {
    std::vector<Term> rsum, csum, link{{k0[i], 1}};
    for (int j = 0; j < M; ++j) {
      rsum.push_back({perm[i][j], 1});
      csum.push_back({perm[j][i], 1});
      const int zeta = b.var(cat(P, {i, j}, "zeta"), VarKind::kReal, 0, K);
      b.mccormick("perm_mccormick", cat(P, {i, j}, "zeta"), zeta, perm[i][j], out.k[j]);
      link.push_back({zeta, -1});
      b.row("perm_activity", cat(P, {i, j}, "pa_a"), {{a0[i], 1}, {out.act[j], -1}, {perm[i][j], 1}}, Sense::kLe, 1);
      b.row("perm_activity", cat(P, {i, j}, "pa_b"), {{out.act[j], 1}, {a0[i], -1}, {perm[i][j], 1}}, Sense::kLe, 1);
    }
    b.row("perm_rows", cat(P, {i}, "perm_row"), rsum, Sense::kEq, 1);
    b.row("perm_cols", cat(P, {i}, "perm_col"), csum, Sense::kEq, 1);
    b.row("perm_link", cat(P, {i}, "perm_link"), link, Sense::kEq, 0);
    if (i + 1 < M) {
      b.row("sorted", cat(P, {i}, "sorted"), {{k0[i], 1}, {k0[i + 1], -1}}, Sense::kLe, 0);
      b.row("sorted", cat(P, {i}, "act_sorted"), {{a0[i + 1], 1}, {a0[i], -1}}, Sense::kLe, 0);
    }
  }

  // IS iterations. kj[j][i] is k_i^j for i >= j.
  std::vector<std::vector<int>> kj(M, std::vector<int>(M, -1));
  for (int i = 0; i < M; ++i) kj[0][i] = k0[i];
  for (int j = 1; j < M; ++j) {
    for (int i = j; i < M; ++i) kj[j][i] = b.var(cat(P, {j, i}, "kj"), VarKind::kInteger, 0, K);
  }
  std::vector<int> live(M), theta(M);
  for (int j = 0; j < M; ++j) {
    live[j] = b.bin(cat(P, {j}, "live"));
    theta[j] = b.bin(cat(P, {j}, "theta"));
  }
  std::vector<Term> cover;
  for (int j = 0; j < M; ++j) {
    cover.push_back({theta[j], 1});
    b.row("live", cat(P, {j}, "live_theta"), {{live[j], 1}, {theta[j], -1}}, Sense::kGe, 0);
    if (j + 1 < M) b.row("live", cat(P, {j}, "live_chain"), {{live[j], 1}, {live[j + 1], -1}}, Sense::kGe, 0);

    // Reached iterations keep every surviving active entry positive.
    for (int i = j; i < M; ++i) {
      b.gated_row("reached", cat(P, {j, i}, "reached"), {{kj[j][i], 1}}, Sense::kGe, 1, {live[j], a0[i]});
    }

    // Evolution k^{j+1} = k^j - r with r * k_j^j >= k_i^j via the pivot's bits.
    if (j + 1 < M) {
      std::vector<int> kapj(L);
      std::vector<Term> expand{{kj[j][j], 1}};
      for (int l = 0; l < L; ++l) {
        kapj[l] = b.bin(cat(P, {j, l}, "kapj"));
        expand.push_back({kapj[l], -pow2(l)});
      }
      b.gated_row("iter_kappa", cat(P, {j}, "iter_kappa"), expand, Sense::kEq, 0, {live[j], a0[j]});
      for (int i = j + 1; i < M; ++i) {
        const int r = b.var(cat(P, {j, i}, "r"), VarKind::kInteger, 0, K);
        std::vector<Term> ratio{{kj[j][i], -1}};
        for (int l = 0; l < L; ++l) {
          const int xi = b.var(cat(P, {j, i, l}, "xi"), VarKind::kReal, 0, K);
          b.mccormick("xi_mccormick", cat(P, {j, i, l}, "xi"), xi, kapj[l], r);
          ratio.push_back({xi, pow2(l)});
        }
        b.gated_row("ratio", cat(P, {j, i}, "ratio"), ratio, Sense::kGe, 0, {live[j], a0[i]});
        b.row("evolution", cat(P, {j, i}, "evolution"), {{kj[j + 1][i], 1}, {kj[j][i], -1}, {r, 1}}, Sense::kEq, 0);
      }
    }

    // Sxy condition at iteration j.
    std::vector<int> chi(L), psi(L);
    const int x = b.var(cat(P, {j}, "x"), VarKind::kInteger, 0, bitmax);
    const int y = b.var(cat(P, {j}, "y"), VarKind::kInteger, 0, bitmax);
    std::vector<Term> xe{{x, 1}}, ye{{y, 1}};
    for (int l = 0; l < L; ++l) {
      chi[l] = b.bin(cat(P, {j, l}, "chi"));
      psi[l] = b.bin(cat(P, {j, l}, "psi"));
      xe.push_back({chi[l], -pow2(l)});
      ye.push_back({psi[l], -pow2(l)});
    }
    b.row("xy_bits", cat(P, {j}, "x_bits"), xe, Sense::kEq, 0);
    b.row("xy_bits", cat(P, {j}, "y_bits"), ye, Sense::kEq, 0);
    b.row("xy_positive", cat(P, {j}, "x_pos"), {{x, 1}, {theta[j], -1}}, Sense::kGe, 0, true);
    b.row("xy_positive", cat(P, {j}, "y_pos"), {{y, 1}, {theta[j], -1}}, Sense::kGe, 0, true);

    const Rational rho_max(static_cast<int64_t>(M));
    const Rational alpha_max(static_cast<int64_t>(M) + 1);
    const int rhox = b.var(cat(P, {j}, "rhox"), VarKind::kReal, 0, rho_max);
    const int rhoy = b.var(cat(P, {j}, "rhoy"), VarKind::kReal, 0, rho_max);
    std::vector<Term> rx{{rhox, 1}}, ry{{rhoy, 1}};
    for (int i = j; i < M; ++i) {
      const int nu = b.bin(cat(P, {j, i}, "nu"));
      std::vector<int> eta(L);
      std::vector<Term> onehot;
      for (int n = 0; n < L; ++n) {
        eta[n] = b.bin(cat(P, {j, i, n}, "eta"));
        onehot.push_back({eta[n], 1});
      }
      b.row("eta_onehot", cat(P, {j, i}, "eta_onehot"), onehot, Sense::kEq, 1);
      const int s = b.var(cat(P, {j, i}, "s"), VarKind::kInteger, 0, bitmax * pow2(L - 1));
      std::vector<Term> spec{{s, 1}};
      for (int l = 0; l < L; ++l) {
        const int p = b.var(cat(P, {j, i, l}, "p"), VarKind::kReal, 0, 1);
        const int q = b.var(cat(P, {j, i, l}, "q"), VarKind::kReal, 0, 1);
        b.mccormick("pq_mccormick", cat(P, {j, i, l}, "p"), p, nu, chi[l]);
        b.mccormick("pq_mccormick", cat(P, {j, i, l}, "q"), q, nu, psi[l]);
        // h = p - q + psi is bit l of the chosen base.
        for (int n = 0; n < L; ++n) {
          const int phi = b.var(cat(P, {j, i, l, n}, "phi"), VarKind::kReal, 0, 1);
          const std::string fn = cat(P, {j, i, l, n}, "phi");
          b.row("phi_mccormick", fn + "_a", {{phi, 1}, {eta[n], -1}}, Sense::kLe, 0);
          b.row("phi_mccormick", fn + "_b", {{phi, 1}, {p, -1}, {q, 1}, {psi[l], -1}}, Sense::kLe, 0);
          b.row("phi_mccormick", fn + "_c", {{phi, 1}, {eta[n], -1}, {p, -1}, {q, 1}, {psi[l], -1}}, Sense::kGe,
                -1);
          spec.push_back({phi, -pow2(l + n)});
        }
      }
      b.row("specialized", cat(P, {j, i}, "specialized"), spec, Sense::kEq, 0);
      b.gated_row("specialized_slack", cat(P, {j, i}, "spec_slack"), {{kj[j][i], 1}, {s, -1}}, Sense::kGe, 0,
                  {theta[j], a0[i]}, true);
      b.gated_row("specialized_slack", cat(P, {j, i}, "spec_pos"), {{s, 1}}, Sense::kGe, 1, {theta[j], a0[i]}, true);

      // mu = 1 / s through the bits of s; masked for inactive entries.
      const int mu = b.var(cat(P, {j, i}, "mu"), VarKind::kReal, 0, 1);
      b.row("mask", cat(P, {j, i}, "mask"), {{mu, 1}, {a0[i], -1}}, Sense::kLe, 0);
      std::vector<Term> sbits{{s, 1}}, recip;
      for (int l = 0; l < L; ++l) {
        const int ks = b.bin(cat(P, {j, i, l}, "kaps"));
        sbits.push_back({ks, -pow2(l)});
        const int u = b.var(cat(P, {j, i, l}, "u"), VarKind::kReal, 0, 1);
        b.mccormick("u_mccormick", cat(P, {j, i, l}, "u"), u, ks, mu);
        recip.push_back({u, pow2(l)});
      }
      b.gated_row("spec_kappa", cat(P, {j, i}, "spec_kappa"), sbits, Sense::kEq, 0, {theta[j], a0[i]}, true);
      b.gated_row("reciprocal", cat(P, {j, i}, "reciprocal"), recip, Sense::kEq, 1, {theta[j], a0[i]}, true);
      const int v = b.var(cat(P, {j, i}, "v"), VarKind::kReal, 0, 1);
      b.mccormick("v_mccormick", cat(P, {j, i}, "v"), v, nu, mu);
      rx.push_back({v, -1});
      ry.push_back({mu, -1});
      ry.push_back({v, 1});
    }
    b.row("density", cat(P, {j}, "rhox"), rx, Sense::kEq, 0);
    b.row("density", cat(P, {j}, "rhoy"), ry, Sense::kEq, 0);

    for (int side = 0; side < 2; ++side) {
      const char* tag = side == 0 ? "x" : "y";
      const std::vector<int>& bitsv = side == 0 ? chi : psi;
      const int rho = side == 0 ? rhox : rhoy;
      const int beta = b.var(cat(P, {j}, side == 0 ? "bx" : "by"), VarKind::kInteger, 0, bitmax * rho_max);
      const int alpha = b.var(cat(P, {j}, side == 0 ? "ax" : "ay"), VarKind::kReal, 0, alpha_max);
      std::vector<Term> ceil_row{{beta, 1}}, ratio_row{{beta, 1}};
      for (int l = 0; l < L; ++l) {
        const int delta = b.var(cat(P, {j, l}, side == 0 ? "dx" : "dy"), VarKind::kReal, 0, rho_max);
        b.mccormick("delta_mccormick", cat(P, {j, l}, side == 0 ? "dx" : "dy"), delta, bitsv[l], rho);
        ceil_row.push_back({delta, -pow2(l)});
        const int omega = b.var(cat(P, {j, l}, side == 0 ? "wx" : "wy"), VarKind::kReal, 0, alpha_max);
        b.mccormick("omega_mccormick", cat(P, {j, l}, side == 0 ? "wx" : "wy"), omega, bitsv[l], alpha);
        ratio_row.push_back({omega, -pow2(l)});
      }
      b.row("ceiling", cat(P, {j}, std::string("ceil_").append(tag).c_str()), ceil_row, Sense::kGe, 0);
      b.row("ratio_xy", cat(P, {j}, std::string("ratio_").append(tag).c_str()), ratio_row, Sense::kEq, 0);
      const int iota = b.var(cat(P, {j}, side == 0 ? "ix" : "iy"), VarKind::kReal, 0, alpha_max);
      b.mccormick("iota_mccormick", cat(P, {j}, side == 0 ? "ix" : "iy"), iota, theta[j], alpha);
    }
    b.row("sxy", cat(P, {j}, "sxy"),
          {{*m.find(cat(P, {j}, "ix")), 1}, {*m.find(cat(P, {j}, "iy")), 1}}, Sense::kLe, 1, true);
  }
  if (M > 0) b.row("theta_cover", P + "theta_cover", cover, Sense::kGe, 1);
  return out;
}

// --- certificate -------------------------------------------------------------

class Filler {
 public:
  Filler(const MilpModel& m, std::vector<std::string>* errors)
      : m_(m), vals_(m.variables().size()), set_(m.variables().size(), false), errors_(errors) {}

  void set(const std::string& name, const Rational& v) {
    auto idx = m_.find(name);
    if (!idx) {
      error("no variable " + name);
      return;
    }
    vals_[*idx] = v;
    set_[*idx] = true;
  }
  void error(const std::string& e) {
    if (errors_) errors_->push_back(e);
  }
  std::vector<Rational> finish() {
    for (size_t i = 0; i < set_.size(); ++i) {
      if (!set_[i]) error("unassigned variable " + m_.variables()[i].name);
    }
    return std::move(vals_);
  }
  const MilpModel& model() const { return m_; }

 private:
  const MilpModel& m_;
  std::vector<Rational> vals_;
  std::vector<bool> set_;
  std::vector<std::string>* errors_;
};

std::vector<int> bits_of(int64_t value, int L) {
  std::vector<int> out(L, 0);
  if (value < 0 || value >= (int64_t{1} << L)) return out;
  for (int l = 0; l < L; ++l) out[l] = static_cast<int>((value >> l) & 1);
  return out;
}

int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

// k[i] == kInfinity: child not scheduled. sigma[i]: admissions of child i.
void fill_block(Filler& f, const std::string& P, std::span<const int64_t> k, std::span<const int64_t> sigma) {
  const MilpModel& m = f.model();
  const int M = static_cast<int>(k.size());
  const int64_t K = m.k_max;
  const int L = m.bits;
  std::vector<int64_t> kv(M);
  std::vector<int> act(M);
  for (int i = 0; i < M; ++i) {
    act[i] = k[i] != kInfinity;
    kv[i] = act[i] ? k[i] : K;
    if (kv[i] > K) f.error(cat(P, {i}, "k") + " exceeds k_max");
    f.set(cat(P, {i}, "k"), kv[i]);
    f.set(cat(P, {i}, "act"), act[i]);
    const std::vector<int> bits = bits_of(kv[i], L);
    for (int l = 0; l < L; ++l) {
      f.set(cat(P, {i, l}, "kap"), bits[l]);
      f.set(cat(P, {i, l}, "gam"), m.lambda * Rational(sigma[i]) * Rational(bits[l]));
    }
  }
  std::vector<int> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (act[a] != act[b]) return act[a] > act[b];
    return kv[a] < kv[b];
  });
  std::vector<int64_t> k0(M);
  std::vector<int> a0(M);
  for (int i = 0; i < M; ++i) {
    k0[i] = kv[order[i]];
    a0[i] = act[order[i]];
    f.set(cat(P, {i}, "k0"), k0[i]);
    f.set(cat(P, {i}, "a0"), a0[i]);
    for (int j = 0; j < M; ++j) {
      const int on = order[i] == j;
      f.set(cat(P, {i, j}, "perm"), on);
      f.set(cat(P, {i, j}, "zeta"), on ? kv[j] : 0);
    }
  }
  const int n_act = static_cast<int>(std::count(act.begin(), act.end(), 1));

  // Certifying iteration by replaying IS on the sorted active entries.
  int J = -1;
  std::optional<pinwheel::SxyWitness> witness;
  {
    std::vector<int64_t> cur(k0.begin(), k0.begin() + n_act);
    if (n_act == 0) J = 0;
    for (int j = 0; j < n_act && J < 0; ++j) {
      std::vector<int64_t> surv(cur.begin() + j, cur.end());
      if (compare_reciprocal_sum_to_one(surv) > 0) break;
      if (auto w = pinwheel::sxy_feasible(KVector(surv))) {
        J = j;
        witness = std::move(w);
        break;
      }
      bool dead = false;
      for (int i = j + 1; i < n_act; ++i) {
        cur[i] -= ceil_div(cur[i], cur[j]);
        dead |= cur[i] < 1;
      }
      if (dead) break;
    }
    if (J < 0) f.error(P + ": no IS iteration certifies the vector");
  }

  std::vector<std::vector<int64_t>> kj(M, std::vector<int64_t>(M, 0));
  for (int i = 0; i < M; ++i) kj[0][i] = k0[i];
  for (int j = 0; j < M; ++j) {
    const bool live = j <= J;
    f.set(cat(P, {j}, "live"), live);
    f.set(cat(P, {j}, "theta"), j == J);
    if (j > 0) {
      for (int i = j; i < M; ++i) f.set(cat(P, {j, i}, "kj"), kj[j][i]);
    }
    if (j + 1 < M) {
      const std::vector<int> pb = bits_of(kj[j][j], L);
      for (int l = 0; l < L; ++l) f.set(cat(P, {j, l}, "kapj"), pb[l]);
      for (int i = j + 1; i < M; ++i) {
        const bool apply = live && a0[i] && a0[j] && kj[j][j] > 0;
        const int64_t r = apply ? ceil_div(kj[j][i], kj[j][j]) : 0;
        f.set(cat(P, {j, i}, "r"), r);
        for (int l = 0; l < L; ++l) f.set(cat(P, {j, i, l}, "xi"), r * pb[l]);
        kj[j + 1][i] = kj[j][i] - r;
      }
    }

    // Sxy variables: from the witness at the certifying iteration, zero elsewhere.
    const bool cert = j == J && n_act > 0;
    int64_t x = 0, y = 0;
    if (j == J) {
      x = cert ? witness->x : 1;
      y = cert ? witness->y : 1;
    }
    const std::vector<int> chi = bits_of(x, L), psi = bits_of(y, L);
    if ((x >> L) != 0 || (y >> L) != 0) f.error(P + ": Sxy base exceeds the bit width");
    f.set(cat(P, {j}, "x"), x);
    f.set(cat(P, {j}, "y"), y);
    for (int l = 0; l < L; ++l) {
      f.set(cat(P, {j, l}, "chi"), chi[l]);
      f.set(cat(P, {j, l}, "psi"), psi[l]);
    }
    Rational rhox, rhoy;
    for (int i = j; i < M; ++i) {
      int nu = 0, n = 0;
      int64_t s = 0;
      Rational mu;
      if (j == J) {
        if (cert && a0[i]) {
          const size_t t = static_cast<size_t>(i - J);
          nu = witness->in_x[t];
          n = witness->exponent[t];
          s = witness->specialized[t];
          if (s != (int64_t{1} << n) * (nu ? x : y)) f.error(P + ": witness value is not base * 2^n");
          if (n >= L) f.error(P + ": witness exponent exceeds the bit width");
          mu = Rational(1, s);
        } else {
          s = y;
        }
      }
      f.set(cat(P, {j, i}, "nu"), nu);
      for (int e = 0; e < L; ++e) f.set(cat(P, {j, i, e}, "eta"), e == n);
      f.set(cat(P, {j, i}, "s"), s);
      const std::vector<int> sb = bits_of(s, L);
      for (int l = 0; l < L; ++l) {
        const int p = nu * chi[l], q = nu * psi[l];
        const int h = p - q + psi[l];
        f.set(cat(P, {j, i, l}, "p"), p);
        f.set(cat(P, {j, i, l}, "q"), q);
        for (int e = 0; e < L; ++e) f.set(cat(P, {j, i, l, e}, "phi"), (e == n) * h);
        f.set(cat(P, {j, i, l}, "kaps"), sb[l]);
        f.set(cat(P, {j, i, l}, "u"), mu * Rational(sb[l]));
      }
      f.set(cat(P, {j, i}, "mu"), mu);
      const Rational v = mu * Rational(nu);
      f.set(cat(P, {j, i}, "v"), v);
      rhox += v;
      rhoy += mu - v;
    }
    f.set(cat(P, {j}, "rhox"), rhox);
    f.set(cat(P, {j}, "rhoy"), rhoy);
    for (int side = 0; side < 2; ++side) {
      const int64_t base = side == 0 ? x : y;
      const Rational& rho = side == 0 ? rhox : rhoy;
      const std::vector<int>& bv = side == 0 ? chi : psi;
      const int64_t beta = base > 0 ? (Rational(base) * rho).ceil() : 0;
      const Rational alpha = base > 0 ? Rational(beta, base) : Rational(0);
      f.set(cat(P, {j}, side == 0 ? "bx" : "by"), beta);
      f.set(cat(P, {j}, side == 0 ? "ax" : "ay"), alpha);
      f.set(cat(P, {j}, side == 0 ? "ix" : "iy"), j == J ? alpha : Rational(0));
      for (int l = 0; l < L; ++l) {
        f.set(cat(P, {j, l}, side == 0 ? "dx" : "dy"), rho * Rational(bv[l]));
        f.set(cat(P, {j, l}, side == 0 ? "wx" : "wy"), alpha * Rational(bv[l]));
      }
    }
  }
}

std::string fmt_coef(const Rational& c) { return c.to_string(); }

int64_t lcm64(int64_t a, int64_t b) { return a / std::gcd(a, b) * b; }

const char* sense_str(Sense s) { return s == Sense::kLe ? "<=" : s == Sense::kGe ? ">=" : "="; }

}  // namespace

int MilpModel::add_var(std::string name, VarKind kind, Rational lower, Rational upper) {
  if (var_index_.contains(name)) throw std::invalid_argument("milp: duplicate variable " + name);
  if (upper < lower) throw std::invalid_argument("milp: inverted bounds on " + name);
  const int idx = static_cast<int>(vars_.size());
  var_index_.emplace(name, idx);
  vars_.push_back(Variable{std::move(name), kind, std::move(lower), std::move(upper)});
  return idx;
}

void MilpModel::add_constraint(Constraint c) {
  if (con_index_.contains(c.name)) throw std::invalid_argument("milp: duplicate constraint " + c.name);
  for (const Term& t : c.terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
      throw std::invalid_argument("milp: constraint " + c.name + " references an unknown variable");
    }
  }
  con_index_.emplace(c.name, static_cast<int>(cons_.size()));
  cons_.push_back(std::move(c));
}

std::optional<int> MilpModel::find(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

size_t MilpModel::count(VarKind kind) const {
  return static_cast<size_t>(
      std::count_if(vars_.begin(), vars_.end(), [&](const Variable& v) { return v.kind == kind; }));
}

int bit_count(int64_t k_max) {
  if (k_max < 1) throw std::out_of_range("milp: k_max must be >= 1");
  int b = 0;
  while ((k_max >> b) > 1) ++b;
  return b + 1;
}

std::vector<int> binary_expand(int64_t value, int64_t k_max) {
  if (value < 0 || value > k_max) throw std::out_of_range("binary_expand: value outside [0, k_max]");
  return bits_of(value, bit_count(k_max));
}

MilpModel build_node_model(std::span<const Rational> capacities, const Rational& lambda, int64_t k_max) {
  if (k_max < 2) throw std::invalid_argument("milp: k_max must be >= 2");
  if (lambda.sign() <= 0) throw std::invalid_argument("milp: lambda must be positive");
  MilpModel m;
  m.k_max = k_max;
  m.bits = bit_count(k_max);
  m.lambda = lambda;
  Builder b(m);
  std::vector<int> sigma;
  for (size_t i = 0; i < capacities.size(); ++i) {
    const int s = b.var("n_sigma_" + std::to_string(i), VarKind::kInteger, 0, floor_div(capacities[i], lambda));
    sigma.push_back(s);
    m.objective.push_back({s, 1});
  }
  add_block(b, "n_", capacities, sigma);
  m.blocks.push_back({"n_", -1, static_cast<int>(capacities.size())});
  return m;
}

MilpModel build_global_model(const TreeTopology& tree, const Rational& lambda, int64_t tau, int64_t k_max) {
  if (lambda.sign() <= 0) throw std::invalid_argument("milp: lambda must be positive");
  if (k_max <= 0) k_max = tau;
  k_max = std::max<int64_t>(k_max, 2);
  MilpModel m;
  m.k_max = k_max;
  m.bits = bit_count(k_max);
  m.lambda = lambda;
  m.tau = tau;
  Builder b(m);
  const size_t n = tree.size();
  std::vector<int> sigma(n, -1), kvar(n, -1);
  for (size_t v = 0; v < n; ++v) {
    const TreeNode& node = tree.node(static_cast<int>(v));
    int64_t hi = tree.subtree_flows(static_cast<int>(v));
    if (v != 0) hi = std::min(hi, floor_div(node.capacity, lambda));
    if (node.is_ap()) hi = std::min(hi, floor_div(node.flow_capacity, lambda));
    sigma[v] = b.var("s_" + std::to_string(v), VarKind::kInteger, 0, std::max<int64_t>(hi, 0));
  }
  for (size_t v = 0; v < n; ++v) {
    const TreeNode& node = tree.node(static_cast<int>(v));
    if (node.is_ap()) continue;
    std::vector<Rational> caps;
    std::vector<int> sv;
    for (int c : node.children) {
      caps.push_back(tree.node(c).capacity);
      sv.push_back(sigma[c]);
    }
    const std::string P = "n" + std::to_string(v) + "_";
    BlockVars bv = add_block(b, P, caps, sv);
    for (size_t i = 0; i < node.children.size(); ++i) kvar[node.children[i]] = bv.k[i];
    m.blocks.push_back({P, static_cast<int>(v), static_cast<int>(node.children.size())});
    std::vector<Term> cons{{sigma[v], 1}};
    for (int c : node.children) cons.push_back({sigma[c], -1});
    b.row("flow_conservation", "flow_" + std::to_string(v), cons, Sense::kEq, 0);
  }
  for (int a : tree.aps()) {
    const TreeNode& node = tree.node(a);
    const std::string s = std::to_string(a);
    const int kc = b.var("kc_" + s, VarKind::kInteger, 0, k_max);
    const int adm = b.bin("adm_" + s);
    b.row("admission_gate", "adm_gate_" + s, {{sigma[a], 1}, {adm, Rational(-node.flows)}}, Sense::kLe, 0);
    b.row("ap_round_robin", "ap_rr_" + s, {{kc, 1}, {sigma[a], -1}}, Sense::kGe, 0);
    b.row("customer_capacity", "cust_cap_" + s, {{kc, lambda}}, Sense::kLe, node.flow_capacity);
    std::vector<Term> route{{kc, 1}};
    for (int v = a; v != 0; v = tree.node(v).parent) route.push_back({kvar[v], 1});
    b.gated_row("deadline", "deadline_" + s, route, Sense::kLe, tau, {adm});
  }
  m.objective.push_back({sigma[0], 1});
  return m;
}

std::string emit_lp(const MilpModel& model) {
  std::ostringstream os;
  os << "\\ backhaul admission model\n";
  os << (model.maximize ? "Maximize\n" : "Minimize\n") << " obj:";
  if (model.objective.empty() && !model.variables().empty()) os << " 0 " << model.variables()[0].name;
  for (const Term& t : model.objective) {
    os << (t.coef.sign() < 0 ? " - " : " + ") << fmt_coef(t.coef.sign() < 0 ? -t.coef : t.coef) << " "
       << model.variables()[t.var].name;
  }
  os << "\nSubject To\n";
  auto emit_row = [&](const std::string& name, const std::vector<Term>& terms, Sense sense, const Rational& rhs) {
    int64_t scale = rhs.den();
    for (const Term& t : terms) scale = lcm64(scale, t.coef.den());
    os << " " << name << ":";
    int col = 0;
    for (const Term& t : terms) {
      const Rational c = t.coef * Rational(scale);
      if (c.is_zero()) continue;
      if (++col % 8 == 0) os << "\n  ";
      os << (c.sign() < 0 ? " - " : " + ") << (c.sign() < 0 ? -c : c).to_string() << " "
         << model.variables()[t.var].name;
    }
    if (col == 0) os << " 0 " << model.variables()[terms.empty() ? 0 : terms[0].var].name;
    os << " " << sense_str(sense) << " " << (rhs * Rational(scale)).to_string() << "\n";
  };
  for (const Constraint& c : model.constraints()) emit_row(c.name, c.terms, c.sense, c.rhs);
  // Fractional bounds become rows so every number in the file stays exact.
  for (size_t i = 0; i < model.variables().size(); ++i) {
    const Variable& v = model.variables()[i];
    if (v.kind == VarKind::kBinary) continue;
    if (!v.lower.is_integer()) emit_row("lb_" + v.name, {{static_cast<int>(i), 1}}, Sense::kGe, v.lower);
    if (!v.upper.is_integer()) emit_row("ub_" + v.name, {{static_cast<int>(i), 1}}, Sense::kLe, v.upper);
  }
  os << "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) continue;
    os << " " << v.lower.floor() << " <= " << v.name << " <= " << v.upper.ceil() << "\n";
  }
  auto section = [&](const char* title, VarKind kind) {
    if (model.count(kind) == 0) return;
    os << title << "\n";
    int col = 0;
    for (const Variable& v : model.variables()) {
      if (v.kind != kind) continue;
      os << (col++ % 10 == 0 ? (col == 1 ? " " : "\n ") : " ") << v.name;
    }
    os << "\n";
  };
  section("Generals", VarKind::kInteger);
  section("Binaries", VarKind::kBinary);
  os << "End\n";
  return os.str();
}

bool Report::passed() const {
  if (!errors.empty()) return false;
  return std::all_of(families.begin(), families.end(), [](const FamilyReport& f) { return f.violated == 0; });
}

bool Report::family_passed(const std::string& name) const {
  for (const FamilyReport& f : families) {
    if (f.name == name) return f.violated == 0;
  }
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json fams = nlohmann::json::array();
  for (const FamilyReport& f : families) {
    fams.push_back({{"family", f.name},
                    {"gated", f.gated},
                    {"rows", f.rows},
                    {"violated", f.violated},
                    {"worst", f.worst.to_string()},
                    {"first_violation", f.first_violation}});
  }
  return {{"passed", passed()}, {"families", fams}, {"errors", errors}};
}

Report evaluate(const MilpModel& model, const std::vector<Rational>& values) {
  Report rep;
  if (values.size() != model.variables().size()) {
    rep.errors.push_back("assignment size differs from the variable count");
    return rep;
  }
  for (size_t i = 0; i < values.size(); ++i) {
    const Variable& v = model.variables()[i];
    if (values[i] < v.lower || values[i] > v.upper) rep.errors.push_back("bound: " + v.name + " = " + values[i].to_string());
    if (v.kind != VarKind::kReal && !values[i].is_integer()) rep.errors.push_back("integrality: " + v.name);
  }
  std::unordered_map<std::string, size_t> fam_index;
  for (const Constraint& c : model.constraints()) {
    auto [it, inserted] = fam_index.emplace(c.family, rep.families.size());
    if (inserted) rep.families.push_back(FamilyReport{c.family, c.gated, 0, 0, Rational(0), ""});
    FamilyReport& f = rep.families[it->second];
    f.gated = f.gated || c.gated;
    ++f.rows;
    Rational lhs;
    for (const Term& t : c.terms) lhs += t.coef * values[t.var];
    Rational viol;
    if (c.sense == Sense::kLe) viol = lhs - c.rhs;
    if (c.sense == Sense::kGe) viol = c.rhs - lhs;
    if (c.sense == Sense::kEq) viol = lhs > c.rhs ? lhs - c.rhs : c.rhs - lhs;
    if (viol.sign() > 0) {
      if (f.violated++ == 0) f.first_violation = c.name;
      if (viol > f.worst) f.worst = viol;
    }
  }
  return rep;
}

std::vector<Rational> node_certificate(const MilpModel& model, std::span<const int64_t> k,
                                       std::span<const int64_t> sigma, std::vector<std::string>* errors) {
  Filler f(model, errors);
  if (model.blocks.size() != 1 || model.blocks[0].M != static_cast<int>(k.size()) || sigma.size() != k.size()) {
    f.error("node certificate: shape mismatch");
    return f.finish();
  }
  for (size_t i = 0; i < k.size(); ++i) f.set("n_sigma_" + std::to_string(i), sigma[i]);
  fill_block(f, model.blocks[0].prefix, k, sigma);
  return f.finish();
}

std::vector<Rational> global_certificate(const MilpModel& model, const TreeTopology& tree,
                                         const dsum::SolutionBundle& bundle, std::vector<std::string>* errors) {
  Filler f(model, errors);
  if (bundle.nodes.size() != tree.size()) {
    f.error("bundle does not match the tree");
    return f.finish();
  }
  for (size_t v = 0; v < tree.size(); ++v) f.set("s_" + std::to_string(v), bundle.nodes[v].sigma);
  for (const BlockInfo& blk : model.blocks) {
    const TreeNode& node = tree.node(blk.node);
    std::vector<int64_t> k, sigma;
    for (int c : node.children) {
      k.push_back(bundle.nodes[c].k);
      sigma.push_back(bundle.nodes[c].sigma);
    }
    fill_block(f, blk.prefix, k, sigma);
  }
  for (int a : tree.aps()) {
    const dsum::NodeSolution& s = bundle.nodes[a];
    int64_t kc = 0;
    for (int64_t x : s.child_k.entries()) kc = std::max(kc, x == kInfinity ? model.k_max + 1 : x);
    f.set("kc_" + std::to_string(a), kc);
    f.set("adm_" + std::to_string(a), s.sigma > 0);
  }
  return f.finish();
}

Report check_certificate(const MilpModel& model, const TreeTopology& tree, const dsum::SolutionBundle& bundle) {
  std::vector<std::string> errors;
  std::vector<Rational> vals = global_certificate(model, tree, bundle, &errors);
  Report rep = evaluate(model, vals);
  rep.errors.insert(rep.errors.begin(), errors.begin(), errors.end());
  return rep;
}

}  // namespace backhaul::milp
