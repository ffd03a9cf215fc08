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

#include "backhaul/dsum.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "backhaul/pinwheel.hpp"

namespace backhaul::dsum {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Option {
  int64_t k;
  int64_t u;
};

struct Segment {
  double dw;
  double du;
};

// Upper concave hull of (0,0) and (1/k, u) as increments of decreasing slope.
std::vector<Segment> hull_segments(const std::vector<Option>& opts) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (auto it = opts.rbegin(); it != opts.rend(); ++it) pts.emplace_back(1.0 / static_cast<double>(it->k), it->u);
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross < 0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  std::vector<Segment> segs;
  for (size_t i = 1; i < hull.size(); ++i) {
    segs.push_back({hull[i].first - hull[i - 1].first, hull[i].second - hull[i - 1].second});
  }
  return segs;
}

class P2Search {
 public:
  P2Search(std::span<const P2Child> children, int64_t tau_v, const Rational& lambda, P2Stats* stats)
      : children_(children), tau_v_(tau_v), lambda_(lambda), stats_(stats) {}

  TableEntry run(const TableEntry* incumbent) {
    const size_t n = children_.size();
    best_.k.assign(n, kInfinity);
    best_.admit.assign(n, 0);
    if (incumbent && incumbent->k.size() == n) seed(*incumbent);
    build_options();
    if (slots_.empty()) return best_;
    choice_.assign(slots_.size(), 0);
    dfs(0, 0, 0.0);
    return best_;
  }

 private:
  struct Slot {
    int child;
    int group;
    const std::vector<Option>* opts;
  };

  void seed(const TableEntry& inc) {
    int64_t sum = 0;
    std::vector<int64_t> admit(inc.k.size());
    for (size_t c = 0; c < inc.k.size(); ++c) {
      admit[c] = child_value(children_[c], tau_v_, inc.k[c], lambda_);
      sum += admit[c];
    }
    best_.sigma = sum;
    best_.k = inc.k;
    best_.admit = std::move(admit);
  }

  void build_options() {
    const size_t n = children_.size();
    opts_.resize(n);
    for (size_t c = 0; c < n; ++c) {
      int64_t prev = 0;
      for (int64_t k = tau_v_ - 1; k >= 1; --k) {
        const int64_t u = child_value(children_[c], tau_v_, k, lambda_);
        if (u > prev) {
          opts_[c].push_back({k, u});
          prev = u;
        }
      }
      std::reverse(opts_[c].begin(), opts_[c].end());
    }
    // Identical option lists make children interchangeable.
    std::vector<int> order;
    for (size_t c = 0; c < n; ++c) {
      if (!opts_[c].empty()) order.push_back(static_cast<int>(c));
    }
    auto same = [&](int a, int b) {
      const auto& x = opts_[a];
      const auto& y = opts_[b];
      return x.size() == y.size() &&
             std::equal(x.begin(), x.end(), y.begin(), [](const Option& p, const Option& q) {
               return p.k == q.k && p.u == q.u;
             });
    };
    std::vector<int> group(n, -1);
    std::vector<int> leaders;
    for (int c : order) {
      for (int l : leaders) {
        if (same(c, l)) {
          group[c] = group[l];
          break;
        }
      }
      if (group[c] < 0) {
        group[c] = static_cast<int>(leaders.size());
        leaders.push_back(c);
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const int ga = group[a], gb = group[b];
      if (ga == gb) return false;
      const int64_t ua = opts_[leaders[ga]].front().u, ub = opts_[leaders[gb]].front().u;
      if (ua != ub) return ua > ub;
      return leaders[ga] < leaders[gb];
    });
    for (int c : order) slots_.push_back({c, group[c], &opts_[c]});

    suffix_.assign(slots_.size() + 1, {});
    for (size_t i = slots_.size(); i-- > 0;) {
      suffix_[i] = suffix_[i + 1];
      for (const Segment& s : hull_segments(*slots_[i].opts)) suffix_[i].push_back(s);
      std::sort(suffix_[i].begin(), suffix_[i].end(),
                [](const Segment& a, const Segment& b) { return a.du * b.dw > b.du * a.dw; });
    }
  }

  // Fractional multiple-choice knapsack bound over slots i.. with density room.
  double bound(size_t i, double room) const {
    double acc = 0;
    for (const Segment& s : suffix_[i]) {
      if (room <= 0) break;
      if (s.dw <= room) {
        acc += s.du;
        room -= s.dw;
      } else {
        acc += s.du * room / s.dw;
        break;
      }
    }
    return acc;
  }

  void dfs(size_t i, int64_t sum, double density) {
    if (i == slots_.size()) {
      if (sum > best_.sigma) leaf();
      return;
    }
    const Slot& s = slots_[i];
    const size_t nopt = s.opts->size();
    size_t lo = (i > 0 && slots_[i - 1].group == s.group) ? choice_[i - 1] : 0;
    for (size_t c = lo; c <= nopt; ++c) {
      int64_t u = 0;
      double d = density;
      if (c < nopt) {
        u = (*s.opts)[c].u;
        d += 1.0 / static_cast<double>((*s.opts)[c].k);
        if (d > 1.0 + 1e-12) continue;
      }
      const double ub = static_cast<double>(sum + u) + bound(i + 1, 1.0 - d);
      if (static_cast<int64_t>(std::floor(ub + 1e-9)) <= best_.sigma) continue;
      choice_[i] = c;
      dfs(i + 1, sum + u, d);
    }
  }

  void leaf() {
    if (stats_) ++stats_->leaves;
    std::vector<std::pair<int64_t, int>> finite;
    for (size_t i = 0; i < slots_.size(); ++i) {
      const Slot& s = slots_[i];
      if (choice_[i] < s.opts->size()) finite.emplace_back((*s.opts)[choice_[i]].k, s.child);
    }
    std::stable_sort(finite.begin(), finite.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<int64_t> sorted(finite.size());
    for (size_t i = 0; i < finite.size(); ++i) sorted[i] = finite[i].first;
    if (compare_reciprocal_sum_to_one(sorted) > 0) return;
    if (stats_) ++stats_->is_checks;
    auto w = pinwheel::is_dominated_witness(sorted);
    if (!w) return;
    TableEntry e;
    e.k.assign(children_.size(), kInfinity);
    e.admit.assign(children_.size(), 0);
    for (size_t i = 0; i < finite.size(); ++i) {
      const int c = finite[i].second;
      e.k[c] = (*w)[i];
      e.admit[c] = child_value(children_[c], tau_v_, e.k[c], lambda_);
      e.sigma += e.admit[c];
    }
    best_ = std::move(e);
  }

  std::span<const P2Child> children_;
  int64_t tau_v_;
  Rational lambda_;
  P2Stats* stats_;
  std::vector<std::vector<Option>> opts_;
  std::vector<Slot> slots_;
  std::vector<std::vector<Segment>> suffix_;
  std::vector<size_t> choice_;
  TableEntry best_;
};

CyclicSchedule round_robin_n(int64_t n) {
  CyclicSchedule s;
  s.slots.resize(static_cast<size_t>(n));
  std::iota(s.slots.begin(), s.slots.end(), 0);
  return s;
}

// Lowers admissions from the last child until the total equals quota.
std::vector<int64_t> trim_admissions(std::vector<int64_t> admit, int64_t quota) {
  int64_t excess = std::accumulate(admit.begin(), admit.end(), int64_t{0}) - quota;
  for (size_t c = admit.size(); c-- > 0 && excess > 0;) {
    const int64_t r = std::min(admit[c], excess);
    admit[c] -= r;
    excess -= r;
  }
  return admit;
}

std::vector<P2Child> p2_children(const TreeTopology& tree, const std::vector<SigmaTable>& tables, int v) {
  std::vector<P2Child> out;
  for (int c : tree.node(v).children) out.push_back({tree.node(c).capacity, &tables[c]});
  return out;
}

}  // namespace

const TableEntry* SigmaTable::at(int64_t tau_v) const {
  if (tau_v < tau_min || tau_v > tau_max()) return nullptr;
  return &entries[static_cast<size_t>(tau_v - tau_min)];
}

int64_t SigmaTable::sigma(int64_t tau_v) const {
  if (entries.empty() || tau_v < tau_min) return 0;
  if (tau_v > tau_max()) return entries.back().sigma;
  return entries[static_cast<size_t>(tau_v - tau_min)].sigma;
}

SigmaTable ap_table(int node, int64_t flows, const Rational& flow_capacity, const Rational& lambda,
                    int64_t tau_max) {
  SigmaTable t;
  t.node = node;
  const int64_t cap = floor_div(flow_capacity, lambda);
  for (int64_t tv = 1; tv <= tau_max; ++tv) {
    TableEntry e;
    e.sigma = std::max<int64_t>(0, std::min({flows, tv, cap}));
    t.entries.push_back(std::move(e));
  }
  return t;
}

int64_t child_value(const P2Child& c, int64_t tau_v, int64_t k, const Rational& lambda) {
  if (k == kInfinity || k >= tau_v) return 0;
  const int64_t s = c.table->sigma(tau_v - k);
  const int64_t cap = floor_div(c.capacity, lambda * Rational(k));
  return std::max<int64_t>(0, std::min(s, cap));
}

TableEntry solve_p2(std::span<const P2Child> children, int64_t tau_v, const Rational& lambda,
                    const TableEntry* incumbent, P2Stats* stats) {
  return P2Search(children, tau_v, lambda, stats).run(incumbent);
}

DsumResult solve(const TreeTopology& tree, const Rational& lambda, int64_t tau, const DsumOptions& opt) {
  if (lambda.sign() <= 0) throw std::invalid_argument("dsum: lambda must be positive");
  if (tau < 1) throw std::invalid_argument("dsum: tau must be >= 1");
  const auto t_start = Clock::now();
  DsumResult res;
  const size_t n = tree.size();
  res.tables.resize(n);
  res.node_ms.assign(n, 0.0);
  std::vector<P2Stats> node_stats(n);

  for (int d = tree.ap_level(); d >= 0; --d) {
    const std::vector<int> nodes = tree.level(d);
    parallel_for(nodes.size(), opt.threads, [&](size_t i) {
      const int v = nodes[i];
      const auto t0 = Clock::now();
      const TreeNode& node = tree.node(v);
      if (node.is_ap()) {
        res.tables[v] = ap_table(v, node.flows, node.flow_capacity, lambda, d == 0 ? tau : tau - d);
        if (d == 0) {
          res.tables[v].tau_min = tau;
          res.tables[v].entries.erase(res.tables[v].entries.begin(), res.tables[v].entries.end() - 1);
        }
      } else {
        SigmaTable& t = res.tables[v];
        t.node = v;
        const std::vector<P2Child> kids = p2_children(tree, res.tables, v);
        t.tau_min = d == 0 ? tau : 1;
        const TableEntry* prev = nullptr;
        for (int64_t tv = t.tau_min; tv <= tau - d; ++tv) {
          t.entries.push_back(solve_p2(kids, tv, lambda, prev, &node_stats[v]));
          prev = &t.entries.back();
        }
      }
      res.node_ms[v] = ms_since(t0);
    });
    double slowest = 0;
    for (int v : nodes) slowest = std::max(slowest, res.node_ms[v]);
    res.parallel_ms += slowest;
  }
  for (const P2Stats& s : node_stats) {
    res.stats.leaves += s.leaves;
    res.stats.is_checks += s.is_checks;
  }

  // Top-down: budgets and quotas, then schedules.
  SolutionBundle& b = res.bundle;
  b.tau = tau;
  b.lambda = lambda;
  b.nodes.assign(n, NodeSolution{});
  b.nodes[0].tau_v = tau;
  b.nodes[0].sigma = res.tables[0].sigma(tau);
  b.sigma = b.nodes[0].sigma;
  std::vector<std::vector<int64_t>> admit(n);
  for (size_t v = 0; v < n; ++v) {
    const TreeNode& node = tree.node(static_cast<int>(v));
    NodeSolution& s = b.nodes[v];
    if (node.is_ap()) continue;
    const TableEntry* e = s.sigma > 0 ? res.tables[v].at(s.tau_v) : nullptr;
    std::vector<int64_t> k(node.children.size(), kInfinity);
    if (e) {
      k = e->k;
      admit[v] = trim_admissions(e->admit, s.sigma);
    } else {
      admit[v].assign(node.children.size(), 0);
    }
    s.child_k = KVector(k);
    for (size_t i = 0; i < node.children.size(); ++i) {
      NodeSolution& cs = b.nodes[node.children[i]];
      cs.k = k[i];
      cs.tau_v = k[i] == kInfinity ? 0 : s.tau_v - k[i];
      cs.sigma = admit[v][i];
    }
  }
  for (int d = 0; d <= tree.ap_level(); ++d) {
    const std::vector<int> nodes = tree.level(d);
    parallel_for(nodes.size(), opt.threads, [&](size_t i) {
      const int v = nodes[i];
      NodeSolution& s = b.nodes[v];
      if (tree.node(v).is_ap()) {
        s.child_k = KVector(std::vector<int64_t>(static_cast<size_t>(s.sigma), s.sigma));
        s.schedule = round_robin_n(s.sigma);
        return;
      }
      if (s.child_k.finite_count() == 0) return;
      auto built = pinwheel::is_schedule(s.child_k);
      if (!built) {
        throw std::runtime_error("dsum: schedule construction failed at node " + tree.node(v).id + " for " +
                                 s.child_k.to_string());
      }
      s.schedule = std::move(built->first);
    });
  }
  res.wall_ms = ms_since(t_start);
  return res;
}

std::vector<std::string> validate_bundle(const TreeTopology& tree, const SolutionBundle& b) {
  std::vector<std::string> err;
  auto fail = [&](const std::string& m) { err.push_back(m); };
  if (b.nodes.size() != tree.size()) {
    fail("node count mismatch");
    return err;
  }
  if (b.sigma != b.nodes[0].sigma) fail("sigma differs from the root admission count");
  for (size_t v = 0; v < tree.size(); ++v) {
    const TreeNode& node = tree.node(static_cast<int>(v));
    const NodeSolution& s = b.nodes[v];
    const std::string& id = node.id;
    if (s.sigma < 0) fail(id + ": negative admissions");
    if (v != 0 && s.sigma > 0) {
      if (s.k == kInfinity) {
        fail(id + ": admits flows over an unscheduled uplink");
      } else if (Rational(s.sigma) * b.lambda * Rational(s.k) > node.capacity) {
        fail(id + ": uplink slice exceeds capacity");
      }
    }
    if (node.is_ap()) {
      if (s.sigma > node.flows) fail(id + ": admits more flows than it serves");
      if (static_cast<int64_t>(s.child_k.size()) != s.sigma) {
        fail(id + ": customer k vector size differs from admissions");
        continue;
      }
      for (int64_t kc : s.child_k.entries()) {
        if (kc == kInfinity || b.lambda * Rational(kc) > node.flow_capacity) fail(id + ": customer slice exceeds capacity");
      }
    } else {
      if (s.child_k.size() != node.children.size()) {
        fail(id + ": k vector size differs from the child count");
        continue;
      }
      int64_t sum = 0;
      for (size_t i = 0; i < node.children.size(); ++i) {
        const NodeSolution& cs = b.nodes[node.children[i]];
        sum += cs.sigma;
        if (cs.k != s.child_k[i]) fail(tree.node(node.children[i]).id + ": uplink k differs from the parent's vector");
      }
      if (sum != s.sigma) fail(id + ": admissions do not add up over the children");
    }
    if (s.child_k.finite_count() > 0) {
      if (s.schedule.empty()) {
        fail(id + ": missing schedule");
      } else if (auto viol = pinwheel::verify_schedule(s.schedule, s.child_k)) {
        fail(id + ": schedule gap " + std::to_string(viol->gap) + " for task " + std::to_string(viol->task));
      }
    }
  }
  for (int a : tree.aps()) {
    const NodeSolution& s = b.nodes[a];
    if (s.sigma <= 0 || static_cast<int64_t>(s.child_k.size()) != s.sigma) continue;
    int64_t total = *std::max_element(s.child_k.entries().begin(), s.child_k.entries().end());
    for (int v = a; v != 0; v = tree.node(v).parent) {
      if (b.nodes[v].k == kInfinity) {
        total = kInfinity;
        break;
      }
      total += b.nodes[v].k;
    }
    if (total > b.tau) fail(tree.node(a).id + ": route deadline " + std::to_string(total) + " exceeds tau");
  }
  return err;
}

nlohmann::json SolutionBundle::to_json(const TreeTopology& tree) const {
  nlohmann::json nodes_j = nlohmann::json::array();
  for (size_t v = 0; v < nodes.size(); ++v) {
    const NodeSolution& s = nodes[v];
    nlohmann::json j = {{"id", tree.node(static_cast<int>(v)).id},
                        {"k", s.k == kInfinity ? nlohmann::json(nullptr) : nlohmann::json(s.k)},
                        {"tau_v", s.tau_v},
                        {"sigma", s.sigma},
                        {"child_k", s.child_k.to_string()},
                        {"schedule", s.schedule.slots}};
    nodes_j.push_back(std::move(j));
  }
  return {{"tau", tau}, {"lambda", lambda.to_string()}, {"sigma", sigma}, {"nodes", std::move(nodes_j)}};
}

SolutionBundle SolutionBundle::from_json(const TreeTopology& tree, const nlohmann::json& doc) {
  SolutionBundle b;
  b.tau = doc.at("tau").get<int64_t>();
  b.lambda = Rational::parse(doc.at("lambda").get<std::string>());
  b.sigma = doc.at("sigma").get<int64_t>();
  b.nodes.assign(tree.size(), NodeSolution{});
  std::vector<bool> seen(tree.size(), false);
  for (const auto& j : doc.at("nodes")) {
    const auto v = tree.find(j.at("id").get<std::string>());
    if (!v) throw std::invalid_argument("solution: unknown node " + j.at("id").get<std::string>());
    NodeSolution& s = b.nodes[*v];
    s.k = j.at("k").is_null() ? kInfinity : j.at("k").get<int64_t>();
    s.tau_v = j.at("tau_v").get<int64_t>();
    s.sigma = j.at("sigma").get<int64_t>();
    const std::string ck = j.at("child_k").get<std::string>();
    s.child_k = ck == "()" ? KVector{} : KVector::parse(ck);
    s.schedule.slots = j.at("schedule").get<std::vector<int>>();
    seen[*v] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("solution: missing nodes");
  }
  return b;
}

SolutionBundle urr_baseline(const TreeTopology& tree, const Rational& lambda, int64_t tau) {
  if (lambda.sign() <= 0) throw std::invalid_argument("urr: lambda must be positive");
  const int D = tree.depth();
  const size_t n = tree.size();
  // Cap per level: children kept at levels 0..D-2, customers kept at APs.
  std::vector<int64_t> cap_max(D, 1);
  for (size_t v = 0; v < n; ++v) {
    const TreeNode& node = tree.node(static_cast<int>(v));
    const int slot = node.is_ap() ? D - 1 : node.level;
    cap_max[slot] = std::max<int64_t>(cap_max[slot], node.is_ap() ? node.flows : static_cast<int64_t>(node.children.size()));
  }

  struct Eval {
    int64_t sigma = -1;
    std::vector<int64_t> value;  // Admissions through each node's uplink.
    std::vector<int64_t> k;      // Uplink k; customer k for APs in cust_k.
    std::vector<int64_t> cust_k;
  };
  auto evaluate = [&](const std::vector<int64_t>& caps) {
    Eval e;
    e.value.assign(n, 0);
    e.k.assign(n, kInfinity);
    e.cust_k.assign(n, 0);
    for (size_t v = n; v-- > 0;) {
      const TreeNode& node = tree.node(static_cast<int>(v));
      if (node.is_ap()) {
        const int64_t m = std::min(node.flows, caps[D - 1]);
        const bool ok = m > 0 && lambda * Rational(m) <= node.flow_capacity;
        e.value[v] = ok ? m : 0;
        e.cust_k[v] = ok ? m : 0;
        continue;
      }
      const int64_t m = std::min<int64_t>(static_cast<int64_t>(node.children.size()), caps[node.level]);
      auto value_at = [&](int c, int64_t k) {
        return std::min(e.value[c], floor_div(tree.node(c).capacity, lambda * Rational(k)));
      };
      std::vector<int> order(node.children.begin(), node.children.end());
      std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return value_at(a, m) > value_at(c, m); });
      std::vector<int> kept;
      for (int64_t i = 0; i < m; ++i) {
        if (value_at(order[i], m) > 0) kept.push_back(order[i]);
      }
      const int64_t k = static_cast<int64_t>(kept.size());
      int64_t sum = 0;
      for (int c : kept) {
        e.k[c] = k;
        const int64_t val = value_at(c, k);
        sum += val;
        // Record the trimmed value; the subtree is reduced top-down below.
        e.value[c] = val;
      }
      for (int c : node.children) {
        if (e.k[c] == kInfinity) e.value[c] = 0;
      }
      e.value[v] = sum;
    }
    e.sigma = e.value[0];
    return e;
  };

  Eval best;
  std::vector<int64_t> caps(D, 1);
  std::function<void(int, int64_t)> rec = [&](int d, int64_t used) {
    if (d == D) {
      Eval e = evaluate(caps);
      if (e.sigma > best.sigma) best = std::move(e);
      return;
    }
    for (int64_t c = 1; c <= cap_max[d] && used + c + (D - d - 1) <= tau; ++c) {
      caps[d] = c;
      rec(d + 1, used + c);
    }
  };
  rec(0, 0);

  SolutionBundle b;
  b.tau = tau;
  b.lambda = lambda;
  b.nodes.assign(n, NodeSolution{});
  if (best.sigma < 0) {
    // tau below the depth: nothing is admissible.
    for (size_t v = 0; v < n; ++v) {
      const TreeNode& node = tree.node(static_cast<int>(v));
      b.nodes[v].child_k = KVector(std::vector<int64_t>(node.is_ap() ? 0 : node.children.size(), kInfinity));
    }
    return b;
  }
  // Top-down quotas: a node admits at most what its parent granted.
  b.nodes[0].sigma = best.value[0];
  b.nodes[0].tau_v = tau;
  for (size_t v = 0; v < n; ++v) {
    const TreeNode& node = tree.node(static_cast<int>(v));
    NodeSolution& s = b.nodes[v];
    if (node.is_ap()) {
      const int64_t q = s.sigma;
      s.child_k = KVector(std::vector<int64_t>(static_cast<size_t>(q), q));
      s.schedule = round_robin_n(q);
      continue;
    }
    std::vector<int64_t> admit;
    std::vector<int64_t> k;
    for (int c : node.children) {
      admit.push_back(best.value[c]);
      k.push_back(best.k[c]);
    }
    admit = trim_admissions(admit, s.sigma);
    s.child_k = KVector(k);
    std::vector<int> kept;
    for (size_t i = 0; i < node.children.size(); ++i) {
      NodeSolution& cs = b.nodes[node.children[i]];
      cs.k = k[i];
      cs.sigma = admit[i];
      cs.tau_v = k[i] == kInfinity ? 0 : s.tau_v - k[i];
      if (k[i] != kInfinity) kept.push_back(static_cast<int>(i));
    }
    s.schedule.slots = kept;
  }
  b.sigma = b.nodes[0].sigma;
  return b;
}

}  // namespace backhaul::dsum
