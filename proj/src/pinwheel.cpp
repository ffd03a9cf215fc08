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

#include "backhaul/pinwheel.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <bit>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>

namespace backhaul::pinwheel {
namespace {

using u128 = unsigned __int128;

constexpr int kFracBits = 64;

int floor_log2(int64_t v) { return 63 - std::countl_zero(static_cast<uint64_t>(v)); }

// Largest a with base * 2^a <= k, or -1 if base > k.
int specialize_exponent(int64_t k, int64_t base) {
  if (base > k) return -1;
  return floor_log2(k / base);
}

// ceil(sum of 2^-a) over the given exponents, exact for a <= 64.
int64_t ceil_dyadic_sum(const std::vector<int>& exps) {
  u128 acc = 0;
  for (int a : exps) acc += u128{1} << (kFracBits - a);
  u128 whole = acc >> kFracBits;
  if (acc & ((u128{1} << kFracBits) - 1)) ++whole;
  return static_cast<int64_t>(whole);
}

struct Assignment {
  int64_t x = 1;
  int64_t y = 1;
  std::vector<uint8_t> in_x;  // Parallel to the values span.
  std::vector<int> exponent;
};

bool fits(int64_t x, int64_t y, int64_t cx, int64_t cy) {
  // cx/x + cy/y <= 1  <=>  cx*y + cy*x <= x*y
  return static_cast<__int128>(cx) * y + static_cast<__int128>(cy) * x <= static_cast<__int128>(x) * y;
}

std::optional<Assignment> sxy_search(std::span<const int64_t> values) {
  const size_t n = values.size();
  if (n == 0) return Assignment{};
  if (compare_reciprocal_sum_to_one(values) > 0) return std::nullopt;

  std::vector<int64_t> bases;
  for (int64_t k : values) {
    for (int64_t b = k; b >= 1; b >>= 1) bases.push_back(b);
  }
  std::sort(bases.begin(), bases.end(), std::greater<>());
  bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
  const int64_t kmin = *std::min_element(values.begin(), values.end());

  std::vector<int> ex(n);
  // Single base, largest first.
  for (int64_t b : bases) {
    if (b > kmin) continue;
    for (size_t i = 0; i < n; ++i) ex[i] = specialize_exponent(values[i], b);
    if (ceil_dyadic_sum(ex) <= b) {
      return Assignment{b, b, std::vector<uint8_t>(n, 1), ex};
    }
  }

  // Ordered pairs: each element takes the larger of its two specializations,
  // ties to the first base of the pair.
  std::vector<uint8_t> in_x(n);
  std::vector<int> gx, gy;
  for (size_t xi = 0; xi < bases.size(); ++xi) {
    const int64_t x = bases[xi];
    for (size_t yi = 0; yi < bases.size(); ++yi) {
      const int64_t y = bases[yi];
      if (yi == xi || std::min(x, y) > kmin) continue;  // Every element must specialize.
      gx.clear();
      gy.clear();
      for (size_t i = 0; i < n; ++i) {
        int ax = specialize_exponent(values[i], x);
        int ay = specialize_exponent(values[i], y);
        bool use_x = ax >= 0 && (ay < 0 || (x << ax) >= (y << ay));
        in_x[i] = use_x;
        ex[i] = use_x ? ax : ay;
        (use_x ? gx : gy).push_back(ex[i]);
      }
      if (gx.empty() || gy.empty()) continue;  // Covered by the single-base pass.
      if (fits(x, y, ceil_dyadic_sum(gx), ceil_dyadic_sum(gy))) {
        return Assignment{x, y, in_x, ex};
      }
    }
  }
  return std::nullopt;
}

struct SortedView {
  std::vector<int> ids;        // Finite task ids by (k, id).
  std::vector<int64_t> values;
};

SortedView sorted_view(const KVector& k) {
  SortedView v;
  for (size_t i = 0; i < k.size(); ++i) {
    if (k.finite(i)) v.ids.push_back(static_cast<int>(i));
  }
  std::stable_sort(v.ids.begin(), v.ids.end(), [&](int a, int b) { return k[a] < k[b]; });
  for (int id : v.ids) v.values.push_back(k[id]);
  return v;
}

SxyWitness to_witness(const KVector& k, const std::vector<int>& ids, const Assignment& a) {
  SxyWitness w;
  w.x = a.x;
  w.y = a.y;
  w.specialized.assign(k.size(), kInfinity);
  w.in_x.assign(k.size(), 0);
  w.exponent.assign(k.size(), 0);
  for (size_t i = 0; i < ids.size(); ++i) {
    int id = ids[i];
    w.in_x[id] = a.in_x[i];
    w.exponent[id] = a.exponent[i];
    w.specialized[id] = (a.in_x[i] ? a.x : a.y) << a.exponent[i];
  }
  return w;
}

uint64_t bit_reverse(uint64_t v, int bits) {
  uint64_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

// A unit of one group served exactly every `base` slots (or at most every
// `base` for the free-slot group). Real tasks own the bin occurrences n with
// n mod 2^a == offset.
struct Bin {
  struct Item {
    int task;
    int a;
    uint64_t offset;
  };
  uint64_t fill = 0;  // In units of 2^-max_a.
  std::vector<Item> items;

  int owner(uint64_t n) const {
    for (const Item& it : items) {
      if ((n & ((uint64_t{1} << it.a) - 1)) == it.offset) return it.task;
    }
    return CyclicSchedule::kIdle;
  }
};

// First-fit decreasing of dyadic weights into `count` unit bins. Returns false
// if the group does not fit (never happens when count = ceil of the weight).
bool pack_group(std::vector<std::pair<int, int>> tasks_and_exps, int64_t count, std::vector<Bin>& bins,
                int& max_a) {
  std::stable_sort(tasks_and_exps.begin(), tasks_and_exps.end(),
                   [](const auto& l, const auto& r) { return l.second < r.second; });
  max_a = 0;
  for (const auto& te : tasks_and_exps) max_a = std::max(max_a, te.second);
  if (max_a > 62) return false;
  const uint64_t unit = uint64_t{1} << max_a;
  bins.assign(static_cast<size_t>(count), Bin{});
  for (auto [task, a] : tasks_and_exps) {
    const uint64_t w = uint64_t{1} << (max_a - a);
    bool placed = false;
    for (Bin& b : bins) {
      if (b.fill + w <= unit) {
        b.items.push_back({task, a, bit_reverse(b.fill >> (max_a - a), a)});
        b.fill += w;
        placed = true;
        break;
      }
    }
    if (!placed) return false;
  }
  return true;
}

int64_t lcm_checked(int64_t a, int64_t b) {
  int64_t g = std::gcd(a, b);
  __int128 l = static_cast<__int128>(a / g) * b;
  if (l > static_cast<__int128>(kMaxSchedulePeriod)) throw std::length_error("schedule period exceeds cap");
  return static_cast<int64_t>(l);
}

// --- IS decision cache -------------------------------------------------------

struct VecHash {
  size_t operator()(const std::vector<int64_t>& v) const { return boost::hash_range(v.begin(), v.end()); }
};

template <typename V>
class SharedCache {
 public:
  std::optional<V> get(const std::vector<int64_t>& key) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void put(std::vector<int64_t> key, V value) {
    std::unique_lock lock(mu_);
    if (map_.size() >= kMaxEntries) map_.clear();
    map_.emplace(std::move(key), value);
  }
  void clear() {
    std::unique_lock lock(mu_);
    map_.clear();
  }

 private:
  static constexpr size_t kMaxEntries = size_t{1} << 22;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::vector<int64_t>, V, VecHash> map_;
};

SharedCache<bool>& is_cache() {
  static SharedCache<bool> cache;
  return cache;
}

using Witness = std::optional<std::vector<int64_t>>;

SharedCache<Witness>& dominated_cache() {
  static SharedCache<Witness> cache;
  return cache;
}

SharedCache<OracleVerdict>& oracle_cache() {
  static SharedCache<OracleVerdict> cache;
  return cache;
}

bool is_decide_uncached(std::vector<int64_t> v) {
  while (!v.empty()) {
    if (compare_reciprocal_sum_to_one(v) > 0) return false;
    if (sxy_search(v)) return true;
    const int64_t p = v.front();
    v.erase(v.begin());
    for (int64_t& x : v) {
      x -= (x + p - 1) / p;
      if (x < 1) return false;
    }
  }
  return true;
}

}  // namespace

Rational density(const KVector& k) {
  Rational sum;
  for (int64_t v : k.entries()) {
    if (v != kInfinity) sum += Rational(1, v);
  }
  return sum;
}

int compare_density_to_one(const KVector& k) {
  std::vector<int64_t> f = k.finite_values();
  return compare_reciprocal_sum_to_one(f);
}

std::optional<Violation> verify_schedule(const CyclicSchedule& pi, const KVector& k) {
  const size_t n = k.size();
  const int64_t period = static_cast<int64_t>(pi.period());
  std::vector<int64_t> first(n, -1), last(n, -1), worst(n, 0);
  for (int64_t t = 0; t < period; ++t) {
    int task = pi.slots[t];
    if (task < 0 || static_cast<size_t>(task) >= n) continue;
    if (last[task] >= 0) worst[task] = std::max(worst[task], t - last[task]);
    if (first[task] < 0) first[task] = t;
    last[task] = t;
  }
  for (size_t i = 0; i < n; ++i) {
    if (!k.finite(i)) continue;
    if (first[i] < 0) return Violation{static_cast<int>(i), kInfinity};
    int64_t wrap = first[i] + period - last[i];
    int64_t gap = std::max(worst[i], wrap);
    if (gap > k[i]) return Violation{static_cast<int>(i), gap};
  }
  return std::nullopt;
}

CyclicSchedule round_robin(std::span<const int> tasks) {
  return CyclicSchedule{std::vector<int>(tasks.begin(), tasks.end())};
}

Rational SxyWitness::load() const {
  std::vector<int> gx, gy;
  for (size_t i = 0; i < specialized.size(); ++i) {
    if (specialized[i] == kInfinity) continue;
    (in_x[i] ? gx : gy).push_back(exponent[i]);
  }
  Rational total;
  if (!gx.empty()) total += Rational(ceil_dyadic_sum(gx), x);
  if (!gy.empty()) total += Rational(ceil_dyadic_sum(gy), y);
  return total;
}

std::optional<SxyWitness> sxy_feasible(const KVector& k) {
  SortedView v = sorted_view(k);
  auto a = sxy_search(v.values);
  if (!a) return std::nullopt;
  return to_witness(k, v.ids, *a);
}

std::optional<CyclicSchedule> sxy_build(const KVector& k, const SxyWitness& w) {
  std::vector<std::pair<int, int>> gx, gy;
  std::vector<int> ex, ey;
  for (size_t i = 0; i < k.size(); ++i) {
    if (!k.finite(i)) continue;
    if (w.in_x[i]) {
      gx.emplace_back(static_cast<int>(i), w.exponent[i]);
      ex.push_back(w.exponent[i]);
    } else {
      gy.emplace_back(static_cast<int>(i), w.exponent[i]);
      ey.push_back(w.exponent[i]);
    }
  }
  if (gx.empty() && gy.empty()) return CyclicSchedule{};

  // P is the group placed on the balanced ("mechanical") slots of each
  // window of its base; Q takes the remaining slots round-robin.
  int64_t px = w.x, qy = w.y;
  int64_t p = ceil_dyadic_sum(ex), q = ceil_dyadic_sum(ey);
  if (p == 0) {
    std::swap(gx, gy);
    std::swap(px, qy);
    std::swap(p, q);
  }
  if (!fits(px, qy, p, q)) return std::nullopt;

  std::vector<Bin> bins_p, bins_q;
  int amax_p = 0, amax_q = 0;
  if (!pack_group(gx, p, bins_p, amax_p) || !pack_group(gy, q, bins_q, amax_q)) return std::nullopt;

  const int64_t X = px;
  const int64_t free_per_window = X - p;
  int64_t base_period = X;
  if (q > 0) {
    if (free_per_window == 0) return std::nullopt;
    base_period = X * (q / std::gcd(free_per_window, q));
  }
  // Bin occurrences per base period; every bin of a group gets the same count.
  const int64_t occ_p = base_period / X;
  const int64_t occ_q = q > 0 ? base_period / X * free_per_window / q : 0;
  auto pow2_factor = [](int64_t occ, int amax) -> int64_t {
    if (occ == 0) return 1;
    int have = std::countr_zero(static_cast<uint64_t>(occ));
    return amax > have ? int64_t{1} << (amax - have) : 1;
  };
  const int64_t reps = std::max(pow2_factor(occ_p, amax_p), q > 0 ? pow2_factor(occ_q, amax_q) : 1);
  const __int128 period = static_cast<__int128>(base_period) * reps;
  if (period > static_cast<__int128>(kMaxSchedulePeriod)) return std::nullopt;

  CyclicSchedule pi;
  pi.slots.resize(static_cast<size_t>(period));
  uint64_t pc = 0, qc = 0;
  for (int64_t t = 0; t < static_cast<int64_t>(period); ++t) {
    const int64_t r = t % X;
    const bool busy = ((r + 1) * p) / X - (r * p) / X == 1;
    if (busy) {
      const Bin& b = bins_p[pc % p];
      pi.slots[t] = b.owner(pc / p);
      ++pc;
    } else if (q > 0) {
      const Bin& b = bins_q[qc % q];
      pi.slots[t] = b.owner(qc / q);
      ++qc;
    } else {
      pi.slots[t] = CyclicSchedule::kIdle;
    }
  }
  if (verify_schedule(pi, k)) return std::nullopt;
  return pi;
}

std::optional<CyclicSchedule> sxy_schedule(const KVector& k) {
  auto w = sxy_feasible(k);
  if (!w) return std::nullopt;
  return sxy_build(k, *w);
}

KVector is_regularize(const KVector& k, size_t j) {
  if (j >= k.size() || !k.finite(j)) throw std::invalid_argument("is_regularize: pivot must be finite");
  std::vector<int64_t> out(k.entries().begin(), k.entries().end());
  const int64_t p = k[j];
  for (size_t i = 0; i < out.size(); ++i) {
    if (i == j || out[i] == kInfinity) continue;
    if (i < j) throw std::invalid_argument("is_regularize: entries before the pivot must be removed");
    out[i] -= (out[i] + p - 1) / p;
    if (out[i] < 1) throw EvolutionInfeasible("is_regularize: entry dropped below 1");
  }
  out[j] = kInfinity;
  return KVector(std::move(out));
}

CyclicSchedule is_reinsert(const CyclicSchedule& pi, int m, int64_t k_m) {
  if (k_m < 1) throw std::invalid_argument("is_reinsert: k_m must be positive");
  if (pi.empty()) return CyclicSchedule{{m}};
  if (k_m == 1) throw EvolutionInfeasible("is_reinsert: k_m = 1 leaves no room for other tasks");
  const int64_t gap = k_m - 1;
  const int64_t len = lcm_checked(static_cast<int64_t>(pi.period()), gap);
  const __int128 out_len = static_cast<__int128>(len) / gap * k_m;
  if (out_len > static_cast<__int128>(kMaxSchedulePeriod)) throw std::length_error("schedule period exceeds cap");
  CyclicSchedule out;
  out.slots.reserve(static_cast<size_t>(out_len));
  for (int64_t b = 0; b < len; ++b) {
    if (b % gap == 0) out.slots.push_back(m);
    out.slots.push_back(pi.at(static_cast<uint64_t>(b)));
  }
  return out;
}

IsTrace is_trace(const KVector& k) {
  IsTrace trace;
  SortedView view = sorted_view(k);
  trace.order = view.ids;
  std::vector<int64_t> cur(k.entries().begin(), k.entries().end());
  for (size_t j = 0; j <= view.ids.size(); ++j) {
    IsIteration it;
    it.j = static_cast<int>(j);
    it.k = KVector(cur);
    if (compare_density_to_one(it.k) > 0) {
      trace.iterations.push_back(std::move(it));
      break;
    }
    if (auto w = sxy_feasible(it.k)) {
      it.schedulable_here = true;
      trace.witness = std::move(w);
      trace.iterations.push_back(std::move(it));
      break;
    }
    if (j == view.ids.size()) {
      trace.iterations.push_back(std::move(it));
      break;
    }
    const int pivot = view.ids[j];
    it.removed = pivot;
    trace.iterations.push_back(std::move(it));
    const int64_t p = cur[pivot];
    bool dead = false;
    for (size_t i = j + 1; i < view.ids.size(); ++i) {
      int64_t& x = cur[view.ids[i]];
      x -= (x + p - 1) / p;
      if (x < 1) dead = true;
    }
    cur[pivot] = kInfinity;
    if (dead) break;
  }
  return trace;
}

bool is_schedulable_sorted(std::span<const int64_t> sorted) {
  std::vector<int64_t> key(sorted.begin(), sorted.end());
  if (auto hit = is_cache().get(key)) return *hit;
  bool ok = is_decide_uncached(key);
  is_cache().put(std::move(key), ok);
  return ok;
}

std::optional<std::vector<int64_t>> is_dominated_witness(std::span<const int64_t> sorted, size_t visit_limit) {
  std::vector<int64_t> key(sorted.begin(), sorted.end());
  key.push_back(static_cast<int64_t>(visit_limit));
  if (auto hit = dominated_cache().get(key)) return *hit;
  key.pop_back();

  // Depth-first over decrements, largest entries first; each visited vector is
  // sorted, and decrementing the first copy of a value keeps it sorted.
  std::unordered_set<std::vector<int64_t>, VecHash> seen;
  Witness found;
  std::vector<std::vector<int64_t>> stack{key};
  while (!stack.empty() && !found) {
    std::vector<int64_t> v = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(v).second) continue;
    if (seen.size() > visit_limit) break;
    if (compare_reciprocal_sum_to_one(v) > 0) continue;
    if (is_schedulable_sorted(v)) {
      found = std::move(v);
      break;
    }
    // Pushed smallest value first so the largest is explored first.
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] <= 1 || (i > 0 && v[i - 1] == v[i])) continue;
      std::vector<int64_t> w = v;
      --w[i];
      if (!seen.contains(w)) stack.push_back(std::move(w));
    }
  }
  key.push_back(static_cast<int64_t>(visit_limit));
  dominated_cache().put(std::move(key), found);
  return found;
}

bool is_schedulable(const KVector& k) {
  std::vector<int64_t> v = k.finite_values();
  std::sort(v.begin(), v.end());
  return is_schedulable_sorted(v);
}

std::optional<std::pair<CyclicSchedule, IsTrace>> is_schedule(const KVector& k) {
  IsTrace trace = is_trace(k);
  if (!trace.succeeded()) return std::nullopt;
  const IsIteration& last = trace.iterations.back();
  try {
    auto pi = sxy_build(last.k, *trace.witness);
    if (!pi) return std::nullopt;
    CyclicSchedule cur = std::move(*pi);
    for (int j = last.j - 1; j >= 0; --j) {
      const IsIteration& step = trace.iterations[j];
      cur = is_reinsert(cur, step.removed, step.k[step.removed]);
    }
    if (verify_schedule(cur, k)) return std::nullopt;
    return std::make_pair(std::move(cur), std::move(trace));
  } catch (const std::length_error&) {
    return std::nullopt;
  }
}

OracleResult brute_force_schedulable(const KVector& k, size_t state_cap) {
  OracleResult res;
  std::vector<int> ids;
  std::vector<int64_t> lim;
  for (size_t i = 0; i < k.size(); ++i) {
    if (k.finite(i)) {
      ids.push_back(static_cast<int>(i));
      lim.push_back(k[i]);
    }
  }
  const size_t n = ids.size();
  if (n == 0) {
    res.verdict = OracleVerdict::kSchedulable;
    res.schedule = CyclicSchedule{};
    return res;
  }
  // Mixed-radix encoding of counters c_i in [0, k_i - 1].
  std::vector<uint64_t> radix(n);
  __int128 space = 1;
  for (size_t i = 0; i < n; ++i) {
    radix[i] = static_cast<uint64_t>(space);
    space *= lim[i];
    if (space > (__int128{1} << 62)) return res;  // Unencodable; resource limit.
  }
  auto decode = [&](uint64_t code, std::vector<int64_t>& c) {
    for (size_t i = n; i-- > 0;) {
      c[i] = static_cast<int64_t>(code / radix[i]);
      code %= radix[i];
    }
  };
  auto encode = [&](const std::vector<int64_t>& c) {
    uint64_t code = 0;
    for (size_t i = 0; i < n; ++i) code += static_cast<uint64_t>(c[i]) * radix[i];
    return code;
  };

  // Successors of a state: serve task s, everyone else ages by one slot.
  auto successors = [&](uint64_t code, std::vector<std::pair<uint64_t, int>>& out) {
    std::vector<int64_t> c(n);
    decode(code, c);
    out.clear();
    for (size_t s = 0; s < n; ++s) {
      bool ok = true;
      for (size_t i = 0; i < n && ok; ++i) {
        if (i != s && c[i] + 1 > lim[i] - 1) ok = false;
      }
      if (!ok) continue;
      std::vector<int64_t> d(c);
      for (size_t i = 0; i < n; ++i) d[i] = i == s ? 0 : c[i] + 1;
      out.emplace_back(encode(d), static_cast<int>(s));
    }
    // Most urgent first: least remaining slack.
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
      return lim[a.second] - c[a.second] < lim[b.second] - c[b.second];
    });
  };

  enum : uint8_t { kGray = 1, kBlack = 2 };
  std::unordered_map<uint64_t, uint8_t> color;
  struct Frame {
    uint64_t code;
    std::vector<std::pair<uint64_t, int>> succ;
    size_t next = 0;
    int served = -1;  // Task served on the edge into this state.
  };
  std::vector<Frame> stack;
  stack.push_back({0, {}, 0, -1});
  successors(0, stack.back().succ);
  color[0] = kGray;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == f.succ.size()) {
      color[f.code] = kBlack;
      stack.pop_back();
      continue;
    }
    auto [code, s] = f.succ[f.next++];
    auto it = color.find(code);
    if (it != color.end()) {
      if (it->second == kGray) {
        // Back edge: the stack from `code` to the top plus this edge is a cycle.
        size_t start = 0;
        while (stack[start].code != code) ++start;
        CyclicSchedule pi;
        for (size_t i = start + 1; i < stack.size(); ++i) pi.slots.push_back(ids[stack[i].served]);
        pi.slots.push_back(ids[s]);
        res.states_explored = color.size();
        if (verify_schedule(pi, k)) throw std::logic_error("brute_force_schedulable: cycle failed verification");
        res.verdict = OracleVerdict::kSchedulable;
        res.schedule = std::move(pi);
        return res;
      }
      continue;
    }
    if (color.size() >= state_cap) {
      res.states_explored = color.size();
      res.verdict = OracleVerdict::kResourceLimit;
      return res;
    }
    color[code] = kGray;
    Frame nf{code, {}, 0, s};
    successors(code, nf.succ);
    stack.push_back(std::move(nf));
  }
  res.states_explored = color.size();
  res.verdict = OracleVerdict::kUnschedulable;
  return res;
}

OracleVerdict oracle_verdict_cached(const KVector& k, size_t state_cap) {
  std::vector<int64_t> key = k.finite_values();
  std::sort(key.begin(), key.end());
  if (auto hit = oracle_cache().get(key)) return *hit;
  OracleVerdict v = brute_force_schedulable(KVector(key), state_cap).verdict;
  if (v != OracleVerdict::kResourceLimit) oracle_cache().put(std::move(key), v);
  return v;
}

void clear_caches() {
  is_cache().clear();
  dominated_cache().clear();
  oracle_cache().clear();
}

}  // namespace backhaul::pinwheel
