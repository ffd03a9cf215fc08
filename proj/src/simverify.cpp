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

#include "backhaul/simverify.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "backhaul/splitmix.hpp"

namespace backhaul::sim {
namespace {

// A run of consecutive generations: the first carries `head` units, the
// other count - 1 carry `vol` each. Volumes are integers in units of
// 1/den(lambda). Saturating and burst traffic collapse into a few runs, so
// service and delivery cost O(1) per run rather than per generation.
struct Run {
  int64_t gen = 0;
  int64_t count = 1;
  int64_t head = 0;
  int64_t vol = 0;

  int64_t total() const { return head + (count - 1) * vol; }
};

Run single(int64_t gen, int64_t v) { return Run{gen, 1, v, v}; }

// FIFO of runs on a power-of-two ring. push_back merges a run into the back
// one when the result is still a run.
class RunQueue {
 public:
  bool empty() const { return head_ == tail_; }
  size_t size() const { return tail_ - head_; }
  Run& front() { return buf_[head_ & mask_]; }
  void pop_front() { ++head_; }
  void push_back(const Run& b) {
    if (!empty()) {
      Run& a = buf_[(tail_ - 1) & mask_];
      if (a.count == 1 && a.gen == b.gen) {
        a.head += b.head;
        a.count = b.count;
        a.vol = b.vol;
        return;
      }
      if (a.gen + a.count == b.gen && b.head == b.vol && (a.count == 1 || a.vol == b.vol)) {
        a.vol = b.vol;
        a.count += b.count;
        return;
      }
    }
    if (size() == buf_.size()) grow();
    buf_[tail_++ & mask_] = b;
  }
  template <typename F>
  void for_each(F&& f) const {
    for (size_t i = head_; i != tail_; ++i) f(buf_[i & mask_]);
  }

 private:
  void grow() {
    std::vector<Run> next(std::max<size_t>(8, buf_.size() * 2));
    for (size_t i = 0; i < size(); ++i) next[i] = buf_[(head_ + i) & mask_];
    tail_ = size();
    head_ = 0;
    buf_.swap(next);
    mask_ = buf_.size() - 1;
  }

  std::vector<Run> buf_;
  size_t mask_ = 0;
  size_t head_ = 0;
  size_t tail_ = 0;
};

// Removes up to `budget` units from the front of q in FIFO order, passing
// each removed piece to emit. Returns the amount removed.
template <typename Emit>
int64_t take(RunQueue& q, int64_t budget, Emit&& emit) {
  const int64_t start = budget;
  while (budget > 0 && !q.empty()) {
    Run& f = q.front();
    const int64_t total = f.total();
    if (budget >= total) {
      emit(f);
      budget -= total;
      q.pop_front();
      continue;
    }
    if (budget < f.head) {
      emit(single(f.gen, budget));
      f.head -= budget;
      return start;
    }
    emit(single(f.gen, f.head));
    budget -= f.head;
    // budget < total, so at least one generation of `vol` stays behind.
    const int64_t m = budget / f.vol;
    const int64_t r = budget % f.vol;
    if (m > 0) emit(Run{f.gen + 1, m, f.vol, f.vol});
    f.gen += 1 + m;
    f.count -= 1 + m;
    f.head = f.vol - r;
    if (r > 0) emit(single(f.gen, r));
    return start;
  }
  return start - budget;
}

struct Slice {
  int flow = 0;
  int hop = 0;
  int64_t width = 0;
  RunQueue queue;
  int64_t size = 0;
  int64_t max_queue = 0;
  int64_t steady_max = 0;
  int64_t changed_at = -1;  // Last slot whose end state differs from the one before.
};

struct Flow {
  int ap = 0;
  int64_t customer = 0;
  int64_t route_k = 0;
  std::vector<int> slices;  // Per hop.
  RunQueue pending;         // Generated, not yet fully delivered.
  int64_t generated = 0;
  int64_t delivered = 0;
  int64_t max_delay = 0;
  int64_t violations = 0;
};

}  // namespace

Pattern parse_pattern(const std::string& name) {
  if (name == "saturating") return Pattern::kSaturating;
  if (name == "random") return Pattern::kRandom;
  if (name == "burst") return Pattern::kBurst;
  throw std::invalid_argument("unknown arrival pattern: " + name);
}

std::string pattern_name(Pattern p) {
  switch (p) {
    case Pattern::kSaturating:
      return "saturating";
    case Pattern::kRandom:
      return "random";
    case Pattern::kBurst:
      return "burst";
  }
  return "";
}

int64_t global_period(const dsum::SolutionBundle& bundle) {
  int64_t g = 1;
  for (const dsum::NodeSolution& n : bundle.nodes) {
    if (n.schedule.empty()) continue;
    const int64_t p = static_cast<int64_t>(n.schedule.period());
    const __int128 l = static_cast<__int128>(g / std::gcd(g, p)) * p;
    if (l > (static_cast<__int128>(1) << 62)) throw std::overflow_error("global period exceeds 2^62");
    g = static_cast<int64_t>(l);
  }
  return g;
}

std::vector<ScheduledLink> scheduled_links(const dsum::SolutionBundle& bundle, int64_t t) {
  std::vector<ScheduledLink> out;
  for (size_t v = 0; v < bundle.nodes.size(); ++v) {
    const CyclicSchedule& s = bundle.nodes[v].schedule;
    if (s.empty()) continue;
    const int task = s.at(static_cast<uint64_t>(t));
    if (task != CyclicSchedule::kIdle) out.push_back({static_cast<int>(v), task});
  }
  return out;
}

nlohmann::json SimReport::to_json() const {
  nlohmann::json fl = nlohmann::json::array();
  for (const FlowReport& f : flows) {
    fl.push_back({{"ap", f.ap},
                  {"customer", f.customer},
                  {"route_k", f.route_k},
                  {"max_delay", f.max_delay},
                  {"violations", f.violations},
                  {"generated", f.generated.to_string()},
                  {"delivered", f.delivered.to_string()},
                  {"queued", f.queued.to_string()}});
  }
  nlohmann::json sl = nlohmann::json::array();
  for (const SliceReport& s : slices) {
    sl.push_back({{"flow", s.flow},
                  {"hop", s.hop},
                  {"width", s.width.to_string()},
                  {"max_queue", s.max_queue.to_string()},
                  {"steady_max_queue", s.steady_max_queue.to_string()}});
  }
  return {{"horizon", horizon},
          {"global_period", global_period},
          {"measured_until", measured_until},
          {"violations", violations},
          {"max_delay", max_delay},
          {"generated", generated.to_string()},
          {"delivered", delivered.to_string()},
          {"conservation_ok", conservation_ok},
          {"flows", fl},
          {"slices", sl}};
}

SimReport simulate(const TreeTopology& tree, const dsum::SolutionBundle& bundle, int64_t tau,
                   const SimConfig& config) {
  if (bundle.nodes.size() != tree.size()) throw std::invalid_argument("simulate: bundle does not match the tree");
  const Rational& lambda = bundle.lambda;
  const int64_t unit = lambda.den();
  const int64_t rate = lambda.num();
  const int64_t gp = global_period(bundle);
  const int64_t horizon = config.horizon.value_or(gp * config.periods);
  if (horizon < gp) throw std::invalid_argument("simulate: horizon shorter than one global period");

  // Slices indexed by link: link_slices[node][task].
  std::vector<std::vector<std::vector<int>>> link_slices(tree.size());
  for (size_t v = 0; v < tree.size(); ++v) {
    const TreeNode& n = tree.node(static_cast<int>(v));
    link_slices[v].resize(n.is_ap() ? static_cast<size_t>(std::max<int64_t>(bundle.nodes[v].sigma, 0))
                                    : n.children.size());
  }
  std::vector<Slice> slices;
  std::vector<Flow> flows;
  auto add_slice = [&](int flow, int hop, int64_t k, int node, int task) {
    Slice s;
    s.flow = flow;
    s.hop = hop;
    s.width = rate * k;
    link_slices[node][task].push_back(static_cast<int>(slices.size()));
    flows[flow].slices.push_back(static_cast<int>(slices.size()));
    flows[flow].route_k += k;
    slices.push_back(std::move(s));
  };
  for (int a : tree.aps()) {
    const dsum::NodeSolution& ap = bundle.nodes[a];
    for (int64_t j = 0; j < ap.sigma; ++j) {
      const int f = static_cast<int>(flows.size());
      Flow fl;
      fl.ap = a;
      fl.customer = j;
      flows.push_back(std::move(fl));
      if (static_cast<size_t>(j) >= ap.child_k.size() || !ap.child_k.finite(j)) {
        throw std::invalid_argument("simulate: admitted customer without a finite k");
      }
      add_slice(f, 0, ap.child_k[j], a, static_cast<int>(j));
      int hop = 1;
      for (int v = a; v != TreeTopology::root(); v = tree.node(v).parent) {
        const int p = tree.node(v).parent;
        const auto& ch = tree.node(p).children;
        const int pos = static_cast<int>(std::find(ch.begin(), ch.end(), v) - ch.begin());
        if (bundle.nodes[v].k == kInfinity) throw std::invalid_argument("simulate: admitted flow on an unscheduled link");
        add_slice(f, hop++, bundle.nodes[v].k, p, pos);
      }
    }
  }

  std::vector<int> schedulers;
  for (size_t v = 0; v < tree.size(); ++v) {
    if (!bundle.nodes[v].schedule.empty()) schedulers.push_back(static_cast<int>(v));
  }
  const int64_t measured_until = std::max<int64_t>(horizon - tau, 0);
  // Generations [g, g + n) complete at slot t.
  auto complete = [&](Flow& f, int64_t g, int64_t n, int64_t t) {
    const int64_t hi = std::min(g + n, measured_until);
    if (hi <= g) return;
    f.max_delay = std::max(f.max_delay, t + 1 - g);
    f.violations += std::max<int64_t>(0, std::min(hi, t + 1 - tau) - g);
  };
  auto deliver = [&](Flow& f, const Run& piece, int64_t t) {
    if (f.pending.empty() || f.pending.front().gen != piece.gen) {
      throw std::logic_error("simulate: FIFO order broken");
    }
    int64_t v = piece.total();
    f.delivered += v;
    while (v > 0) {
      Run& p = f.pending.front();
      if (v < p.head) {
        p.head -= v;
        break;
      }
      v -= p.head;
      complete(f, p.gen, 1, t);
      if (p.count == 1) {
        f.pending.pop_front();
        continue;
      }
      ++p.gen;
      --p.count;
      p.head = p.vol;
      const int64_t q = std::min(v / p.vol, p.count);
      if (q == 0) continue;
      complete(f, p.gen, q, t);
      v -= q * p.vol;
      p.gen += q;
      p.count -= q;
      if (p.count == 0) f.pending.pop_front();
    }
  };

  // Queues are sampled once per slot, after arrivals and before service. A
  // slice holds `size` for the samples in [changed_at + 1, t]; record them
  // before each change instead of scanning every slice every slot.
  auto record = [&](Slice& s, int64_t t) {
    if (t <= s.changed_at) return;
    s.max_queue = std::max(s.max_queue, s.size);
    if (t >= gp) s.steady_max = std::max(s.steady_max, s.size);
  };
  auto change = [&](Slice& s, int64_t t) {
    record(s, t);
    s.changed_at = std::max(s.changed_at, t);
  };

  // Saturating and burst arrivals are deterministic, so they are added lazily,
  // as one run, whenever the first slice of a flow is served. Sizes only grow
  // between services, so the sample at the service slot is the largest.
  const bool lazy = config.pattern != Pattern::kRandom;
  const int64_t arrival_end = config.pattern == Pattern::kBurst ? std::min(tau, horizon) : horizon;
  std::vector<int64_t> arrived(flows.size(), 0);
  auto materialize = [&](int fi, int64_t t) {
    Flow& f = flows[fi];
    Slice& s = slices[f.slices[0]];
    const int64_t end = std::min(t + 1, arrival_end);
    if (end > arrived[fi]) {
      const Run r{arrived[fi], end - arrived[fi], rate, rate};
      f.generated += r.total();
      f.pending.push_back(r);
      s.queue.push_back(r);
      s.size += r.total();
      arrived[fi] = end;
    }
    record(s, t);
    s.changed_at = std::max(s.changed_at, t);
  };

  std::vector<size_t> cursor(schedulers.size(), 0);  // t mod period, per scheduler.
  SplitMix64 rng(config.seed);
  for (int64_t t = 0; t < horizon; ++t) {
    if (!lazy) {
      for (size_t fi = 0; fi < flows.size(); ++fi) {
        Flow& f = flows[fi];
        const int64_t amount = rng.uniform(0, rate);
        if (amount == 0) continue;
        Slice& s = slices[f.slices[0]];
        change(s, t - 1);
        f.generated += amount;
        f.pending.push_back(single(t, amount));
        s.queue.push_back(single(t, amount));
        s.size += amount;
      }
    }
    // Nodes are stored level by level, so visiting scheduling nodes in index
    // order serves the hops nearest the root first. Volume forwarded in a slot
    // lands behind a slice already served and moves one hop per slot.
    for (size_t i = 0; i < schedulers.size(); ++i) {
      const int v = schedulers[i];
      const std::vector<int>& slots = bundle.nodes[v].schedule.slots;
      const int task = slots[cursor[i]];
      if (++cursor[i] == slots.size()) cursor[i] = 0;
      if (task == CyclicSchedule::kIdle || static_cast<size_t>(task) >= link_slices[v].size()) continue;
      for (int si : link_slices[v][task]) {
        Slice& s = slices[si];
        Flow& f = flows[s.flow];
        if (lazy && s.hop == 0) materialize(s.flow, t);
        if (s.queue.empty()) continue;
        change(s, t);
        if (static_cast<size_t>(s.hop) + 1 < f.slices.size()) {
          Slice& next = slices[f.slices[s.hop + 1]];
          change(next, t);
          const int64_t moved = take(s.queue, s.width, [&](const Run& r) { next.queue.push_back(r); });
          s.size -= moved;
          next.size += moved;
        } else {
          s.size -= take(s.queue, s.width, [&](const Run& r) { deliver(f, r, t); });
        }
      }
    }
  }
  if (lazy) {
    for (size_t fi = 0; fi < flows.size(); ++fi) materialize(static_cast<int>(fi), horizon - 1);
  }
  for (Slice& s : slices) record(s, horizon - 1);

  SimReport rep;
  rep.horizon = horizon;
  rep.global_period = gp;
  rep.measured_until = std::max<int64_t>(horizon - tau, 0);
  for (size_t fi = 0; fi < flows.size(); ++fi) {
    Flow& f = flows[fi];
    // Measured generations still pending at the horizon missed their deadline.
    f.pending.for_each([&](const Run& p) {
      f.violations += std::max<int64_t>(0, std::min(p.gen + p.count, rep.measured_until) - p.gen);
    });
    int64_t queued = 0;
    for (int si : f.slices) queued += slices[si].size;
    FlowReport fr;
    fr.ap = f.ap;
    fr.customer = f.customer;
    fr.route_k = f.route_k;
    fr.max_delay = f.max_delay;
    fr.violations = f.violations;
    fr.generated = Rational(f.generated, unit);
    fr.delivered = Rational(f.delivered, unit);
    fr.queued = Rational(queued, unit);
    rep.conservation_ok = rep.conservation_ok && f.generated == f.delivered + queued;
    rep.violations += f.violations;
    rep.max_delay = std::max(rep.max_delay, f.max_delay);
    rep.generated += fr.generated;
    rep.delivered += fr.delivered;
    rep.flows.push_back(std::move(fr));
  }
  for (const Slice& s : slices) {
    rep.slices.push_back({s.flow, s.hop, Rational(s.width, unit), Rational(s.max_queue, unit),
                          Rational(s.steady_max, unit)});
  }
  return rep;
}

}  // namespace backhaul::sim
