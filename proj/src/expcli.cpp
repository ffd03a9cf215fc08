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

#include "backhaul/expcli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "backhaul/pinwheel.hpp"
#include "backhaul/simverify.hpp"
#include "backhaul/splitmix.hpp"

namespace backhaul::exp {
namespace {

using BigQ = boost::multiprecision::cpp_rational;

BigQ big_density(std::span<const int64_t> k) {
  BigQ s = 0;
  for (int64_t x : k) s += BigQ(1, x);
  return s;
}

BigQ big_of(const Rational& r) { return BigQ(r.num(), r.den()); }

Density to_density(const BigQ& q) {
  return Density{boost::multiprecision::numerator(q).str(), boost::multiprecision::denominator(q).str(),
                 static_cast<double>(q)};
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join_k(const std::vector<int64_t>& k) {
  std::string s;
  for (size_t i = 0; i < k.size(); ++i) s += (i ? " " : "") + std::to_string(k[i]);
  return s;
}

Rational parse_rational_field(const nlohmann::json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<int64_t>());
  return Rational::from_double(v.get<double>());
}

}  // namespace

uint64_t stream_seed(uint64_t seed, uint64_t index) { return seed + index * kGoldenGamma; }

void parallel_for(size_t n, int threads, const std::function<void(size_t)>& body) {
  const size_t workers = std::min<size_t>(std::max(threads, 1), std::max<size_t>(n, 1));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::jthread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  }
  pool.clear();
  if (err) std::rethrow_exception(err);
}

Density density_of(std::span<const int64_t> k) { return to_density(big_density(k)); }

VectorCorpus gen_random_vectors(int M, size_t count, const Rational& lo, const Rational& hi, uint64_t seed) {
  if (M < 1) throw std::invalid_argument("gen_random_vectors: M must be positive");
  VectorCorpus out;
  out.M = M;
  SplitMix64 rng(stream_seed(seed, static_cast<uint64_t>(M)));
  const BigQ blo = big_of(lo), bhi = big_of(hi);
  std::set<std::vector<int64_t>> seen;
  size_t failures = 0;
  std::vector<int64_t> k(M);
  while (out.vectors.size() < count) {
    if (failures >= kMaxConsecutiveFailures) {
      out.truncated = true;
      break;
    }
    ++out.attempts;
    for (int64_t& x : k) x = rng.uniform(2, 3 * static_cast<int64_t>(M) - 1);
    std::vector<int64_t> sorted = k;
    std::sort(sorted.begin(), sorted.end());
    const BigQ d = big_density(sorted);
    if (d <= blo || d > bhi || !seen.insert(sorted).second) {
      ++failures;
      continue;
    }
    failures = 0;
    out.vectors.emplace_back(std::move(sorted));
  }
  return out;
}

std::vector<int> IsSxyConfig::lengths() const {
  if (!ms.empty()) return ms;
  std::vector<int> out;
  for (int m = m_min; m <= m_max; ++m) out.push_back(m);
  return out;
}

IsSxyConfig IsSxyConfig::from_json(const nlohmann::json& j) {
  IsSxyConfig c;
  c.seed = j.value("seed", c.seed);
  c.m_min = j.value("m_min", c.m_min);
  c.m_max = j.value("m_max", c.m_max);
  if (j.contains("ms")) c.ms = j.at("ms").get<std::vector<int>>();
  if (j.contains("density_lo")) c.lo = parse_rational_field(j.at("density_lo"));
  if (j.contains("density_hi")) c.hi = parse_rational_field(j.at("density_hi"));
  c.count = j.value("count", c.count);
  c.threads = j.value("threads", c.threads);
  return c;
}

nlohmann::json IsSxyConfig::to_json() const {
  return {{"seed", seed},
          {"m_min", m_min},
          {"m_max", m_max},
          {"ms", ms},
          {"density_lo", lo.to_string()},
          {"density_hi", hi.to_string()},
          {"count", count}};
}

double IsSxyRow::gap_pp() const {
  return n == 0 ? 0.0 : 100.0 * (static_cast<double>(is_success) - static_cast<double>(sxy_success)) / n;
}

IsSxyResult run_is_vs_sxy(const IsSxyConfig& config) {
  IsSxyResult res;
  for (int M : config.lengths()) {
    const VectorCorpus corpus = gen_random_vectors(M, config.count, config.lo, config.hi, config.seed);
    std::vector<IsSxyRecord> recs(corpus.vectors.size());
    parallel_for(recs.size(), config.threads, [&](size_t i) {
      const KVector& k = corpus.vectors[i];
      IsSxyRecord& r = recs[i];
      r.M = M;
      r.k.assign(k.entries().begin(), k.entries().end());
      r.density = density_of(r.k);
      r.sxy = pinwheel::sxy_feasible(k).has_value();
      if (r.sxy) {
        auto s = pinwheel::sxy_schedule(k);
        r.sxy_verified = s && !pinwheel::verify_schedule(*s, k);
      }
      if (auto s = pinwheel::is_schedule(k)) {
        r.is = true;
        r.is_verified = !pinwheel::verify_schedule(s->first, k);
        r.is_period = s->first.period();
        if (r.is_verified) r.is_schedule = std::move(s->first);
      } else {
        r.is = pinwheel::is_schedulable(k);
      }
    });
    IsSxyRow row;
    row.M = M;
    row.n = recs.size();
    row.truncated = corpus.truncated;
    row.attempts = corpus.attempts;
    std::optional<BigQ> smin, imin;
    for (const IsSxyRecord& r : recs) {
      row.sxy_success += r.sxy;
      row.is_success += r.is;
      const BigQ d = big_density(r.k);
      if (!r.sxy && (!smin || d < *smin)) smin = d;
      if (!r.is && (!imin || d < *imin)) imin = d;
    }
    if (smin) row.sxy_min_unsched = to_density(*smin);
    if (imin) row.is_min_unsched = to_density(*imin);
    res.rows.push_back(row);
    for (IsSxyRecord& r : recs) res.records.push_back(std::move(r));
  }
  return res;
}

std::string is_sxy_csv(const std::vector<IsSxyRow>& rows) {
  std::ostringstream os;
  os << "M,n,sxy_success,is_success,sxy_rate,is_rate,gap_pp,sxy_min_unsched_density,sxy_min_unsched_num,"
        "sxy_min_unsched_den,is_min_unsched_density,is_min_unsched_num,is_min_unsched_den,truncated,attempts\r\n";
  for (const IsSxyRow& r : rows) {
    const double n = std::max<double>(static_cast<double>(r.n), 1);
    os << r.M << "," << r.n << "," << r.sxy_success << "," << r.is_success << "," << fmt6(r.sxy_success / n) << ","
       << fmt6(r.is_success / n) << "," << fmt6(r.gap_pp()) << ",";
    for (const auto* d : {&r.sxy_min_unsched, &r.is_min_unsched}) {
      if (*d) {
        os << fmt6((*d)->value) << "," << (*d)->num << "," << (*d)->den << ",";
      } else {
        os << ",,,";
      }
    }
    os << (r.truncated ? 1 : 0) << "," << r.attempts << "\r\n";
  }
  return os.str();
}

std::string is_sxy_records_csv(const std::vector<IsSxyRecord>& records) {
  std::ostringstream os;
  os << "M,k,density,density_num,density_den,sxy,is,sxy_verified,is_verified,is_period\r\n";
  for (const IsSxyRecord& r : records) {
    os << r.M << "," << join_k(r.k) << "," << fmt6(r.density.value) << "," << r.density.num << "," << r.density.den
       << "," << r.sxy << "," << r.is << "," << r.sxy_verified << "," << r.is_verified << "," << r.is_period
       << "\r\n";
  }
  return os.str();
}

std::string is_schedules_jsonl(const std::vector<IsSxyRecord>& records) {
  std::string out;
  for (const IsSxyRecord& r : records) {
    if (!r.is_verified) continue;
    nlohmann::json j = {{"M", r.M}, {"k", r.k}, {"is_schedule", r.is_schedule.slots}};
    out += j.dump() + "\n";
  }
  return out;
}

TreeConfig TreeConfig::from_json(const nlohmann::json& j) {
  TreeConfig c;
  c.depth = j.value("depth", c.depth);
  c.deg_min = j.value("deg_min", c.deg_min);
  c.deg_max = j.value("deg_max", c.deg_max);
  c.flows = j.value("flows", c.flows);
  c.lambda_mbps = j.value("lambda_mbps", c.lambda_mbps);
  c.customer_mbps = j.value("customer_mbps", c.customer_mbps);
  if (j.contains("cmax_mbps")) c.cmax_mbps = j.at("cmax_mbps").get<std::vector<int64_t>>();
  return c;
}

nlohmann::json TreeConfig::to_json() const {
  return {{"depth", depth},         {"deg_min", deg_min},         {"deg_max", deg_max},
          {"flows", flows},         {"lambda_mbps", lambda_mbps}, {"customer_mbps", customer_mbps},
          {"cmax_mbps", cmax_mbps}};
}

TreeTopology gen_random_tree(const TreeConfig& config, uint64_t seed) {
  if (config.depth < 1) throw std::invalid_argument("gen_random_tree: depth must be >= 1");
  if (static_cast<int>(config.cmax_mbps.size()) != config.depth - 1) {
    throw std::invalid_argument("gen_random_tree: need one capacity per uplink level");
  }
  if (config.deg_min < 1 || config.deg_max < config.deg_min) throw std::invalid_argument("gen_random_tree: bad degrees");
  SplitMix64 rng(seed);
  std::vector<TreeNode> nodes(1);
  nodes[0].id = "r";
  std::vector<int> frontier{0};
  for (int d = 1; d < config.depth; ++d) {
    const int64_t cmax = config.cmax_mbps[d - 1];
    std::vector<int> next;
    for (int p : frontier) {
      const int64_t deg = rng.uniform(config.deg_min, config.deg_max);
      for (int64_t i = 0; i < deg; ++i) {
        TreeNode n;
        n.id = nodes[p].id + "." + std::to_string(i);
        n.parent = p;
        n.capacity = Rational(rng.uniform((cmax + 1) / 2, cmax), config.lambda_mbps);
        nodes[p].children.push_back(static_cast<int>(nodes.size()));
        next.push_back(static_cast<int>(nodes.size()));
        nodes.push_back(std::move(n));
      }
    }
    frontier = std::move(next);
  }
  for (int64_t f = 0; f < config.flows; ++f) {
    nodes[frontier[rng.uniform(0, static_cast<int64_t>(frontier.size()) - 1)]].flows += 1;
  }
  for (int a : frontier) nodes[a].flow_capacity = Rational(config.customer_mbps, config.lambda_mbps);
  return TreeTopology(std::move(nodes));
}

DsumExpConfig DsumExpConfig::from_json(const nlohmann::json& j) {
  DsumExpConfig c;
  c.seed = j.value("seed", c.seed);
  c.trees = j.value("trees", c.trees);
  if (j.contains("tree")) c.tree = TreeConfig::from_json(j.at("tree"));
  if (j.contains("taus")) c.taus = j.at("taus").get<std::vector<int64_t>>();
  c.threads = j.value("threads", c.threads);
  c.simulate = j.value("simulate", c.simulate);
  c.sim_periods = j.value("sim_periods", c.sim_periods);
  return c;
}

nlohmann::json DsumExpConfig::to_json() const {
  return {{"seed", seed},         {"trees", trees},       {"tree", tree.to_json()},
          {"taus", taus},         {"simulate", simulate}, {"sim_periods", sim_periods}};
}

Rational DsumRow::normalized_dsum() const {
  return capacity_bound == 0 ? Rational(0) : Rational(sigma_dsum, capacity_bound);
}

Rational DsumRow::normalized_urr() const {
  return capacity_bound == 0 ? Rational(0) : Rational(sigma_urr, capacity_bound);
}

std::vector<DsumRow> run_dsum_experiment(const DsumExpConfig& config) {
  const size_t per_tree = config.taus.size();
  std::vector<DsumRow> rows(static_cast<size_t>(config.trees) * per_tree);
  parallel_for(static_cast<size_t>(config.trees), config.threads, [&](size_t i) {
    const uint64_t ts = stream_seed(config.seed, i);
    const TreeTopology tree = gen_random_tree(config.tree, ts);
    const Rational lambda(1);
    const int64_t bound = capacity_bound(tree, lambda);
    for (size_t j = 0; j < per_tree; ++j) {
      DsumRow& r = rows[i * per_tree + j];
      r.tree = static_cast<int>(i);
      r.tree_seed = ts;
      r.tau = config.taus[j];
      r.flows = tree.total_flows();
      r.capacity_bound = bound;
      const dsum::DsumResult res = dsum::solve(tree, lambda, r.tau);
      r.sigma_dsum = res.bundle.sigma;
      r.bundle_valid = dsum::validate_bundle(tree, res.bundle).empty();
      r.parallel_ms = res.parallel_ms;
      r.wall_ms = res.wall_ms;
      r.is_checks = res.stats.is_checks;
      r.sigma_urr = dsum::urr_baseline(tree, lambda, r.tau).sigma;
      if (config.simulate) {
        sim::SimConfig sc;
        sc.periods = config.sim_periods;
        const sim::SimReport rep = sim::simulate(tree, res.bundle, r.tau, sc);
        r.simulated = true;
        r.global_period = rep.global_period;
        r.sim_violations = rep.violations;
        r.sim_max_delay = rep.max_delay;
        r.sim_conservation = rep.conservation_ok;
      }
    }
  });
  return rows;
}

std::string dsum_csv(const std::vector<DsumRow>& rows) {
  std::ostringstream os;
  os << "tree,seed,tau,flows,sigma_dsum,sigma_urr,capacity_bound,normalized_dsum,normalized_urr,bundle_valid,"
        "simulated,global_period,sim_violations,sim_max_delay,sim_conservation\r\n";
  for (const DsumRow& r : rows) {
    os << r.tree << "," << r.tree_seed << "," << r.tau << "," << r.flows << "," << r.sigma_dsum << "," << r.sigma_urr
       << "," << r.capacity_bound << "," << decimal6(r.normalized_dsum()) << "," << decimal6(r.normalized_urr())
       << "," << r.bundle_valid << "," << r.simulated << "," << r.global_period << "," << r.sim_violations << ","
       << r.sim_max_delay << "," << r.sim_conservation << "\r\n";
  }
  return os.str();
}

std::string dsum_timing_csv(const std::vector<DsumRow>& rows) {
  std::ostringstream os;
  os << "tree,tau,solve_ms,wall_ms,is_checks\r\n";
  for (const DsumRow& r : rows) {
    os << r.tree << "," << r.tau << "," << fmt6(r.parallel_ms) << "," << fmt6(r.wall_ms) << "," << r.is_checks
       << "\r\n";
  }
  return os.str();
}

namespace {

class BruteForce {
 public:
  BruteForce(const TreeTopology& t, Rational lambda, Decider d) : t_(t), lambda_(std::move(lambda)), d_(d) {}

  int64_t best(int v, int64_t budget) {
    if (budget < 1) return 0;
    auto key = std::make_pair(v, budget);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const TreeNode& n = t_.node(v);
    int64_t out = 0;
    if (n.is_ap()) {
      out = std::max<int64_t>(0, std::min({n.flows, budget, floor_div(n.flow_capacity, lambda_)}));
    } else {
      std::vector<int64_t> k(n.children.size(), kInfinity);
      enumerate(n, budget, 0, k, out);
    }
    memo_[key] = out;
    return out;
  }

  BruteForceResult result(int64_t tau) {
    BruteForceResult r;
    r.sigma = best(TreeTopology::root(), tau);
    r.vectors = vectors_;
    r.undecided = undecided_;
    return r;
  }

 private:
  bool schedulable(const std::vector<int64_t>& k) {
    std::vector<int64_t> fin;
    for (int64_t x : k) {
      if (x != kInfinity) fin.push_back(x);
    }
    if (fin.empty()) return true;
    ++vectors_;
    const KVector kv(std::move(fin));
    if (d_ == Decider::kIs) return pinwheel::is_schedulable(kv);
    const pinwheel::OracleVerdict v = pinwheel::oracle_verdict_cached(kv);
    if (v == pinwheel::OracleVerdict::kResourceLimit) ++undecided_;
    return v == pinwheel::OracleVerdict::kSchedulable;
  }

  void enumerate(const TreeNode& n, int64_t budget, size_t i, std::vector<int64_t>& k, int64_t& out) {
    if (i == k.size()) {
      int64_t sum = 0;
      for (size_t c = 0; c < k.size(); ++c) {
        if (k[c] == kInfinity) continue;
        const int child = n.children[c];
        sum += std::min(best(child, budget - k[c]), floor_div(t_.node(child).capacity, lambda_ * Rational(k[c])));
      }
      if (sum > out && schedulable(k)) out = sum;
      return;
    }
    k[i] = kInfinity;
    enumerate(n, budget, i + 1, k, out);
    for (int64_t x = 1; x < budget; ++x) {
      k[i] = x;
      enumerate(n, budget, i + 1, k, out);
    }
    k[i] = kInfinity;
  }

  const TreeTopology& t_;
  Rational lambda_;
  Decider d_;
  std::map<std::pair<int, int64_t>, int64_t> memo_;
  size_t vectors_ = 0;
  size_t undecided_ = 0;
};

}  // namespace

BruteForceResult brute_force_sigma(const TreeTopology& tree, const Rational& lambda, int64_t tau, Decider decider) {
  BruteForce bf(tree, lambda, decider);
  return bf.result(tau);
}

std::string decimal6(const Rational& r) { return fmt6(r.to_double()); }

std::string fnv1a_hex(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace backhaul::exp
