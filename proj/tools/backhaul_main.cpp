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

// Command-line front end: symmetric analysis, DSUM, MILP emission and
// checking, simulation and the experiment drivers.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "backhaul/dsum.hpp"
#include "backhaul/expcli.hpp"
#include "backhaul/milp.hpp"
#include "backhaul/pinwheel.hpp"
#include "backhaul/simverify.hpp"
#include "backhaul/symmetric.hpp"
#include "backhaul/tree.hpp"

namespace fs = std::filesystem;
using namespace backhaul;

namespace {

constexpr const char* kVersion = "0.1.0";

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct TreeArgs {
  std::string tree_path;
  std::string lambda;
};

LoadedTree load(const TreeArgs& a) {
  LoadedTree t = load_tree_file(a.tree_path);
  if (!a.lambda.empty()) t.lambda = Rational::parse(a.lambda);
  return t;
}

nlohmann::json summary_json(const TreeTopology& tree, const dsum::SolutionBundle& b) {
  nlohmann::json links = nlohmann::json::array(), schedules = nlohmann::json::array(),
                 admissions = nlohmann::json::array(), tau_v = nlohmann::json::array();
  for (size_t v = 0; v < tree.size(); ++v) {
    const TreeNode& n = tree.node(static_cast<int>(v));
    const dsum::NodeSolution& s = b.nodes[v];
    if (v != 0) {
      links.push_back({{"id", n.id}, {"k", s.k == kInfinity ? nlohmann::json(nullptr) : nlohmann::json(s.k)}});
    }
    if (!s.schedule.empty()) {
      schedules.push_back({{"node", n.id}, {"period", s.schedule.period()}, {"slots", s.schedule.slots}});
    }
    if (n.is_ap()) admissions.push_back({{"ap", n.id}, {"count", s.sigma}});
    tau_v.push_back({{"node", n.id}, {"tau_v", s.tau_v}});
  }
  return {{"sigma", b.sigma},
          {"tau", b.tau},
          {"lambda", b.lambda.to_string()},
          {"links", links},
          {"schedules", schedules},
          {"admissions", admissions},
          {"tau_v", tau_v},
          {"bundle", b.to_json(tree)}};
}

dsum::SolutionBundle read_bundle(const TreeTopology& tree, const std::string& path) {
  nlohmann::json doc = read_json(path);
  if (doc.contains("bundle")) doc = doc.at("bundle");
  return dsum::SolutionBundle::from_json(tree, doc);
}

std::string manifest(const std::string& command, const nlohmann::json& config,
                     const std::vector<std::pair<std::string, std::string>>& files,
                     const std::vector<std::string>& nondeterministic) {
  std::ostringstream os;
  os << "tool backhaul " << kVersion << "\n";
  os << "command " << command << "\n";
  os << "config " << config.dump() << "\n";
  for (const auto& [name, text] : files) {
    os << "file " << name << " bytes " << text.size() << " fnv1a64 " << exp::fnv1a_hex(text) << "\n";
  }
  for (const std::string& name : nondeterministic) os << "file " << name << " timing\n";
  return os.str();
}

int cmd_symmetric(const std::string& tree_path, const std::string& branching, const std::string& capacities,
                  const std::string& lambda_s, std::optional<int64_t> tau) {
  symmetric::SymmetricTreeSpec spec;
  Rational lambda(1);
  if (!tree_path.empty()) {
    const LoadedTree t = load_tree_file(tree_path);
    auto s = symmetric::spec_from_tree(t.tree);
    if (!s) throw std::runtime_error("tree is not symmetric");
    spec = *s;
    lambda = t.lambda;
  } else {
    for (const std::string& x : split(branching, ',')) spec.branching.push_back(std::stoll(x));
    for (const std::string& x : split(capacities, ',')) spec.capacities.push_back(Rational::parse(x));
  }
  if (!lambda_s.empty()) lambda = Rational::parse(lambda_s);
  spec.validate();
  nlohmann::json out = {{"branching", spec.branching},
                        {"lambda_star", symmetric::lambda_star(spec).to_string()},
                        {"tau_star", symmetric::tau_star(spec)},
                        {"flows", spec.flows()},
                        {"lambda", lambda.to_string()}};
  nlohmann::json caps = nlohmann::json::array();
  for (const Rational& c : spec.capacities) caps.push_back(c.to_string());
  out["capacities"] = caps;
  out["urr_k"] = spec.branching;
  if (tau) {
    out["tau"] = *tau;
    out["in_region"] = symmetric::in_region(spec, lambda, *tau);
    try {
      const symmetric::PruneResult p = symmetric::greedy_prune(spec, *tau);
      nlohmann::json log = nlohmann::json::array();
      for (const symmetric::PruneStep& st : p.log) log.push_back({{"level", st.level}, {"before", st.before}});
      out["prune_log"] = log;
      out["pruned_branching"] = p.pruned.branching;
      out["pruned_lambda_star"] = symmetric::lambda_star(p.pruned).to_string();
      out["remaining_flows"] = p.remaining_flows;
      out["urr_k"] = p.pruned.branching;
    } catch (const std::domain_error& e) {
      out["prune_error"] = e.what();
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_dsum(const TreeArgs& ta, int64_t tau, int threads, const std::string& baseline, const std::string& out_path,
             bool quiet) {
  const LoadedTree t = load(ta);
  dsum::SolutionBundle b;
  double ms = 0;
  if (baseline == "urr") {
    b = dsum::urr_baseline(t.tree, t.lambda, tau);
  } else if (baseline.empty()) {
    dsum::DsumResult r = dsum::solve(t.tree, t.lambda, tau, dsum::DsumOptions{threads});
    ms = r.parallel_ms;
    b = std::move(r.bundle);
  } else {
    throw std::runtime_error("unknown baseline: " + baseline);
  }
  const std::vector<std::string> errs = dsum::validate_bundle(t.tree, b);
  for (const std::string& e : errs) std::cerr << "invalid bundle: " << e << "\n";
  emit(out_path, summary_json(t.tree, b).dump(2) + "\n");
  if (!quiet) {
    std::cerr << (baseline.empty() ? "dsum" : baseline) << ": sigma " << b.sigma << " of " << t.tree.total_flows()
              << " flows, tau " << tau << ", capacity bound " << capacity_bound(t.tree, t.lambda);
    if (baseline.empty()) std::cerr << ", distributed solve " << ms << " ms";
    std::cerr << "\n";
  }
  return errs.empty() ? 0 : 1;
}

int cmd_milp_emit(const TreeArgs& ta, int64_t tau, const std::string& node_id, int64_t k_max,
                  const std::string& out_path) {
  const LoadedTree t = load(ta);
  milp::MilpModel m;
  if (!node_id.empty()) {
    auto v = t.tree.find(node_id);
    if (!v) throw std::runtime_error("no node " + node_id);
    std::vector<Rational> caps;
    for (int c : t.tree.node(*v).children) caps.push_back(t.tree.node(c).capacity);
    if (caps.empty()) throw std::runtime_error("node " + node_id + " is an AP");
    m = milp::build_node_model(caps, t.lambda, k_max > 0 ? k_max : tau);
  } else {
    m = milp::build_global_model(t.tree, t.lambda, tau, k_max);
  }
  emit(out_path, milp::emit_lp(m));
  std::cerr << "variables " << m.variables().size() << " (binary " << m.count(milp::VarKind::kBinary)
            << ", integer " << m.count(milp::VarKind::kInteger) << "), constraints " << m.constraints().size()
            << "\n";
  return 0;
}

int cmd_milp_check(const TreeArgs& ta, std::optional<int64_t> tau, const std::string& solution, int64_t k_max) {
  const LoadedTree t = load(ta);
  const dsum::SolutionBundle b = read_bundle(t.tree, solution);
  const milp::MilpModel m = milp::build_global_model(t.tree, b.lambda, tau.value_or(b.tau), k_max);
  const milp::Report r = milp::check_certificate(m, t.tree, b);
  std::cout << r.to_json().dump(2) << "\n";
  return r.passed() ? 0 : 1;
}

int cmd_simulate(const TreeArgs& ta, const std::string& solution, std::optional<int64_t> tau,
                 const std::string& pattern, int64_t periods, uint64_t seed, bool flows) {
  const LoadedTree t = load(ta);
  const dsum::SolutionBundle b = read_bundle(t.tree, solution);
  sim::SimConfig cfg;
  cfg.pattern = sim::parse_pattern(pattern);
  cfg.periods = periods;
  cfg.seed = seed;
  const sim::SimReport r = sim::simulate(t.tree, b, tau.value_or(b.tau), cfg);
  nlohmann::json j = r.to_json();
  if (!flows) {
    j.erase("flows");
    j.erase("slices");
  }
  std::cout << j.dump(2) << "\n";
  return r.violations == 0 && r.conservation_ok ? 0 : 1;
}

int cmd_exp_is_sxy(const std::string& config_path, const std::string& out_dir, int threads) {
  exp::IsSxyConfig cfg = config_path.empty() ? exp::IsSxyConfig{} : exp::IsSxyConfig::from_json(read_json(config_path));
  if (threads > 0) cfg.threads = threads;
  fs::create_directories(out_dir);
  const exp::IsSxyResult res = exp::run_is_vs_sxy(cfg);
  std::vector<exp::IsSxyRecord> failures;
  for (const exp::IsSxyRecord& r : res.records) {
    if (!r.is) failures.push_back(r);
  }
  const std::vector<std::pair<std::string, std::string>> files = {
      {"is_vs_sxy.csv", exp::is_sxy_csv(res.rows)},
      {"vectors.csv", exp::is_sxy_records_csv(res.records)},
      {"is_failures.csv", exp::is_sxy_records_csv(failures)},
      {"is_schedules.jsonl", exp::is_schedules_jsonl(res.records)},
      {"config.json", cfg.to_json().dump(2) + "\n"}};
  for (const auto& [name, text] : files) write_file(fs::path(out_dir) / name, text);
  write_file(fs::path(out_dir) / "MANIFEST", manifest("experiment is-vs-sxy", cfg.to_json(), files, {}));
  std::cout << exp::is_sxy_csv(res.rows);
  return 0;
}

int cmd_exp_dsum(const std::string& config_path, const std::string& out_dir, int threads) {
  exp::DsumExpConfig cfg =
      config_path.empty() ? exp::DsumExpConfig{} : exp::DsumExpConfig::from_json(read_json(config_path));
  if (threads > 0) cfg.threads = threads;
  fs::create_directories(fs::path(out_dir) / "trees");
  const std::vector<exp::DsumRow> rows = exp::run_dsum_experiment(cfg);
  std::vector<std::pair<std::string, std::string>> files = {{"dsum.csv", exp::dsum_csv(rows)},
                                                            {"config.json", cfg.to_json().dump(2) + "\n"}};
  for (int i = 0; i < cfg.trees; ++i) {
    const TreeTopology tree = exp::gen_random_tree(cfg.tree, exp::stream_seed(cfg.seed, i));
    files.emplace_back("trees/tree_" + std::to_string(i) + ".json", emit_tree(tree).dump(2) + "\n");
  }
  for (const auto& [name, text] : files) write_file(fs::path(out_dir) / name, text);
  write_file(fs::path(out_dir) / "dsum_timing.csv", exp::dsum_timing_csv(rows));
  write_file(fs::path(out_dir) / "MANIFEST", manifest("experiment dsum", cfg.to_json(), files, {"dsum_timing.csv"}));
  std::cout << exp::dsum_csv(rows);
  return 0;
}

nlohmann::json witness_json(const pinwheel::SxyWitness& w) {
  return {{"x", w.x},
          {"y", w.y},
          {"specialized", w.specialized},
          {"in_x", w.in_x},
          {"load", w.load().to_string()}};
}

// Exit code 0 when schedulable, 1 when not, 2 when the oracle hits its limit.
int cmd_pinwheel(const std::string& k_text, const std::string& algo) {
  const KVector k = KVector::parse(k_text);
  const exp::Density d = exp::density_of(k.finite_values());
  nlohmann::json out = {{"k", k.to_string()}, {"algo", algo}, {"density", d.num + "/" + d.den}};
  std::optional<CyclicSchedule> sched;
  nlohmann::json trace = nlohmann::json::array();
  int code = 1;
  if (algo == "sxy") {
    const auto w = pinwheel::sxy_feasible(k);
    if (w) {
      trace.push_back(witness_json(*w));
      sched = pinwheel::sxy_build(k, *w);
    }
  } else if (algo == "is") {
    const pinwheel::IsTrace t = pinwheel::is_trace(k);
    for (const pinwheel::IsIteration& it : t.iterations) {
      trace.push_back({{"j", it.j},
                       {"k", it.k.to_string()},
                       {"removed", it.removed},
                       {"schedulable_here", it.schedulable_here}});
    }
    if (t.witness) trace.push_back({{"witness", witness_json(*t.witness)}});
    if (auto s = pinwheel::is_schedule(k)) sched = s->first;
  } else {
    const pinwheel::OracleResult r = pinwheel::brute_force_schedulable(k);
    trace.push_back({{"states_explored", r.states_explored}});
    sched = r.schedule;
    if (r.verdict == pinwheel::OracleVerdict::kResourceLimit) code = 2;
  }
  if (sched && !pinwheel::verify_schedule(*sched, k)) {
    code = 0;
    out["schedulable"] = true;
    out["period"] = sched->period();
    out["slots"] = sched->slots;
  } else {
    out["schedulable"] = code == 2 ? nlohmann::json(nullptr) : nlohmann::json(false);
    out["period"] = nullptr;
    out["slots"] = nlohmann::json::array();
  }
  out["trace"] = trace;
  std::cout << out.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deadline-guaranteed link scheduling and admission for tree backhaul networks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto add_tree = [](CLI::App* c, TreeArgs& a) {
    c->add_option("--tree", a.tree_path, "Tree JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--lambda", a.lambda, "Override the per-flow rate (packets per slot)");
  };

  // symmetric analyze
  auto* sym = app.add_subcommand("symmetric", "Closed forms for symmetric trees");
  auto* sym_an = sym->add_subcommand("analyze", "lambda*, tau*, region membership, greedy pruning");
  std::string sym_tree, sym_branching, sym_caps, sym_lambda;
  std::optional<int64_t> sym_tau;
  sym_an->add_option("--tree", sym_tree, "Symmetric tree JSON");
  sym_an->add_option("--branching", sym_branching, "N_1,...,N_D");
  sym_an->add_option("--capacities", sym_caps, "c_1,...,c_D");
  sym_an->add_option("--lambda", sym_lambda, "Per-flow rate");
  sym_an->add_option("--tau", sym_tau, "Deadline");
  sym->require_subcommand(1);

  // dsum solve
  auto* ds = app.add_subcommand("dsum", "Utility-maximizing admission");
  auto* ds_solve = ds->add_subcommand("solve", "Solve and print the solution bundle");
  TreeArgs ds_tree;
  int64_t ds_tau = 0;
  int ds_threads = 1;
  std::string ds_baseline, ds_out;
  bool ds_quiet = false;
  add_tree(ds_solve, ds_tree);
  ds_solve->add_option("--tau", ds_tau, "Deadline in slots")->required();
  ds_solve->add_option("--threads", ds_threads, "Workers per tree level");
  ds_solve->add_option("--baseline", ds_baseline, "Run a baseline instead (urr)");
  ds_solve->add_option("--out", ds_out, "Output file (default stdout)");
  ds_solve->add_flag("--quiet", ds_quiet, "No summary on stderr");
  ds->require_subcommand(1);

  // milp emit / check
  auto* mi = app.add_subcommand("milp", "Linearized model: emission and certificate checking");
  auto* mi_emit = mi->add_subcommand("emit", "Write the model in LP format");
  TreeArgs mi_tree;
  int64_t mi_tau = 0, mi_kmax = 0;
  std::string mi_node, mi_out;
  add_tree(mi_emit, mi_tree);
  mi_emit->add_option("--tau", mi_tau, "Deadline in slots")->required();
  mi_emit->add_option("--node", mi_node, "Emit only this node's block");
  mi_emit->add_option("--k-max", mi_kmax, "Largest k (default tau)");
  mi_emit->add_option("--out", mi_out, "Output file (default stdout)");
  auto* mi_check = mi->add_subcommand("check", "Evaluate the certificate of a solution bundle");
  TreeArgs mc_tree;
  std::string mc_solution;
  std::optional<int64_t> mc_tau;
  int64_t mc_kmax = 0;
  add_tree(mi_check, mc_tree);
  mi_check->add_option("--solution", mc_solution, "Output of dsum solve")->required()->check(CLI::ExistingFile);
  mi_check->add_option("--tau", mc_tau, "Deadline (default: the bundle's)");
  mi_check->add_option("--k-max", mc_kmax, "Largest k (default tau)");
  mi->require_subcommand(1);

  // simulate
  auto* si = app.add_subcommand("simulate", "Slot-level replay of a solution bundle");
  TreeArgs si_tree;
  std::string si_solution, si_pattern = "saturating";
  std::optional<int64_t> si_tau;
  int64_t si_periods = 5;
  uint64_t si_seed = 0;
  bool si_flows = false;
  add_tree(si, si_tree);
  si->add_option("--solution", si_solution, "Output of dsum solve")->required()->check(CLI::ExistingFile);
  si->add_option("--tau", si_tau, "Deadline (default: the bundle's)");
  si->add_option("--pattern", si_pattern, "saturating | random | burst");
  si->add_option("--periods", si_periods, "Horizon in global periods");
  si->add_option("--seed", si_seed, "Seed for the random pattern");
  si->add_flag("--per-flow", si_flows, "Include per-flow and per-slice detail");

  // pinwheel
  auto* pw = app.add_subcommand("pinwheel", "Single-vector pinwheel scheduling");
  auto* pw_check = pw->add_subcommand("check", "Decide and build a schedule for one vector");
  std::string pw_k, pw_algo = "is";
  pw_check->add_option("--k", pw_k, "Inter-scheduling times, e.g. 3,5,5,9,9")->required();
  pw_check->add_option("--algo", pw_algo, "sxy | is | oracle")->check(CLI::IsMember({"sxy", "is", "oracle"}));
  pw->require_subcommand(1);

  // experiment
  auto* ex = app.add_subcommand("experiment", "Seeded experiment drivers");
  std::string ex_config, ex_out = "out";
  int ex_threads = 0;
  auto* ex_is = ex->add_subcommand("is-vs-sxy", "Success rates of Sxy and IS on random vectors");
  auto* ex_ds = ex->add_subcommand("dsum", "DSUM and URR on random trees over a deadline sweep");
  for (auto* c : {ex_is, ex_ds}) {
    c->add_option("--config", ex_config, "Config JSON")->check(CLI::ExistingFile);
    c->add_option("--out", ex_out, "Output directory");
    c->add_option("--threads", ex_threads, "Workers");
  }
  ex->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sym_an) return cmd_symmetric(sym_tree, sym_branching, sym_caps, sym_lambda, sym_tau);
    if (*ds_solve) return cmd_dsum(ds_tree, ds_tau, ds_threads, ds_baseline, ds_out, ds_quiet);
    if (*mi_emit) return cmd_milp_emit(mi_tree, mi_tau, mi_node, mi_kmax, mi_out);
    if (*mi_check) return cmd_milp_check(mc_tree, mc_tau, mc_solution, mc_kmax);
    if (*si) return cmd_simulate(si_tree, si_solution, si_tau, si_pattern, si_periods, si_seed, si_flows);
    if (*pw_check) return cmd_pinwheel(pw_k, pw_algo);
    if (*ex_is) return cmd_exp_is_sxy(ex_config, ex_out, ex_threads);
    if (*ex_ds) return cmd_exp_dsum(ex_config, ex_out, ex_threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
