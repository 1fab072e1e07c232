// Command-line front end: validate | exact | infer | benchmark.
//
// Exit codes: 0 success, 2 parse/validation failure, 3 impossible evidence,
// 4 zero evidence mass, 5 sample cap exhausted after restarts.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aisbn/aisbn.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitImpossibleEvidence = 3;
constexpr int kExitZeroMass = 4;
constexpr int kExitCapExhausted = 5;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return true;
}

void print_issues(const std::string& path, const std::vector<aisbn::ParseIssue>& issues) {
  for (const auto& e : issues)
    std::cerr << "error: " << path << ":" << e.line << ": " << e.message << "\n";
}

std::optional<aisbn::BayesNet> load_network(const std::string& path) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  auto parsed = aisbn::parse_network(*text);
  if (!parsed.ok()) {
    print_issues(path, parsed.errors);
    return std::nullopt;
  }
  return std::move(*parsed.value);
}

// node=state pairs from repeatable flags (comma-splittable) and spec files.
struct PairSources {
  std::vector<std::string> inline_specs;
  std::string file;
};

std::optional<std::vector<aisbn::NodeStatePair>> collect_pairs(const PairSources& src,
                                                               const char* what) {
  std::string merged;
  for (const std::string& s : src.inline_specs) {
    std::string t = s;
    for (char& ch : t)
      if (ch == ',') ch = ' ';
    merged += t + "\n";
  }
  if (!src.file.empty()) {
    const auto text = read_file(src.file);
    if (!text) {
      std::cerr << "error: cannot read '" << src.file << "'\n";
      return std::nullopt;
    }
    merged += *text;
  }
  auto parsed = aisbn::parse_pair_list(merged);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::cerr << "error: bad " << what << " spec: " << e.message << "\n";
    return std::nullopt;
  }
  return std::move(*parsed.value);
}

int resolve_evidence(const aisbn::BayesNet& net, const PairSources& src,
                     aisbn::Assignment& out) {
  const auto pairs = collect_pairs(src, "evidence");
  if (!pairs) return kExitParse;
  const auto resolved = aisbn::resolve_pairs(net, *pairs);
  if (!resolved.errors.empty()) {
    for (const auto& e : resolved.errors) std::cerr << "error: " << e << "\n";
    return resolved.conflict ? kExitImpossibleEvidence : kExitParse;
  }
  out = resolved.assignment;
  return kExitOk;
}

int resolve_queries(const aisbn::BayesNet& net, const PairSources& src,
                    std::vector<std::pair<int, int>>& out) {
  const auto pairs = collect_pairs(src, "query");
  if (!pairs) return kExitParse;
  for (const auto& p : *pairs) {
    const auto node = net.index_of(p.node);
    if (!node) {
      std::cerr << "error: unknown node '" << p.node << "'\n";
      return kExitParse;
    }
    int st = -1;
    const auto& states = net.node(*node).states;
    for (std::size_t s = 0; s < states.size(); ++s)
      if (states[s] == p.state) st = static_cast<int>(s);
    if (st < 0) {
      std::cerr << "error: node '" << p.node << "' has no state '" << p.state << "'\n";
      return kExitParse;
    }
    out.emplace_back(*node, st);
  }
  return kExitOk;
}

struct EngineFlags {
  std::string config_path;
  std::optional<double> eps_r, delta, p_floor;
  std::optional<std::int64_t> interval, threshold, sample_cap;
  std::optional<int> warmup, max_restarts, strategy_switch;
  std::optional<std::string> algorithm, init_strategy;
  std::optional<bool> interleave, reuse_learned, mu_analytic, paper_delta_s;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run-config file (aisbn-config v1)");
    cmd->add_option("--epsilon-r", eps_r, "relative error target");
    cmd->add_option("--delta", delta, "failure probability");
    cmd->add_option("--interval", interval, "updating interval l");
    cmd->add_option("--threshold", threshold, "moment threshold t");
    cmd->add_option("--warmup-stages", warmup, "learning-only stages");
    cmd->add_option("--sample-cap", sample_cap, "estimation sample cap per call");
    cmd->add_option("--max-restarts", max_restarts, "restarts on prohibitive runs");
    cmd->add_option("--restart-strategy-switch", strategy_switch,
                    "attempt index at which the init strategy flips");
    cmd->add_option("--algorithm", algorithm, "ais-sigma | ais-mu");
    cmd->add_option("--init-strategy", init_strategy, "cpt-clamp | uniform-evidence-parents");
    cmd->add_option("--p-floor", p_floor, "ICPT probability floor");
    cmd->add_flag("--interleave-learning,!--no-interleave-learning", interleave,
                  "keep updating after warm-up");
    cmd->add_flag("--reuse-learned,!--no-reuse-learned", reuse_learned,
                  "seed query runs with the learned evidence function");
    cmd->add_flag("--mu-analytic-bound,!--no-mu-analytic-bound", mu_analytic,
                  "ais-mu uses the likelihood-weighting bound");
    cmd->add_flag("--use-paper-delta-s-table", paper_delta_s,
                  "enable the built-in delta_s table entry");
    cmd->add_option("--seed", seed, "random seed");
  }

  // File first, CLI flags override.
  std::optional<aisbn::RunConfig> build() const {
    aisbn::RunConfig rc;
    if (!config_path.empty()) {
      const auto text = read_file(config_path);
      if (!text) {
        std::cerr << "error: cannot read '" << config_path << "'\n";
        return std::nullopt;
      }
      auto parsed = aisbn::parse_run_config(*text);
      if (!parsed.ok()) {
        print_issues(config_path, parsed.errors);
        return std::nullopt;
      }
      rc = std::move(*parsed.value);
    }
    aisbn::EngineConfig& e = rc.engine;
    if (eps_r) e.eps_r = *eps_r;
    if (delta) e.delta = *delta;
    if (interval) e.updating_interval = *interval;
    if (threshold) e.threshold = *threshold;
    if (warmup) e.warmup_stages = *warmup;
    if (sample_cap) e.sample_cap = *sample_cap;
    if (max_restarts) e.max_restarts = *max_restarts;
    if (strategy_switch) e.restart_strategy_switch = *strategy_switch;
    if (p_floor) e.p_floor = *p_floor;
    if (interleave) e.interleave_learning = *interleave;
    if (reuse_learned) e.reuse_learned_importance = *reuse_learned;
    if (mu_analytic) e.mu_uses_analytic_bound = *mu_analytic;
    if (algorithm) {
      if (*algorithm == "ais-sigma")
        e.algorithm = aisbn::Algorithm::ais_sigma;
      else if (*algorithm == "ais-mu")
        e.algorithm = aisbn::Algorithm::ais_mu;
      else {
        std::cerr << "error: unknown algorithm '" << *algorithm << "'\n";
        return std::nullopt;
      }
    }
    if (init_strategy) {
      if (*init_strategy == "cpt-clamp")
        e.init_strategy = aisbn::InitStrategy::cpt_clamp;
      else if (*init_strategy == "uniform-evidence-parents")
        e.init_strategy = aisbn::InitStrategy::uniform_evidence_parents;
      else {
        std::cerr << "error: unknown init strategy '" << *init_strategy << "'\n";
        return std::nullopt;
      }
    }
    if (paper_delta_s && *paper_delta_s) {
      aisbn::DeltaSTable t = e.delta_s_table.value_or(aisbn::DeltaSTable{});
      for (const auto& entry : aisbn::paper_delta_s_table().entries) t.entries.push_back(entry);
      e.delta_s_table = std::move(t);
    }
    if (seed) rc.seed = *seed;
    try {
      e.validate_or_throw();
    } catch (const std::exception& ex) {
      std::cerr << "error: " << ex.what() << "\n";
      return std::nullopt;
    }
    return rc;
  }
};

int cmd_validate(const std::string& net_path) {
  const auto text = read_file(net_path);
  if (!text) {
    std::cerr << "error: cannot read '" << net_path << "'\n";
    return kExitParse;
  }
  auto parsed = aisbn::parse_network(*text);
  if (!parsed.ok()) {
    print_issues(net_path, parsed.errors);
    return kExitParse;
  }
  std::cout << "ok " << parsed.value->n_nodes() << " nodes\n";
  return kExitOk;
}

int cmd_exact(const std::string& net_path, const PairSources& ev_src, const PairSources& q_src,
              std::uint64_t oracle_cap, const std::string& output) {
  const auto net = load_network(net_path);
  if (!net) return kExitParse;
  aisbn::Assignment evidence(net->n_nodes());
  if (int rc = resolve_evidence(*net, ev_src, evidence); rc != kExitOk) return rc;
  std::vector<std::pair<int, int>> queries;
  if (int rc = resolve_queries(*net, q_src, queries); rc != kExitOk) return rc;

  std::ostringstream os;
  os << "aisbn-report v1\ncommand exact\nnetwork " << net_path << '\n';
  os << "evidence " << aisbn::assignment_label(*net, evidence) << '\n';
  try {
    const auto pe = aisbn::exact_event_probability(*net, evidence, oracle_cap);
    os << "evidence-probability " << aisbn::format_double(pe.probability) << " terms "
       << pe.terms_enumerated << '\n';
    if (!queries.empty() && pe.probability <= 0.0) throw aisbn::ImpossibleEvidenceError("impossible evidence");
    for (const auto& [node, state] : queries) {
      aisbn::Assignment a(net->n_nodes());
      a.set(node, state);
      const double post = aisbn::exact_posterior(*net, a, evidence, oracle_cap);
      os << "posterior " << aisbn::pair_label(*net, node, state) << ' '
         << aisbn::format_double(post) << '\n';
    }
  } catch (const aisbn::OracleCapError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitParse;
  } catch (const aisbn::ImpossibleEvidenceError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitImpossibleEvidence;
  }
  os << "end\n";
  if (!write_output(output, os.str())) {
    std::cerr << "error: cannot write '" << output << "'\n";
    return kExitParse;
  }
  return kExitOk;
}

int cmd_infer(const std::string& net_path, const PairSources& ev_src, const PairSources& q_src,
              const EngineFlags& flags, const std::string& output) {
  const auto net = load_network(net_path);
  if (!net) return kExitParse;
  aisbn::Assignment evidence(net->n_nodes());
  if (int rc = resolve_evidence(*net, ev_src, evidence); rc != kExitOk) return rc;
  std::vector<std::pair<int, int>> queries;
  if (int rc = resolve_queries(*net, q_src, queries); rc != kExitOk) return rc;
  if (evidence.empty() && queries.empty()) {
    std::cerr << "error: need evidence or at least one query\n";
    return kExitParse;
  }
  const auto rc = flags.build();
  if (!rc) return kExitParse;

  try {
    const aisbn::InferenceResult result =
        aisbn::infer_posteriors(*net, evidence, queries, rc->engine, aisbn::Rng(rc->seed));
    const std::string doc = aisbn::render_infer_report(*net, net_path, evidence, result, *rc);
    if (!write_output(output, doc)) {
      std::cerr << "error: cannot write '" << output << "'\n";
      return kExitParse;
    }
    bool capped = result.evidence_report.terminated_by !=
                  aisbn::TerminationReason::required_samples_met;
    for (const auto& q : result.queries)
      if (q.report && q.report->terminated_by != aisbn::TerminationReason::required_samples_met)
        capped = true;
    return capped ? kExitCapExhausted : kExitOk;
  } catch (const aisbn::ZeroMassEvidenceError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitZeroMass;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitParse;
  }
}

int cmd_benchmark(const std::string& suite_path, std::optional<std::uint64_t> seed,
                  const std::string& output) {
  aisbn::SuiteConfig suite;
  if (!suite_path.empty()) {
    const auto text = read_file(suite_path);
    if (!text) {
      std::cerr << "error: cannot read '" << suite_path << "'\n";
      return kExitParse;
    }
    auto parsed = aisbn::parse_suite_config(*text);
    if (!parsed.ok()) {
      print_issues(suite_path, parsed.errors);
      return kExitParse;
    }
    suite = std::move(*parsed.value);
  }
  const std::uint64_t s = seed.value_or(1);
  const aisbn::BenchmarkResult result = aisbn::run_benchmark(suite, s);
  const std::string doc = aisbn::render_benchmark_report(suite, result, s);
  if (!write_output(output, doc)) {
    std::cerr << "error: cannot write '" << output << "'\n";
    return kExitParse;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive importance sampling inference for discrete Bayesian networks"};
  app.require_subcommand(1);

  std::string net_path, output, suite_path;
  PairSources ev_src, q_src;
  EngineFlags flags;
  std::uint64_t oracle_cap = aisbn::kDefaultOracleCap;
  std::optional<std::uint64_t> bench_seed;

  auto* validate = app.add_subcommand("validate", "check a network file");
  std::string v_net;
  validate->add_option("network", v_net, "network file")->required();

  auto* exact = app.add_subcommand("exact", "exact enumeration oracle");
  exact->add_option("network", net_path, "network file")->required();
  exact->add_option("--evidence", ev_src.inline_specs, "node=state pairs");
  exact->add_option("--evidence-file", ev_src.file, "file of node=state pairs");
  exact->add_option("--query", q_src.inline_specs, "node=state pairs");
  exact->add_option("--query-file", q_src.file, "file of node=state pairs");
  exact->add_option("--oracle-cap", oracle_cap, "max joint states to enumerate");
  exact->add_option("--output", output, "write the report here (default stdout)");

  auto* infer = app.add_subcommand("infer", "sampling inference with stopping guarantees");
  std::string i_net, i_output;
  PairSources i_ev, i_q;
  infer->add_option("network", i_net, "network file")->required();
  infer->add_option("--evidence", i_ev.inline_specs, "node=state pairs");
  infer->add_option("--evidence-file", i_ev.file, "file of node=state pairs");
  infer->add_option("--query", i_q.inline_specs, "node=state pairs");
  infer->add_option("--query-file", i_q.file, "file of node=state pairs");
  flags.attach(infer);
  infer->add_option("--output", i_output, "write the report here (default stdout)");

  auto* bench = app.add_subcommand("benchmark", "synthetic suite against the exact oracle");
  std::string b_output;
  bench->add_option("--suite", suite_path, "suite config file (aisbn-benchmark v1)");
  bench->add_option("--seed", bench_seed, "random seed");
  bench->add_option("--output", b_output, "write the report here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(v_net);
  if (exact->parsed()) return cmd_exact(net_path, ev_src, q_src, oracle_cap, output);
  if (infer->parsed()) return cmd_infer(i_net, i_ev, i_q, flags, i_output);
  if (bench->parsed()) return cmd_benchmark(suite_path, bench_seed, b_output);
  return kExitParse;
}
