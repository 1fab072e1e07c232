#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aisbn/engine.hpp"
#include "aisbn/generator.hpp"
#include "aisbn/io.hpp"
#include "aisbn/oracle.hpp"
#include "aisbn/report.hpp"

namespace aisbn {

// ---------------------------------------------------------------------------
// Suite configuration: 'aisbn-benchmark v1' then 'key value' lines.
// ---------------------------------------------------------------------------

inline constexpr const char* kBenchmarkHeader = "aisbn-benchmark";

struct SuiteConfig {
  GeneratorParams gen;
  int networks = 20;
  int evidence_min = 3;
  int evidence_max = 5;
  double evidence_pr_min = 1e-8;
  double evidence_pr_max = 1e-2;
  int queries_per_case = 3;
  int runs_per_case = 1;
  bool compare_mu = true; // also drive a real ais-mu run per case
  EngineConfig engine;
  std::uint64_t oracle_cap = kDefaultOracleCap;
};

inline ParseResult<SuiteConfig> parse_suite_config(std::string_view text) {
  ParseResult<SuiteConfig> res;
  SuiteConfig cfg;
  const auto lines = tokenize_document(text);
  if (lines.empty() || lines[0].tokens[0] != kBenchmarkHeader || lines[0].tokens.size() != 2 ||
      lines[0].tokens[1] != "v1") {
    res.errors.push_back({lines.empty() ? 0 : lines[0].number,
                          std::string("expected header '") + kBenchmarkHeader + " v1'"});
    return res;
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const TextLine& tl = lines[li];
    const std::string& key = tl.tokens[0];
    auto bad = [&](const std::string& why) { res.errors.push_back({tl.number, why}); };
    if (tl.tokens.size() != 2) {
      bad("'" + key + "' expects one value");
      continue;
    }
    const auto dv = parse_double(tl.tokens[1]);
    const auto iv = parse_int(tl.tokens[1]);
    const auto bv = parse_bool(tl.tokens[1]);
    auto want_int = [&](int& out) {
      if (iv)
        out = static_cast<int>(*iv);
      else
        bad("bad integer '" + tl.tokens[1] + "'");
    };
    auto want_double = [&](double& out) {
      if (dv)
        out = *dv;
      else
        bad("bad number '" + tl.tokens[1] + "'");
    };
    std::int64_t i64 = 0;
    if (key == "networks")
      want_int(cfg.networks);
    else if (key == "nodes_min")
      want_int(cfg.gen.nodes_min);
    else if (key == "nodes_max")
      want_int(cfg.gen.nodes_max);
    else if (key == "states_min")
      want_int(cfg.gen.states_min);
    else if (key == "states_max")
      want_int(cfg.gen.states_max);
    else if (key == "max_parents")
      want_int(cfg.gen.max_parents);
    else if (key == "edge_density")
      want_double(cfg.gen.edge_density);
    else if (key == "cpt_sharpness")
      want_double(cfg.gen.cpt_sharpness);
    else if (key == "evidence_min")
      want_int(cfg.evidence_min);
    else if (key == "evidence_max")
      want_int(cfg.evidence_max);
    else if (key == "evidence_pr_min")
      want_double(cfg.evidence_pr_min);
    else if (key == "evidence_pr_max")
      want_double(cfg.evidence_pr_max);
    else if (key == "queries")
      want_int(cfg.queries_per_case);
    else if (key == "runs_per_case")
      want_int(cfg.runs_per_case);
    else if (key == "compare_mu") {
      if (bv)
        cfg.compare_mu = *bv;
      else
        bad("bad boolean '" + tl.tokens[1] + "'");
    } else if (key == "epsilon_r")
      want_double(cfg.engine.eps_r);
    else if (key == "delta")
      want_double(cfg.engine.delta);
    else if (key == "updating_interval") {
      if (iv)
        cfg.engine.updating_interval = *iv;
      else
        bad("bad integer");
    } else if (key == "threshold") {
      if (iv)
        cfg.engine.threshold = *iv;
      else
        bad("bad integer");
    } else if (key == "warmup_stages")
      want_int(cfg.engine.warmup_stages);
    else if (key == "sample_cap") {
      if (iv)
        cfg.engine.sample_cap = *iv;
      else
        bad("bad integer");
    } else if (key == "max_restarts")
      want_int(cfg.engine.max_restarts);
    else if (key == "oracle_cap") {
      if (iv && *iv > 0)
        cfg.oracle_cap = static_cast<std::uint64_t>(*iv);
      else
        bad("bad integer");
    } else {
      bad("unknown key '" + key + "'");
      (void)i64;
    }
  }
  if (res.errors.empty()) {
    try {
      cfg.engine.validate_or_throw();
    } catch (const std::exception& ex) {
      res.errors.push_back({0, ex.what()});
    }
    // Ground truth must exist for every generated case.
    long double worst = 1;
    for (int i = 0; i < cfg.gen.nodes_max; ++i) worst *= cfg.gen.states_max;
    if (worst > static_cast<long double>(cfg.oracle_cap))
      res.errors.push_back({0, "generator parameters exceed the oracle cap"});
  }
  if (!res.errors.empty()) return res;
  res.value = std::move(cfg);
  return res;
}

// ---------------------------------------------------------------------------
// Case generation shared by the harness and the statistical test suites.
// ---------------------------------------------------------------------------

struct QuerySpec {
  int node = -1;
  int state = -1;
  double exact_posterior = 0.0;
};

struct BenchmarkCase {
  BayesNet net;
  Assignment evidence;
  double pr_evidence = 0.0;
  std::vector<QuerySpec> queries;
};

// Builds one oracle-solvable case: a random network, evidence over the
// designated finding nodes (the downstream half of the topological order)
// with Pr(e) inside the configured window, and query states whose exact
// posterior is bounded away from zero.
inline std::optional<BenchmarkCase> make_benchmark_case(const SuiteConfig& cfg, const Rng& rng) {
  Rng net_rng = rng.substream(1);
  Rng ev_rng = rng.substream(2);
  Rng q_rng = rng.substream(3);
  for (int attempt = 0; attempt < 50; ++attempt) {
    BayesNet net = random_network(cfg.gen, net_rng);
    const int n = net.n_nodes();
    std::vector<int> findings(net.topo_order().begin() + n / 2, net.topo_order().end());
    const int span = cfg.evidence_max - cfg.evidence_min + 1;
    const int n_ev = cfg.evidence_min +
                     static_cast<int>(ev_rng.next_below(static_cast<std::uint64_t>(span)));
    auto ev = find_evidence_case(net, findings, n_ev, cfg.evidence_pr_min, cfg.evidence_pr_max,
                                 ev_rng, 60);
    if (!ev) continue;

    BenchmarkCase out;
    out.evidence = std::move(ev->evidence);
    out.pr_evidence = ev->probability;
    std::vector<int> free_nodes;
    for (int i = 0; i < n; ++i)
      if (!out.evidence.has(i)) free_nodes.push_back(i);
    for (int q = 0; q < cfg.queries_per_case && !free_nodes.empty(); ++q) {
      bool placed = false;
      for (int tries = 0; tries < 20 && !placed; ++tries) {
        const std::size_t pick = static_cast<std::size_t>(q_rng.next_below(free_nodes.size()));
        const int node = free_nodes[pick];
        Assignment a(n);
        const int st = static_cast<int>(q_rng.next_below(static_cast<std::uint64_t>(net.n_states(node))));
        a.set(node, st);
        const double post = exact_posterior(net, a, out.evidence, cfg.oracle_cap);
        if (post > 1e-9) {
          out.queries.push_back(QuerySpec{node, st, post});
          free_nodes.erase(free_nodes.begin() + static_cast<std::ptrdiff_t>(pick));
          placed = true;
        }
      }
    }
    if (out.queries.empty()) continue;
    out.net = std::move(net);
    return out;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Result aggregation
// ---------------------------------------------------------------------------

struct Histogram {
  std::vector<double> edges; // ascending; bucket i = [edges[i], edges[i+1])
  std::vector<std::int64_t> counts;

  explicit Histogram(std::vector<double> e)
      : edges(std::move(e)), counts(edges.size() + 1, 0) {}

  // counts[0] is the underflow bucket, counts.back() the overflow bucket.
  void add(double x) {
    std::size_t i = 0;
    while (i < edges.size() && x >= edges[i]) ++i;
    ++counts[i];
  }
  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

struct SummaryStats {
  double mean = 0, sigma = 0, min = 0, median = 0, max = 0;
  std::int64_t n = 0;
};

inline SummaryStats summarize(std::vector<double> xs) {
  SummaryStats s;
  s.n = static_cast<std::int64_t>(xs.size());
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double sq = 0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.sigma = xs.size() > 1 ? std::sqrt(sq / static_cast<double>(xs.size() - 1)) : 0.0;
  s.min = xs.front();
  s.max = xs.back();
  const std::size_t m = xs.size() / 2;
  s.median = xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
  return s;
}

struct BenchmarkResult {
  int cases_built = 0;
  int cases_requested = 0;
  std::vector<double> rel_errors;          // per posterior estimate
  std::vector<double> required_samples;    // final N~ per Estimate_Prob call
  std::vector<double> call_mu_sigma_ratio; // final N_mu / N_sigma per call
  std::vector<double> stage_mu_sigma_ratio;
  std::int64_t stages_ratio_ge_1 = 0;
  std::int64_t stages_total = 0;
  std::int64_t calls_total = 0;
  std::int64_t calls_capped = 0;
  std::int64_t calls_rescued_by_restart = 0;
  std::int64_t posteriors_total = 0;
  std::int64_t posteriors_outside_eq2 = 0;
  std::int64_t zero_mass_runs = 0;
  std::int64_t mu_runs = 0;
  std::int64_t mu_runs_capped = 0;
};

namespace detail {
inline void absorb_call(BenchmarkResult& r, const EstimateReport& rep) {
  ++r.calls_total;
  if (rep.terminated_by != TerminationReason::required_samples_met) ++r.calls_capped;
  if (rep.terminated_by == TerminationReason::required_samples_met && rep.restarts > 0)
    ++r.calls_rescued_by_restart;
  if (std::isfinite(rep.n_tilde_final)) r.required_samples.push_back(rep.n_tilde_final);
  double last_ratio = std::numeric_limits<double>::quiet_NaN();
  for (const StageDiagnostics& s : rep.stages) {
    if (s.warmup || !std::isfinite(s.n_sigma) || !std::isfinite(s.n_mu)) continue;
    const double ratio = s.n_mu / s.n_sigma;
    r.stage_mu_sigma_ratio.push_back(ratio);
    ++r.stages_total;
    if (ratio >= 1.0) ++r.stages_ratio_ge_1;
    last_ratio = ratio;
  }
  if (std::isfinite(last_ratio)) r.call_mu_sigma_ratio.push_back(last_ratio);
}
} // namespace detail

// Runs the full protocol: generate cases, infer posteriors with ais-sigma,
// compare against the oracle, and (optionally) drive a separate ais-mu run
// per case to observe its sampling behavior directly.
inline BenchmarkResult run_benchmark(const SuiteConfig& cfg, std::uint64_t seed) {
  BenchmarkResult res;
  res.cases_requested = cfg.networks;
  const Rng root(seed);
  const RelativeErrorInterval eq2 = posterior_error_bounds(cfg.engine.eps_r);

  for (int c = 0; c < cfg.networks; ++c) {
    const Rng case_rng = root.substream(static_cast<std::uint64_t>(c));
    const auto bc = make_benchmark_case(cfg, case_rng.substream(0));
    if (!bc) continue;
    ++res.cases_built;

    std::vector<std::pair<int, int>> queries;
    for (const QuerySpec& q : bc->queries) queries.emplace_back(q.node, q.state);

    for (int run = 0; run < cfg.runs_per_case; ++run) {
      const Rng run_rng = case_rng.substream(100 + static_cast<std::uint64_t>(run));
      try {
        const InferenceResult inf =
            infer_posteriors(bc->net, bc->evidence, queries, cfg.engine, run_rng);
        detail::absorb_call(res, inf.evidence_report);
        for (std::size_t j = 0; j < inf.queries.size(); ++j) {
          const QueryResult& q = inf.queries[j];
          if (q.report) detail::absorb_call(res, *q.report);
          const double exact = bc->queries[j].exact_posterior;
          const double rel = (q.posterior - exact) / exact;
          res.rel_errors.push_back(std::fabs(rel));
          ++res.posteriors_total;
          if (rel < eq2.lower || rel > eq2.upper) ++res.posteriors_outside_eq2;
        }
      } catch (const ZeroMassEvidenceError&) {
        ++res.zero_mass_runs;
      }
    }

    if (cfg.compare_mu) {
      EngineConfig mu_cfg = cfg.engine;
      mu_cfg.algorithm = Algorithm::ais_mu;
      const EstimateReport mu_rep =
          run_with_restart(bc->net, bc->evidence, mu_cfg, case_rng.substream(999));
      ++res.mu_runs;
      if (mu_rep.terminated_by != TerminationReason::required_samples_met) ++res.mu_runs_capped;
    }
  }
  return res;
}

inline void emit_histogram(std::ostringstream& os, const std::string& name, const Histogram& h) {
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << "hist " << name << ' ';
    if (i == 0)
      os << "-inf " << format_double(h.edges.front());
    else if (i == h.counts.size() - 1)
      os << format_double(h.edges.back()) << " +inf";
    else
      os << format_double(h.edges[i - 1]) << ' ' << format_double(h.edges[i]);
    os << ' ' << h.counts[i] << '\n';
  }
}

inline std::string render_benchmark_report(const SuiteConfig& cfg, const BenchmarkResult& r,
                                           std::uint64_t seed) {
  std::ostringstream os;
  os << "aisbn-report v1\n";
  os << "command benchmark\n";
  os << "generator-version " << kGeneratorVersion << '\n';
  os << "seed " << seed << '\n';
  os << "suite networks " << cfg.networks << '\n';
  os << "suite nodes " << cfg.gen.nodes_min << ' ' << cfg.gen.nodes_max << '\n';
  os << "suite states " << cfg.gen.states_min << ' ' << cfg.gen.states_max << '\n';
  os << "suite max_parents " << cfg.gen.max_parents << '\n';
  os << "suite edge_density " << format_double(cfg.gen.edge_density) << '\n';
  os << "suite cpt_sharpness " << format_double(cfg.gen.cpt_sharpness) << '\n';
  os << "suite evidence " << cfg.evidence_min << ' ' << cfg.evidence_max << '\n';
  os << "suite evidence_pr " << format_double(cfg.evidence_pr_min) << ' '
     << format_double(cfg.evidence_pr_max) << '\n';
  os << "suite queries " << cfg.queries_per_case << '\n';
  os << "suite runs_per_case " << cfg.runs_per_case << '\n';
  os << "suite epsilon_r " << format_double(cfg.engine.eps_r) << '\n';
  os << "suite delta " << format_double(cfg.engine.delta) << '\n';
  os << "cases-built " << r.cases_built << " of " << r.cases_requested << '\n';

  const SummaryStats st = summarize(r.rel_errors);
  os << "table rel-error n " << st.n << " mean " << format_double(st.mean) << " sigma "
     << format_double(st.sigma) << " min " << format_double(st.min) << " median "
     << format_double(st.median) << " max " << format_double(st.max) << '\n';

  Histogram he({0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.04, 0.05, 0.075, 0.1, 0.2, 0.5});
  for (double x : r.rel_errors) he.add(x);
  emit_histogram(os, "rel-error", he);

  Histogram hn({1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5});
  for (double x : r.required_samples) hn.add(x);
  emit_histogram(os, "required-samples", hn);

  Histogram hr({1, 2, 4, 8, 16, 32, 64, 128});
  for (double x : r.call_mu_sigma_ratio) hr.add(x);
  emit_histogram(os, "mu-sigma-ratio", hr);

  std::int64_t ge4 = 0;
  for (double x : r.call_mu_sigma_ratio)
    if (x >= 4.0) ++ge4;
  os << "ratio-ge-4 " << ge4 << " of " << r.call_mu_sigma_ratio.size() << '\n';
  os << "stage-ratio-ge-1 " << r.stages_ratio_ge_1 << " of " << r.stages_total << '\n';

  const RelativeErrorInterval eq2 = posterior_error_bounds(cfg.engine.eps_r);
  os << "outside-eq2-interval " << r.posteriors_outside_eq2 << " of " << r.posteriors_total
     << " interval " << format_double(eq2.lower) << ' ' << format_double(eq2.upper)
     << " allowed " << format_double(2.0 * cfg.engine.delta) << '\n';
  os << "calls " << r.calls_total << " capped " << r.calls_capped << " rescued-by-restart "
     << r.calls_rescued_by_restart << '\n';
  os << "zero-mass-runs " << r.zero_mass_runs << '\n';
  if (r.mu_runs > 0)
    os << "mu-runs " << r.mu_runs << " capped " << r.mu_runs_capped << '\n';
  os << "end\n";
  return os.str();
}

} // namespace aisbn
