#pragma once
#include <sstream>
#include <string>
#include <vector>

#include "aisbn/engine.hpp"
#include "aisbn/io.hpp"

namespace aisbn {

// Report documents reuse the directive-line format. Everything that went
// into a run is echoed (config, seed, inputs), so a report plus the network
// file reproduces the run byte for byte. No timestamps or other
// machine-local state: identical runs serialize identically.

inline void emit_config_echo(std::ostringstream& os, const RunConfig& rc) {
  const EngineConfig& c = rc.engine;
  os << "config seed " << rc.seed << '\n';
  os << "config epsilon_r " << format_double(c.eps_r) << '\n';
  os << "config delta " << format_double(c.delta) << '\n';
  os << "config updating_interval " << c.updating_interval << '\n';
  os << "config threshold " << c.threshold << '\n';
  os << "config warmup_stages " << c.warmup_stages << '\n';
  os << "config sample_cap " << c.sample_cap << '\n';
  os << "config max_restarts " << c.max_restarts << '\n';
  os << "config restart_strategy_switch " << c.restart_strategy_switch << '\n';
  os << "config algorithm " << to_string(c.algorithm) << '\n';
  os << "config interleave_learning " << (c.interleave_learning ? "true" : "false") << '\n';
  os << "config reuse_learned_importance " << (c.reuse_learned_importance ? "true" : "false")
     << '\n';
  os << "config mu_analytic_bound " << (c.mu_uses_analytic_bound ? "true" : "false") << '\n';
  os << "config p_floor " << format_double(c.p_floor) << '\n';
  os << "config init_strategy "
     << (c.init_strategy == InitStrategy::cpt_clamp ? "cpt-clamp" : "uniform-evidence-parents")
     << '\n';
  if (c.delta_s_table)
    for (const DeltaSEntry& e : c.delta_s_table->entries)
      os << "config delta_s " << format_double(e.delta) << ' ' << format_double(e.eps_r) << ' '
         << format_double(e.delta_s) << '\n';
}

inline void emit_estimate_block(std::ostringstream& os, const EstimateReport& r) {
  os << "estimate " << format_double(r.estimate) << '\n';
  os << "terminated-by " << to_string(r.terminated_by) << '\n';
  os << "restarts " << r.restarts << '\n';
  os << "total-samples " << r.total_samples << '\n';
  os << "gamma " << format_double(r.gamma) << '\n';
  os << "n-tilde-final " << format_double(r.n_tilde_final) << '\n';
  os << "delta-s " << format_double(r.delta_s) << '\n';
  os << "alpha " << format_double(r.alpha) << '\n';
  if (r.final_stage_below_threshold) os << "flag final-stage-below-threshold\n";
  for (const std::string& f : r.degenerate_flags) os << "flag " << f << '\n';
  for (const StageDiagnostics& s : r.stages) {
    os << "stage " << s.stage << ' ' << (s.warmup ? "warmup" : "estimation") << " count "
       << s.count << " b " << format_double(s.b_tilde) << " mu " << format_double(s.mu_tilde)
       << " sigma2 " << format_double(s.sigma2_tilde) << " n " << format_double(s.n_tilde)
       << " n-mu " << format_double(s.n_mu) << " n-sigma " << format_double(s.n_sigma) << " eta "
       << format_double(s.eta) << " gamma " << format_double(s.gamma_after)
       << (s.degenerate_variance ? " degenerate" : "") << '\n';
  }
}

inline std::string pair_label(const BayesNet& net, int node, int state) {
  return net.node(node).id + "=" + net.node(node).states[static_cast<std::size_t>(state)];
}

inline std::string assignment_label(const BayesNet& net, const Assignment& a) {
  std::string out;
  for (int i = 0; i < net.n_nodes(); ++i) {
    if (!a.has(i)) continue;
    if (!out.empty()) out += ' ';
    out += pair_label(net, i, a.state(i));
  }
  return out.empty() ? "(none)" : out;
}

inline std::string render_infer_report(const BayesNet& net, const std::string& network_path,
                                       const Assignment& evidence, const InferenceResult& result,
                                       const RunConfig& rc) {
  std::ostringstream os;
  os << "aisbn-report v1\n";
  os << "command infer\n";
  os << "network " << network_path << '\n';
  emit_config_echo(os, rc);
  os << "evidence " << assignment_label(net, evidence) << '\n';
  os << "section evidence-estimate\n";
  emit_estimate_block(os, result.evidence_report);
  for (const QueryResult& q : result.queries) {
    os << "section query " << pair_label(net, q.node, q.state) << '\n';
    os << "posterior " << format_double(q.posterior) << '\n';
    os << "rel-error-interval " << format_double(q.interval.lower) << ' '
       << format_double(q.interval.upper) << '\n';
    os << "confidence " << format_double(q.confidence) << '\n';
    os << "resolved " << (q.resolved_trivially ? "trivially" : "estimated") << '\n';
    if (q.report) emit_estimate_block(os, *q.report);
  }
  os << "end\n";
  return os.str();
}

} // namespace aisbn
