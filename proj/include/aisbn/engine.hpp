#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aisbn/adaptive.hpp"
#include "aisbn/network.hpp"
#include "aisbn/numeric.hpp"
#include "aisbn/rng.hpp"
#include "aisbn/sampler.hpp"
#include "aisbn/stopping.hpp"

namespace aisbn {

enum class Algorithm { ais_sigma, ais_mu };
enum class TerminationReason { required_samples_met, sample_cap, zero_mass };

inline const char* to_string(Algorithm a) {
  return a == Algorithm::ais_sigma ? "ais-sigma" : "ais-mu";
}
inline const char* to_string(TerminationReason t) {
  switch (t) {
    case TerminationReason::required_samples_met: return "required-samples-met";
    case TerminationReason::sample_cap: return "sample-cap";
    default: return "zero-mass";
  }
}

struct ZeroMassEvidenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineConfig {
  double eps_r = 0.025;
  double delta = 0.025;
  std::int64_t updating_interval = 2500; // l: samples per stage
  std::int64_t threshold = 1000;         // t: samples before moments are trusted
  int warmup_stages = 10;                // stages that learn but feed no estimate
  std::int64_t sample_cap = 100000;      // cap on estimation-phase samples per call
  int max_restarts = 2;
  int restart_strategy_switch = 2;       // attempt index at which the init strategy flips
  Algorithm algorithm = Algorithm::ais_sigma;
  bool interleave_learning = false;      // keep updating after warm-up
  bool reuse_learned_importance = true;  // seed query runs with the evidence run's function
  bool mu_uses_analytic_bound = false;   // ais-mu: lw_bound instead of the running max
  double p_floor = kDefaultPFloor;
  InitStrategy init_strategy = InitStrategy::cpt_clamp;
  std::optional<DeltaSTable> delta_s_table;

  void validate_or_throw() const {
    if (!(eps_r > 0.0 && eps_r < 1.0)) throw std::invalid_argument("eps_r out of (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta out of (0,1)");
    if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
    if (threshold >= updating_interval)
      throw std::invalid_argument("threshold must be below the updating interval");
    if (sample_cap < updating_interval)
      throw std::invalid_argument("sample cap must cover at least one stage");
    if (warmup_stages < 0) throw std::invalid_argument("warmup_stages must be >= 0");
    if (max_restarts < 0) throw std::invalid_argument("max_restarts must be >= 0");
    if (!(p_floor > 0.0 && p_floor < 1.0)) throw std::invalid_argument("p_floor out of (0,1)");
    if (init_strategy == InitStrategy::from_learned)
      throw std::invalid_argument("from-learned is selected by passing a seed function");
  }
};

// One stage's running sums and the moments derived from them once the
// threshold is passed. Sums are Kahan-compensated so stage statistics do not
// drift over long stages.
struct StageAccumulator {
  std::int64_t i = 0;
  KahanSum z_total;
  KahanSum zeta; // sum of squared scores
  double b_tilde = 0.0;
  double mu_tilde = std::numeric_limits<double>::quiet_NaN();
  double sigma2_tilde = std::numeric_limits<double>::quiet_NaN();
  double n_tilde = std::numeric_limits<double>::infinity();

  void add(double z) {
    ++i;
    z_total.add(z);
    zeta.add(z * z);
    if (z > b_tilde) b_tilde = z;
  }
  void reset() { *this = StageAccumulator{}; }
};

// Cross-stage accumulators implementing the inverse-requirement weighting
// w^(k) = (1/N~(k)) / sum_l (1/N~(l)) applied to stage means.
struct RunAccumulator {
  double gamma = 0.0;       // completed-stage fraction of the requirement
  double omega_total = 0.0; // sum of Z_total^(k) / (count^(k) * N~(k))
  double omega_sum = 0.0;   // sum of 1 / N~(k)
  int k = 0;                // folded stages
  double sole_mean = 0.0;

  void fold_completed(std::int64_t count, double z_total, double n_tilde) {
    gamma += static_cast<double>(count) / n_tilde;
    fold(count, z_total, n_tilde);
  }
  void fold_final(std::int64_t count, double z_total, double n_tilde) {
    fold(count, z_total, n_tilde);
  }
  // With a single folded stage the quotient omega_total/omega_sum is exactly
  // the stage mean; computing it directly avoids two spurious roundings.
  double estimate() const {
    if (k == 0) return 0.0;
    if (k == 1) return sole_mean;
    return omega_total / omega_sum;
  }

private:
  void fold(std::int64_t count, double z_total, double n_tilde) {
    omega_total += z_total / (static_cast<double>(count) * n_tilde);
    omega_sum += 1.0 / n_tilde;
    if (k == 0) sole_mean = z_total / static_cast<double>(count);
    ++k;
  }
};

struct StageDiagnostics {
  int stage = 0;
  bool warmup = false;
  std::int64_t count = 0;
  double b_tilde = 0.0;
  double mu_tilde = std::numeric_limits<double>::quiet_NaN();
  double sigma2_tilde = std::numeric_limits<double>::quiet_NaN();
  double n_tilde = std::numeric_limits<double>::infinity();
  double n_mu = std::numeric_limits<double>::infinity();    // Theorem 3.1 requirement
  double n_sigma = std::numeric_limits<double>::infinity(); // stage-loop requirement
  double eta = std::numeric_limits<double>::quiet_NaN();    // NaN when no update ran
  double gamma_after = 0.0;
  bool degenerate_variance = false;
};

struct EstimateReport {
  double estimate = 0.0;
  std::vector<StageDiagnostics> stages;
  int restarts = 0;
  std::vector<std::string> degenerate_flags;
  std::int64_t total_samples = 0;
  TerminationReason terminated_by = TerminationReason::zero_mass;
  double gamma = 0.0;        // raw, unclamped
  double n_tilde_final = std::numeric_limits<double>::infinity();
  double delta_s = 0.0;
  double alpha = 0.0;
  bool final_stage_below_threshold = false;
};

// Estimates Pr(W = w) with the stage loop: draw and score per sample; track
// (Z_total, zeta, b~) per stage; once i > t derive (mu~, sigma2~, N~); at
// i = l advance the learning stage and fold the stage into the run
// accumulators; stop once i >= max(t, (1-gamma)*N~) or at the sample cap.
// Warm-up stages learn but are never folded, and the termination test stays
// off until they are done. When i <= t in a fresh stage the test runs
// against the previous stage's N~, which never terminates an unestimated
// first stage (N~ starts at infinity).
inline EstimateReport estimate_prob(const BayesNet& net, const Assignment& w,
                                    const EngineConfig& cfg, const Rng& rng,
                                    const ImportanceFunction* seed = nullptr,
                                    ImportanceFunction* learned_out = nullptr) {
  cfg.validate_or_throw();
  if (!net.acyclic()) throw std::invalid_argument("network is not a DAG");
  if (auto err = check_assignment(net, w)) throw std::invalid_argument(*err);

  std::string delta_s_warning;
  const StoppingParams params = StoppingParams::make(
      cfg.eps_r, cfg.delta, cfg.delta_s_table ? &*cfg.delta_s_table : nullptr, &delta_s_warning);

  ImportanceFunction imp =
      seed ? initial_importance(net, w, InitStrategy::from_learned, cfg.p_floor, seed)
           : initial_importance(net, w, cfg.init_strategy, cfg.p_floor);

  EstimateReport rep;
  rep.delta_s = params.delta_s;
  rep.alpha = params.alpha;
  if (!delta_s_warning.empty()) rep.degenerate_flags.push_back(delta_s_warning);

  const double analytic_bound = cfg.mu_uses_analytic_bound ? lw_bound(net, w) : 0.0;

  RunAccumulator run;
  StageAccumulator st;
  ScoreTallies tallies = ScoreTallies::shaped_like(imp);
  int stage = 0;
  int updates_done = 0;
  std::optional<double> b_prev;
  double n_tilde = std::numeric_limits<double>::infinity(); // survives stage resets
  double n_mu = std::numeric_limits<double>::infinity();
  double n_sigma = std::numeric_limits<double>::infinity();
  bool stage_degenerate = false;
  bool degenerate_flagged = false;
  bool any_positive_score = false;
  std::int64_t total_samples = 0;
  std::int64_t estimation_samples = 0;
  Rng stage_rng = rng.substream(static_cast<std::uint64_t>(stage));
  bool learning = stage < cfg.warmup_stages || cfg.interleave_learning;
  bool terminated = false;

  while (true) {
    const ScoredSample smp = draw_sample(net, imp, w, stage_rng);
    st.add(smp.score);
    ++total_samples;
    const bool in_estimation = stage >= cfg.warmup_stages;
    if (in_estimation) ++estimation_samples;
    if (smp.score > 0.0) any_positive_score = true;
    if (learning) tallies.deposit(net, smp.assignment, smp.score);

    if (st.i > cfg.threshold && st.b_tilde > 0.0) {
      st.mu_tilde = st.z_total.value() / static_cast<double>(st.i);
      st.sigma2_tilde =
          variance_estimate(st.z_total.value(), st.zeta.value(), static_cast<std::uint64_t>(st.i));
      bool degen = false;
      const MomentEstimates est{st.b_tilde, st.mu_tilde, st.sigma2_tilde};
      n_sigma = required_samples_fig1(params, est, &degen);
      MomentEstimates est_mu = est;
      if (cfg.mu_uses_analytic_bound && analytic_bound > 0.0) est_mu.b = analytic_bound;
      n_mu = required_samples_mu_stage(params, est_mu);
      n_tilde = cfg.algorithm == Algorithm::ais_mu ? n_mu : n_sigma;
      st.n_tilde = n_tilde;
      stage_degenerate = stage_degenerate || degen;
      if (degen && !degenerate_flagged) {
        rep.degenerate_flags.push_back("zero observed variance; substituted sigma2 = b*eps*mu");
        degenerate_flagged = true;
      }
    }

    if (st.i == cfg.updating_interval) {
      double eta_used = std::numeric_limits<double>::quiet_NaN();
      if (learning && st.b_tilde > 0.0) {
        const double lam = lambda_ratio(b_prev, st.b_tilde);
        eta_used = learning_rate(updates_done, lam);
        update_importance(net, imp, tallies, eta_used);
        ++updates_done;
        b_prev = st.b_tilde;
      }
      if (in_estimation) run.fold_completed(st.i, st.z_total.value(), n_tilde);
      rep.stages.push_back(StageDiagnostics{stage, !in_estimation, st.i, st.b_tilde, st.mu_tilde,
                                            st.sigma2_tilde, n_tilde, n_mu, n_sigma, eta_used,
                                            run.gamma, stage_degenerate});
      ++stage;
      st.reset();
      tallies.reset();
      stage_degenerate = false;
      learning = stage < cfg.warmup_stages || cfg.interleave_learning;
      stage_rng = rng.substream(static_cast<std::uint64_t>(stage));
    }

    if (stage >= cfg.warmup_stages) {
      const double gamma_clamped = std::min(run.gamma, 1.0);
      if (st.i >= cfg.threshold &&
          static_cast<double>(st.i) >= (1.0 - gamma_clamped) * n_tilde) {
        terminated = true;
        break;
      }
      if (estimation_samples >= cfg.sample_cap) break;
    }
  }

  if (terminated) {
    run.fold_final(st.i, st.z_total.value(), n_tilde);
    rep.stages.push_back(StageDiagnostics{stage, false, st.i, st.b_tilde, st.mu_tilde,
                                          st.sigma2_tilde, n_tilde, n_mu, n_sigma,
                                          std::numeric_limits<double>::quiet_NaN(), run.gamma,
                                          stage_degenerate});
    rep.terminated_by = TerminationReason::required_samples_met;
    rep.estimate = run.estimate();
  } else if (!any_positive_score) {
    rep.terminated_by = TerminationReason::zero_mass;
    rep.estimate = 0.0;
  } else {
    if (st.i > 0 && std::isfinite(n_tilde)) {
      run.fold_final(st.i, st.z_total.value(), n_tilde);
      rep.stages.push_back(StageDiagnostics{stage, stage < cfg.warmup_stages, st.i, st.b_tilde,
                                            st.mu_tilde, st.sigma2_tilde, n_tilde, n_mu, n_sigma,
                                            std::numeric_limits<double>::quiet_NaN(), run.gamma,
                                            stage_degenerate});
      if (st.i < cfg.threshold) rep.final_stage_below_threshold = true;
    }
    rep.terminated_by = TerminationReason::sample_cap;
    rep.estimate = run.estimate();
  }

  rep.total_samples = total_samples;
  rep.gamma = run.gamma;
  rep.n_tilde_final = n_tilde;
  if (learned_out) *learned_out = std::move(imp);
  return rep;
}

inline InitStrategy flipped_strategy(InitStrategy s) {
  return s == InitStrategy::cpt_clamp ? InitStrategy::uniform_evidence_parents
                                      : InitStrategy::cpt_clamp;
}

// Reruns estimate_prob with a fresh substream when it capped out with the
// requirement still prohibitive; from attempt restart_strategy_switch on,
// the initialization strategy is flipped and any seed function is dropped.
// Returns the first non-capped report, otherwise the capped report with the
// lowest final requirement.
inline EstimateReport run_with_restart(const BayesNet& net, const Assignment& w,
                                       const EngineConfig& cfg, const Rng& rng,
                                       const ImportanceFunction* seed = nullptr,
                                       ImportanceFunction* learned_out = nullptr) {
  EstimateReport best;
  ImportanceFunction best_learned;
  bool have_best = false;
  for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
    EngineConfig acfg = cfg;
    const ImportanceFunction* attempt_seed = seed;
    if (attempt >= cfg.restart_strategy_switch && attempt > 0) {
      acfg.init_strategy = flipped_strategy(cfg.init_strategy);
      attempt_seed = nullptr;
    }
    ImportanceFunction learned;
    EstimateReport rep = estimate_prob(net, w, acfg, rng.substream(static_cast<std::uint64_t>(attempt)),
                                       attempt_seed, &learned);
    rep.restarts = attempt;
    if (rep.terminated_by == TerminationReason::required_samples_met) {
      if (learned_out) *learned_out = std::move(learned);
      return rep;
    }
    if (!have_best || rep.n_tilde_final < best.n_tilde_final) {
      best = std::move(rep);
      best_learned = std::move(learned);
      have_best = true;
    }
  }
  best.restarts = cfg.max_restarts;
  if (learned_out) *learned_out = std::move(best_learned);
  return best;
}

struct QueryResult {
  int node = -1;
  int state = -1;
  double posterior = 0.0;
  RelativeErrorInterval interval;
  double confidence = 0.0;
  bool resolved_trivially = false; // query node was itself instantiated
  std::optional<EstimateReport> report;
};

struct InferenceResult {
  EstimateReport evidence_report;
  std::vector<QueryResult> queries;
};

// Estimates Pr(e) once, then Pr(a_j, e) per query (seeding each run with the
// learned evidence-run importance function when enabled), and returns the
// posterior ratios with their relative-error interval at confidence
// 1 - 2*delta. Queries on instantiated nodes resolve to 0 or 1 directly.
inline InferenceResult infer_posteriors(const BayesNet& net, const Assignment& evidence,
                                        const std::vector<std::pair<int, int>>& queries,
                                        const EngineConfig& cfg, const Rng& rng) {
  if (evidence.empty() && queries.empty())
    throw std::invalid_argument("need evidence or at least one query");
  InferenceResult out;
  ImportanceFunction learned;
  out.evidence_report = run_with_restart(net, evidence, cfg, rng.substream(0), nullptr, &learned);
  if (out.evidence_report.terminated_by == TerminationReason::zero_mass)
    throw ZeroMassEvidenceError("evidence probability indistinguishable from zero");
  const double phi_e = out.evidence_report.estimate;

  for (std::size_t j = 0; j < queries.size(); ++j) {
    QueryResult q;
    q.node = queries[j].first;
    q.state = queries[j].second;
    q.interval = posterior_error_bounds(cfg.eps_r);
    q.confidence = posterior_confidence(cfg.delta);
    if (evidence.has(q.node)) {
      q.posterior = evidence.state(q.node) == q.state ? 1.0 : 0.0;
      q.resolved_trivially = true;
    } else {
      Assignment w = evidence;
      w.set(q.node, q.state);
      q.report = run_with_restart(net, w, cfg, rng.substream(j + 1),
                                  cfg.reuse_learned_importance ? &learned : nullptr, nullptr);
      q.posterior = q.report->estimate / phi_e;
    }
    out.queries.push_back(std::move(q));
  }
  return out;
}

} // namespace aisbn
