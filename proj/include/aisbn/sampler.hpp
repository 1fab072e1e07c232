#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aisbn/network.hpp"
#include "aisbn/rng.hpp"

namespace aisbn {

inline constexpr double kDefaultPFloor = 1e-4;

enum class InitStrategy { cpt_clamp, uniform_evidence_parents, from_learned };

// Floors every entry with positive support in the reference CPT row at
// p_floor and renormalizes; entries with zero CPT support stay exactly zero.
// Renormalization can push a floored entry back below p_floor, so the floor
// set grows until it is stable (at most n_cols passes).
inline void floor_and_renormalize_row(double* row, const double* cpt_row, int n, double p_floor) {
  int support = 0;
  for (int c = 0; c < n; ++c) {
    if (cpt_row[c] > 0.0)
      ++support;
    else
      row[c] = 0.0;
  }
  if (support == 0) return;
  if (p_floor * support >= 1.0) {
    // Floor unsatisfiable; fall back to uniform over the support.
    for (int c = 0; c < n; ++c) row[c] = cpt_row[c] > 0.0 ? 1.0 / support : 0.0;
    return;
  }
  std::vector<bool> pinned(static_cast<std::size_t>(n), false);
  for (int pass = 0; pass < n; ++pass) {
    int n_pinned = 0;
    double free_mass = 0.0;
    bool grew = false;
    for (int c = 0; c < n; ++c) {
      if (cpt_row[c] <= 0.0) continue;
      if (!pinned[static_cast<std::size_t>(c)] && row[c] <= p_floor) {
        pinned[static_cast<std::size_t>(c)] = true;
        grew = true;
      }
      if (pinned[static_cast<std::size_t>(c)])
        ++n_pinned;
      else
        free_mass += row[c];
    }
    const double target = 1.0 - p_floor * n_pinned;
    if (free_mass > 0.0) {
      const double scale = target / free_mass;
      for (int c = 0; c < n; ++c)
        if (cpt_row[c] > 0.0 && !pinned[static_cast<std::size_t>(c)]) row[c] *= scale;
    }
    for (int c = 0; c < n; ++c)
      if (pinned[static_cast<std::size_t>(c)]) row[c] = p_floor;
    if (!grew && pass > 0) break;
    // Re-check: scaling down may have pushed new entries under the floor.
    bool any_below = false;
    for (int c = 0; c < n; ++c)
      if (cpt_row[c] > 0.0 && !pinned[static_cast<std::size_t>(c)] && row[c] < p_floor)
        any_below = true;
    if (!any_below) break;
  }
}

// The learnable sampling distribution: one ICPT per free node, shaped like
// that node's CPT. Instantiated nodes carry no table. ICPT entries dominate
// the CPT (>= p_floor wherever the CPT is positive), so the score
// denominator is always positive on reachable assignments.
struct ImportanceFunction {
  std::vector<ProbTable> icpts;     // empty table for clamped nodes
  std::vector<ProbTable> log_icpts; // cached logs, same occupancy
  std::vector<std::uint8_t> clamped;
  int stage_index = 0;
  double p_floor = kDefaultPFloor;

  bool is_clamped(int i) const { return clamped[static_cast<std::size_t>(i)] != 0; }

  void rebuild_log(int i) {
    const ProbTable& t = icpts[static_cast<std::size_t>(i)];
    ProbTable& lg = log_icpts[static_cast<std::size_t>(i)];
    lg = ProbTable(t.n_rows, t.n_cols);
    for (std::size_t k = 0; k < t.v.size(); ++k)
      lg.v[k] = t.v[k] > 0.0 ? std::log(t.v[k]) : -std::numeric_limits<double>::infinity();
  }

  bool shape_matches(const BayesNet& net) const {
    if (static_cast<int>(icpts.size()) != net.n_nodes()) return false;
    for (int i = 0; i < net.n_nodes(); ++i)
      if (!is_clamped(i) && !icpts[static_cast<std::size_t>(i)].same_shape(net.node(i).cpt))
        return false;
    return true;
  }
};

// Builds the stage-0 importance function for estimating Pr(W = w).
//   cpt_clamp: ICPTs copy the CPTs of free nodes.
//   uniform_evidence_parents: as cpt_clamp, but every node with an
//     instantiated child gets uniform rows over its CPT support.
//   from_learned: ICPTs of still-free nodes copy a previously learned
//     function (learned while estimating Pr(E = e), reused for Pr(a_j, e)).
// All rows are floored and renormalized afterwards.
inline ImportanceFunction initial_importance(const BayesNet& net, const Assignment& w,
                                             InitStrategy strategy,
                                             double p_floor = kDefaultPFloor,
                                             const ImportanceFunction* learned = nullptr) {
  if (auto err = check_assignment(net, w)) throw std::invalid_argument(*err);
  if (strategy == InitStrategy::from_learned) {
    if (learned == nullptr || !learned->shape_matches(net))
      throw std::invalid_argument("from-learned importance function does not match the network");
  }
  const int n = net.n_nodes();
  ImportanceFunction imp;
  imp.p_floor = p_floor;
  imp.icpts.resize(static_cast<std::size_t>(n));
  imp.log_icpts.resize(static_cast<std::size_t>(n));
  imp.clamped.assign(static_cast<std::size_t>(n), 0);

  std::vector<std::uint8_t> evidence_parent(static_cast<std::size_t>(n), 0);
  if (strategy == InitStrategy::uniform_evidence_parents) {
    for (int i = 0; i < n; ++i)
      if (w.has(i))
        for (int p : net.node(i).parents) evidence_parent[static_cast<std::size_t>(p)] = 1;
  }

  for (int i = 0; i < n; ++i) {
    if (w.has(i)) {
      imp.clamped[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    const ProbTable& cpt = net.node(i).cpt;
    ProbTable t = cpt;
    if (strategy == InitStrategy::uniform_evidence_parents && evidence_parent[static_cast<std::size_t>(i)]) {
      for (int r = 0; r < t.n_rows; ++r) {
        int support = 0;
        for (int c = 0; c < t.n_cols; ++c)
          if (cpt.at(r, c) > 0.0) ++support;
        for (int c = 0; c < t.n_cols; ++c)
          t.at(r, c) = (support > 0 && cpt.at(r, c) > 0.0) ? 1.0 / support : 0.0;
      }
    } else if (strategy == InitStrategy::from_learned && !learned->is_clamped(i)) {
      t = learned->icpts[static_cast<std::size_t>(i)];
    }
    for (int r = 0; r < t.n_rows; ++r)
      floor_and_renormalize_row(t.row(r), cpt.row(r), t.n_cols, p_floor);
    imp.icpts[static_cast<std::size_t>(i)] = std::move(t);
    imp.rebuild_log(i);
  }
  return imp;
}

// A total assignment together with its score Z = Pr(s, W=w) / Pr'(s) and the
// probability the sampler assigned to it. Both are computed in log space and
// exponentiated once; joints in the target regime underflow naive products.
struct ScoredSample {
  Assignment assignment;
  double score = 0.0;
  double importance_prob = 0.0;
};

// Scores a fixed total assignment consistent with w (used by the samplers
// and by enumeration-based checks).
inline ScoredSample score_assignment(const BayesNet& net, const ImportanceFunction& imp,
                                     const Assignment& w, const Assignment& total) {
  double log_num = 0.0;
  double log_den = 0.0;
  for (int i = 0; i < net.n_nodes(); ++i) {
    const int row = net.row_index(i, total);
    const int st = total.state(i);
    log_num += net.log_cpt(i, row, st);
    if (!imp.is_clamped(i)) {
      log_den += imp.log_icpts[static_cast<std::size_t>(i)].at(row, st);
    } else if (w.state(i) != st) {
      throw std::invalid_argument("assignment disagrees with instantiated nodes");
    }
  }
  ScoredSample out;
  out.assignment = total;
  out.importance_prob = std::exp(log_den);
  out.score = std::exp(log_num - log_den);
  return out;
}

// Draws one forward sample: free nodes in topological order from their ICPT
// rows, instantiated nodes clamped to w. Returns the sample with its score.
inline ScoredSample draw_sample(const BayesNet& net, const ImportanceFunction& imp,
                                const Assignment& w, Rng& rng) {
  Assignment s = w;
  double log_num = 0.0;
  double log_den = 0.0;
  for (int i : net.topo_order()) {
    const int row = net.row_index(i, s);
    if (imp.is_clamped(i)) {
      log_num += net.log_cpt(i, row, s.state(i));
      continue;
    }
    const ProbTable& t = imp.icpts[static_cast<std::size_t>(i)];
    const double* p = t.row(row);
    const double u = rng.next_double();
    int pick = -1;
    double cum = 0.0;
    for (int c = 0; c < t.n_cols; ++c) {
      if (p[c] <= 0.0) continue;
      cum += p[c];
      pick = c;
      if (u < cum) break;
    }
    // cum can fall a hair short of 1; the last positive state absorbs it.
    s.set(i, pick);
    log_num += net.log_cpt(i, row, pick);
    log_den += imp.log_icpts[static_cast<std::size_t>(i)].at(row, pick);
  }
  ScoredSample out;
  out.assignment = std::move(s);
  out.importance_prob = std::exp(log_den);
  out.score = std::exp(log_num - log_den);
  return out;
}

// Analytic score bound for the likelihood-weighting importance function:
// Z <= prod over instantiated nodes of u_i (and <= 1).
inline double lw_bound(const BayesNet& net, const Assignment& w) {
  double bound = 1.0;
  for (int i = 0; i < net.n_nodes(); ++i)
    if (w.has(i)) bound *= max_consistent_cpt_value(net, i, w);
  return bound;
}

} // namespace aisbn
