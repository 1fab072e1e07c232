#pragma once
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aisbn/network.hpp"
#include "aisbn/sampler.hpp"

namespace aisbn {

// Per-stage score sums indexed like the ICPTs: for each free node, each
// parent configuration and child state accumulates the scores of samples
// that landed there. Row totals are kept alongside. Merging tallies is
// associative, so deposits can be sharded and combined.
struct ScoreTallies {
  std::vector<ProbTable> cells;                 // empty for clamped nodes
  std::vector<std::vector<double>> row_totals;  // per node, per row

  static ScoreTallies shaped_like(const ImportanceFunction& imp) {
    ScoreTallies t;
    t.cells.resize(imp.icpts.size());
    t.row_totals.resize(imp.icpts.size());
    for (std::size_t i = 0; i < imp.icpts.size(); ++i) {
      if (imp.clamped[i]) continue;
      const ProbTable& shape = imp.icpts[i];
      t.cells[i] = ProbTable(shape.n_rows, shape.n_cols, 0.0);
      t.row_totals[i].assign(static_cast<std::size_t>(shape.n_rows), 0.0);
    }
    return t;
  }

  void reset() {
    for (auto& c : cells) std::fill(c.v.begin(), c.v.end(), 0.0);
    for (auto& r : row_totals) std::fill(r.begin(), r.end(), 0.0);
  }

  // Adds one scored sample: score z lands in (node, observed parent config,
  // observed state) for every free node.
  void deposit(const BayesNet& net, const Assignment& sample, double z) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].empty() && row_totals[i].empty()) continue;
      const int row = net.row_index(static_cast<int>(i), sample);
      cells[i].at(row, sample.state(static_cast<int>(i))) += z;
      row_totals[i][static_cast<std::size_t>(row)] += z;
    }
  }

  void merge(const ScoreTallies& o) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (std::size_t k = 0; k < cells[i].v.size(); ++k) cells[i].v[k] += o.cells[i].v[k];
      for (std::size_t r = 0; r < row_totals[i].size(); ++r) row_totals[i][r] += o.row_totals[i][r];
    }
  }
};

// Folds a batch of scored samples into fresh tallies.
template <typename SampleRange>
inline ScoreTallies tally(const BayesNet& net, const ImportanceFunction& imp,
                          const SampleRange& samples) {
  ScoreTallies t = ScoreTallies::shaped_like(imp);
  for (const ScoredSample& s : samples) t.deposit(net, s.assignment, s.score);
  return t;
}

// Score-weighted empirical conditional for one (node, parent config) row, or
// nullopt when the row saw no score mass. Callers keep the current ICPT row
// in that case; rarely visited regions retain what was already learned.
inline std::optional<std::vector<double>> estimated_conditional(const ScoreTallies& t, int node,
                                                                int row) {
  const ProbTable& c = t.cells.at(static_cast<std::size_t>(node));
  if (c.empty()) return std::nullopt;
  const double total = t.row_totals[static_cast<std::size_t>(node)].at(static_cast<std::size_t>(row));
  if (!(total > 0.0)) return std::nullopt;
  std::vector<double> out(static_cast<std::size_t>(c.n_cols));
  for (int s = 0; s < c.n_cols; ++s) out[static_cast<std::size_t>(s)] = c.at(row, s) / total;
  return out;
}

// Ratio of required samples between neighboring stages, lambda = b_prev/b_curr.
// The first stage has no b_prev and returns +inf, which routes the learning
// rate to its 0.5 branch.
inline double lambda_ratio(std::optional<double> b_prev, double b_curr) {
  if (!(b_curr > 0.0)) throw std::invalid_argument("current stage bound must be positive");
  if (!b_prev) return std::numeric_limits<double>::infinity();
  return *b_prev / b_curr;
}

// Piecewise learning rate:
//   0.5                      k < 3 or lambda > 5
//   (1/4) log5(5*lambda)     k >= 3 and 1/2 <= lambda <= 5
//   0.1423                   k >= 3 and lambda < 1/2
// The first three updating stages use 0.5 so learning can escape a bad
// initialization; the log branch damps oscillation for large lambda.
// Continuous at both breakpoints to within 1e-4.
inline double learning_rate(int k, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (k < 3 || lambda > 5.0) return 0.5;
  if (lambda >= 0.5) return 0.25 * (1.0 + std::log(lambda) / std::log(5.0));
  return 0.1423;
}

// Pr^(k+1) = Pr^(k) + eta * (Pr' - Pr^(k)), applied row-wise where an
// estimate exists, then floored against the original CPT and renormalized.
inline void update_importance(const BayesNet& net, ImportanceFunction& imp,
                              const ScoreTallies& tallies, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta out of [0,1]");
  for (int i = 0; i < net.n_nodes(); ++i) {
    if (imp.is_clamped(i)) continue;
    ProbTable& t = imp.icpts[static_cast<std::size_t>(i)];
    const ProbTable& cpt = net.node(i).cpt;
    bool changed = false;
    for (int r = 0; r < t.n_rows; ++r) {
      const auto est = estimated_conditional(tallies, i, r);
      if (!est) continue;
      double* row = t.row(r);
      for (int c = 0; c < t.n_cols; ++c)
        row[c] = (1.0 - eta) * row[c] + eta * (*est)[static_cast<std::size_t>(c)];
      floor_and_renormalize_row(row, cpt.row(r), t.n_cols, imp.p_floor);
      changed = true;
    }
    if (changed) imp.rebuild_log(i);
  }
  ++imp.stage_index;
}

} // namespace aisbn
