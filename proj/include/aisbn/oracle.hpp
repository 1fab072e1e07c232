#pragma once
#include <cstdint>
#include <stdexcept>

#include "aisbn/network.hpp"
#include "aisbn/numeric.hpp"

namespace aisbn {

struct OracleCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ImpossibleEvidenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultOracleCap = std::uint64_t{1} << 24;

struct ExactResult {
  double probability = 0.0;
  std::uint64_t terms_enumerated = 0;
};

namespace detail {
inline void enumerate_rec(const BayesNet& net, Assignment& s, std::size_t depth,
                          double partial, KahanSum& acc, std::uint64_t& terms) {
  if (partial == 0.0) return; // zero-probability subtree contributes nothing
  if (depth == net.topo_order().size()) {
    acc.add(partial);
    ++terms;
    return;
  }
  const int i = net.topo_order()[depth];
  const int row = net.row_index(i, s);
  if (s.has(i)) {
    enumerate_rec(net, s, depth + 1, partial * net.node(i).cpt.at(row, s.state(i)), acc, terms);
    return;
  }
  for (int c = 0; c < net.n_states(i); ++c) {
    s.set(i, c);
    enumerate_rec(net, s, depth + 1, partial * net.node(i).cpt.at(row, c), acc, terms);
  }
  s.unset(i);
}
} // namespace detail

// Exact Pr(W = w) by exhaustive enumeration over the free nodes, descending
// the topological order with running partial products and compensated
// summation at the leaves. Throws OracleCapError when the free state space
// exceeds state_cap.
inline ExactResult exact_event_probability(const BayesNet& net, const Assignment& w,
                                           std::uint64_t state_cap = kDefaultOracleCap) {
  if (!net.acyclic()) throw std::invalid_argument("network is not a DAG");
  if (auto err = check_assignment(net, w)) throw std::invalid_argument(*err);
  std::uint64_t space = 1;
  for (int i = 0; i < net.n_nodes(); ++i) {
    if (w.has(i)) continue;
    space *= static_cast<std::uint64_t>(net.n_states(i));
    if (space > state_cap) throw OracleCapError("network too large for exact oracle");
  }
  KahanSum acc;
  std::uint64_t terms = 0;
  Assignment s = w;
  detail::enumerate_rec(net, s, 0, 1.0, acc, terms);
  return ExactResult{acc.value(), terms};
}

// Exact Pr(a | e) = Pr(a, e) / Pr(e). Conflicting a and e yield 0; Pr(e) = 0
// throws ImpossibleEvidenceError.
inline double exact_posterior(const BayesNet& net, const Assignment& a, const Assignment& e,
                              std::uint64_t state_cap = kDefaultOracleCap) {
  const auto joint = Assignment::merged(a, e);
  const double pe = exact_event_probability(net, e, state_cap).probability;
  if (pe <= 0.0) throw ImpossibleEvidenceError("impossible evidence");
  if (!joint) return 0.0;
  return exact_event_probability(net, *joint, state_cap).probability / pe;
}

} // namespace aisbn
