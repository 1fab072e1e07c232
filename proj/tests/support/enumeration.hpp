#pragma once
// Flat brute-force enumeration used as the independent route in tests.
// Deliberately written odometer-style with direct probability products, not
// sharing the library's recursive/log-space code paths.

#include <functional>
#include <vector>

#include "aisbn/network.hpp"

namespace testsupport {

// Calls fn(total) for every completion of `partial`.
inline void for_each_completion(const aisbn::BayesNet& net, const aisbn::Assignment& partial,
                                const std::function<void(const aisbn::Assignment&)>& fn) {
  std::vector<int> free_nodes;
  for (int i = 0; i < net.n_nodes(); ++i)
    if (!partial.has(i)) free_nodes.push_back(i);
  aisbn::Assignment s = partial;
  for (int i : free_nodes) s.set(i, 0);
  while (true) {
    fn(s);
    int d = static_cast<int>(free_nodes.size()) - 1;
    for (; d >= 0; --d) {
      const int node = free_nodes[static_cast<std::size_t>(d)];
      if (s.state(node) + 1 < net.n_states(node)) {
        s.set(node, s.state(node) + 1);
        break;
      }
      s.set(node, 0);
    }
    if (d < 0) break;
  }
}

// Direct product of CPT entries, no logs.
inline double direct_joint(const aisbn::BayesNet& net, const aisbn::Assignment& s) {
  double p = 1.0;
  for (int i = 0; i < net.n_nodes(); ++i)
    p *= net.node(i).cpt.at(net.row_index(i, s), s.state(i));
  return p;
}

// Naive-sum brute force Pr(W = w); independent of the oracle module.
inline double brute_force_probability(const aisbn::BayesNet& net, const aisbn::Assignment& w) {
  long double sum = 0.0L;
  for_each_completion(net, w, [&](const aisbn::Assignment& s) { sum += direct_joint(net, s); });
  return static_cast<double>(sum);
}

} // namespace testsupport
