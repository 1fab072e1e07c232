#pragma once
#include <string>
#include <vector>

#include "aisbn/generator.hpp"
#include "aisbn/network.hpp"

namespace testsupport {

inline aisbn::NodeSpec node(std::string id, std::vector<std::string> states,
                            std::vector<int> parents, std::vector<double> cpt) {
  aisbn::NodeSpec n;
  n.id = std::move(id);
  n.states = std::move(states);
  n.parents = std::move(parents);
  int rows = static_cast<int>(cpt.size() / n.states.size());
  n.cpt = aisbn::ProbTable(rows, static_cast<int>(n.states.size()));
  n.cpt.v = std::move(cpt);
  return n;
}

// Single binary node, Pr(x1) = 0.3 on state "yes" index 1? Keep explicit:
// states {a0, a1}, Pr(a0)=0.7, Pr(a1)=0.3.
inline aisbn::BayesNet single_binary() {
  return aisbn::BayesNet({node("X", {"x0", "x1"}, {}, {0.7, 0.3})});
}

// Chain A -> B with Pr(a1)=0.5, Pr(b1|a0)=0.6, Pr(b1|a1)=0.2.
inline aisbn::BayesNet chain_ab() {
  return aisbn::BayesNet({
      node("A", {"a0", "a1"}, {}, {0.5, 0.5}),
      node("B", {"b0", "b1"}, {0}, {0.4, 0.6, 0.8, 0.2}),
  });
}

inline aisbn::BayesNet random_net(std::uint64_t seed, int nodes, int max_states = 2,
                                  double sharpness = 2.0, double density = 0.5) {
  aisbn::GeneratorParams gp;
  gp.nodes_min = gp.nodes_max = nodes;
  gp.states_min = 2;
  gp.states_max = max_states;
  gp.cpt_sharpness = sharpness;
  gp.edge_density = density;
  aisbn::Rng rng(seed);
  return aisbn::random_network(gp, rng);
}

} // namespace testsupport
