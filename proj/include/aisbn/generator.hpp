#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aisbn/network.hpp"
#include "aisbn/oracle.hpp"
#include "aisbn/rng.hpp"

namespace aisbn {

// Bump when the generation procedure changes; benchmark reports echo it so
// suites stay reproducible across machines and versions.
inline constexpr int kGeneratorVersion = 1;

struct GeneratorParams {
  int nodes_min = 12;
  int nodes_max = 16;
  int states_min = 2;
  int states_max = 2;
  int max_parents = 3;
  double edge_density = 0.5;   // chance of taking each candidate parent
  double cpt_sharpness = 6.0;  // exponent skew; higher = more deterministic rows
};

// Seeded synthetic DAG: nodes in index order, parents drawn from earlier
// nodes, CPT rows from independent uniforms raised to cpt_sharpness and
// normalized. Fully determined by the rng stream.
inline BayesNet random_network(const GeneratorParams& gp, Rng& rng) {
  const int span = gp.nodes_max - gp.nodes_min + 1;
  const int n = gp.nodes_min + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(span)));
  std::vector<NodeSpec> nodes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    NodeSpec& nd = nodes[static_cast<std::size_t>(i)];
    nd.id = "N" + std::to_string(i);
    const int arity = gp.states_min +
                      static_cast<int>(rng.next_below(
                          static_cast<std::uint64_t>(gp.states_max - gp.states_min + 1)));
    for (int s = 0; s < arity; ++s) nd.states.push_back("s" + std::to_string(s));
  }
  for (int i = 0; i < n; ++i) {
    NodeSpec& nd = nodes[static_cast<std::size_t>(i)];
    for (int j = i - 1; j >= 0 && static_cast<int>(nd.parents.size()) < gp.max_parents; --j)
      if (rng.next_double() < gp.edge_density) nd.parents.push_back(j);
    std::sort(nd.parents.begin(), nd.parents.end());
    long long rows = 1;
    for (int p : nd.parents) rows *= static_cast<long long>(nodes[static_cast<std::size_t>(p)].states.size());
    const int cols = static_cast<int>(nd.states.size());
    nd.cpt = ProbTable(static_cast<int>(rows), cols);
    for (int r = 0; r < nd.cpt.n_rows; ++r) {
      double sum = 0.0;
      for (int c = 0; c < cols; ++c) {
        const double u = rng.next_double();
        const double v = std::pow(u + 1e-12, gp.cpt_sharpness);
        nd.cpt.at(r, c) = v;
        sum += v;
      }
      for (int c = 0; c < cols; ++c) nd.cpt.at(r, c) /= sum;
    }
  }
  return BayesNet(std::move(nodes));
}

struct EvidenceCase {
  Assignment evidence;
  double probability = 0.0; // oracle Pr(e)
};

// Draws random evidence over the candidate nodes until the oracle-exact
// Pr(e) lands inside [pr_min, pr_max]. nullopt when max_tries runs out.
inline std::optional<EvidenceCase> find_evidence_case(const BayesNet& net,
                                                      const std::vector<int>& candidates,
                                                      int n_evidence, double pr_min, double pr_max,
                                                      Rng& rng, int max_tries = 200) {
  if (n_evidence > static_cast<int>(candidates.size())) return std::nullopt;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    std::vector<int> pool = candidates;
    Assignment e(net.n_nodes());
    for (int k = 0; k < n_evidence; ++k) {
      const std::size_t pick = static_cast<std::size_t>(rng.next_below(pool.size()));
      const int node = pool[pick];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      e.set(node, static_cast<int>(rng.next_below(static_cast<std::uint64_t>(net.n_states(node)))));
    }
    const double p = exact_event_probability(net, e).probability;
    if (p >= pr_min && p <= pr_max) return EvidenceCase{std::move(e), p};
  }
  return std::nullopt;
}

// Near-deterministic chain A0 -> A1 -> ... with strongly persistent state;
// evidence on the tail's off state is rare. Used by the restart studies.
inline BayesNet hard_chain_network(int length, double persistence) {
  std::vector<NodeSpec> nodes(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    NodeSpec& nd = nodes[static_cast<std::size_t>(i)];
    nd.id = "A" + std::to_string(i);
    nd.states = {"off", "on"};
    if (i == 0) {
      nd.cpt = ProbTable(1, 2);
      nd.cpt.at(0, 0) = persistence;
      nd.cpt.at(0, 1) = 1.0 - persistence;
    } else {
      nd.parents = {i - 1};
      nd.cpt = ProbTable(2, 2);
      nd.cpt.at(0, 0) = persistence;
      nd.cpt.at(0, 1) = 1.0 - persistence;
      nd.cpt.at(1, 0) = 1.0 - persistence;
      nd.cpt.at(1, 1) = persistence;
    }
  }
  return BayesNet(std::move(nodes));
}

} // namespace aisbn
