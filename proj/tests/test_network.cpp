#include <catch2/catch_amalgamated.hpp>

#include "aisbn/network.hpp"
#include "aisbn/oracle.hpp"
#include "support/enumeration.hpp"
#include "support/fixtures.hpp"

using namespace aisbn;
using testsupport::node;

TEST_CASE("validate accepts a well-formed two-node chain") {
  CHECK(validate(testsupport::chain_ab()).empty());
}

TEST_CASE("validate reports a row sum off by more than the tolerance") {
  BayesNet net({node("X", {"x0", "x1"}, {}, {0.6, 0.3})}); // sums to 0.9
  const auto v = validate(net);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("row sum != 1") != std::string::npos);
}

TEST_CASE("validate reports a cycle") {
  // A -> B and B -> A.
  BayesNet net({
      node("A", {"a0", "a1"}, {1}, {0.5, 0.5, 0.5, 0.5}),
      node("B", {"b0", "b1"}, {0}, {0.5, 0.5, 0.5, 0.5}),
  });
  const auto v = validate(net);
  REQUIRE_FALSE(v.empty());
  bool has_cycle = false;
  for (const auto& s : v)
    if (s.find("cycle") != std::string::npos) has_cycle = true;
  CHECK(has_cycle);
  CHECK_FALSE(net.acyclic());
}

TEST_CASE("validate reports CPT arity mismatch naming the node") {
  BayesNet net({
      node("A", {"a0", "a1"}, {}, {0.5, 0.5}),
      node("B", {"b0", "b1"}, {0}, {0.4, 0.6}), // needs 2 rows
  });
  const auto v = validate(net);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("'B'") != std::string::npos);
  CHECK(v[0].find("shape") != std::string::npos);
}

TEST_CASE("joint probability of a single binary node") {
  const BayesNet net = testsupport::single_binary();
  Assignment s(1);
  s.set(0, 1);
  CHECK(joint_probability(net, s) == 0.3);
}

TEST_CASE("joint probability multiplies chain factors") {
  const BayesNet net = testsupport::chain_ab();
  Assignment s(2);
  s.set(0, 1);
  s.set(1, 1);
  CHECK(joint_probability(net, s) == Catch::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("joint probability rejects partial assignments") {
  const BayesNet net = testsupport::chain_ab();
  Assignment s(2);
  s.set(0, 1);
  CHECK_THROWS_AS(joint_probability(net, s), std::invalid_argument);
}

TEST_CASE("joint probabilities over all assignments sum to 1") {
  const BayesNet net = testsupport::random_net(7, 5, 3);
  REQUIRE(validate(net).empty());
  long double sum = 0.0L;
  testsupport::for_each_completion(net, Assignment(net.n_nodes()),
                                   [&](const Assignment& s) { sum += joint_probability(net, s); });
  CHECK(std::fabs(static_cast<double>(sum) - 1.0) < 1e-12);
}

TEST_CASE("topological order places parents before children") {
  const BayesNet net = testsupport::random_net(11, 12);
  REQUIRE(net.acyclic());
  std::vector<int> pos(static_cast<std::size_t>(net.n_nodes()));
  for (int k = 0; k < net.n_nodes(); ++k) pos[static_cast<std::size_t>(net.topo_order()[k])] = k;
  for (int i = 0; i < net.n_nodes(); ++i)
    for (int p : net.node(i).parents) CHECK(pos[static_cast<std::size_t>(p)] < pos[static_cast<std::size_t>(i)]);
}

TEST_CASE("max consistent CPT value is the column max without parent evidence") {
  // E has one ternary parent P; CPT column for e1 is (0.1, 0.7, 0.4).
  BayesNet net({
      node("P", {"p0", "p1", "p2"}, {}, {0.2, 0.3, 0.5}),
      node("E", {"e0", "e1"}, {0}, {0.9, 0.1, 0.3, 0.7, 0.6, 0.4}),
  });
  REQUIRE(validate(net).empty());
  Assignment ev(2);
  ev.set(1, 1);
  CHECK(max_consistent_cpt_value(net, 1, ev) == 0.7);
}

TEST_CASE("max consistent CPT value restricts to the observed parent row") {
  BayesNet net({
      node("P", {"p0", "p1", "p2"}, {}, {0.2, 0.3, 0.5}),
      node("E", {"e0", "e1"}, {0}, {0.9, 0.1, 0.3, 0.7, 0.6, 0.4}),
  });
  Assignment ev(2);
  ev.set(1, 1);
  ev.set(0, 2); // pins row p2: entry for e1 is 0.4
  CHECK(max_consistent_cpt_value(net, 1, ev) == 0.4);
  CHECK_THROWS_AS(max_consistent_cpt_value(net, 0, Assignment(2)), std::invalid_argument);
}

TEST_CASE("max consistent CPT value bounds within the column") {
  const BayesNet net = testsupport::random_net(23, 8);
  Assignment ev(net.n_nodes());
  ev.set(net.topo_order().back(), 0);
  const double u = max_consistent_cpt_value(net, net.topo_order().back(), ev);
  CHECK(u <= 1.0);
  const NodeSpec& nd = net.node(net.topo_order().back());
  double min_pos = 1.0;
  for (int r = 0; r < nd.cpt.n_rows; ++r)
    if (nd.cpt.at(r, 0) > 0.0) min_pos = std::min(min_pos, nd.cpt.at(r, 0));
  CHECK(u >= min_pos);
}
