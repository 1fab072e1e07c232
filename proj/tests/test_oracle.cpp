#include <catch2/catch_amalgamated.hpp>

#include "aisbn/oracle.hpp"
#include "support/enumeration.hpp"
#include "support/fixtures.hpp"

using namespace aisbn;

TEST_CASE("exact probability of the empty event is 1") {
  const BayesNet net = testsupport::random_net(3, 6);
  const auto r = exact_event_probability(net, Assignment(net.n_nodes()));
  CHECK(r.probability == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("exact probability of a total assignment equals the joint") {
  const BayesNet net = testsupport::random_net(4, 6);
  Assignment s(net.n_nodes());
  for (int i = 0; i < net.n_nodes(); ++i) s.set(i, 1 % net.n_states(i));
  const auto r = exact_event_probability(net, s);
  CHECK(r.probability == joint_probability(net, s));
  CHECK(r.terms_enumerated == 1);
}

TEST_CASE("exact probability sums the chain example") {
  const BayesNet net = testsupport::chain_ab();
  Assignment w(2);
  w.set(1, 1); // B = b1
  CHECK(exact_event_probability(net, w).probability == Catch::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("oracle cap rejects oversized state spaces") {
  const BayesNet net = testsupport::random_net(5, 10);
  CHECK_THROWS_AS(exact_event_probability(net, Assignment(net.n_nodes()), 512),
                  OracleCapError);
}

TEST_CASE("posterior of the evidence itself is 1, of a conflict 0") {
  const BayesNet net = testsupport::chain_ab();
  Assignment e(2);
  e.set(0, 1);
  CHECK(exact_posterior(net, e, e) == 1.0);
  Assignment a(2);
  a.set(0, 0);
  CHECK(exact_posterior(net, a, e) == 0.0);
}

TEST_CASE("posterior errors on impossible evidence") {
  BayesNet net({testsupport::node("X", {"x0", "x1"}, {}, {1.0, 0.0})});
  Assignment e(1);
  e.set(0, 1); // probability 0 state
  Assignment a(1);
  a.set(0, 0);
  CHECK_THROWS_AS(exact_posterior(net, a, e), ImpossibleEvidenceError);
}

TEST_CASE("posterior matches an independently coded enumerator on a random net") {
  const BayesNet net = testsupport::random_net(17, 8, 3);
  Assignment e(net.n_nodes());
  e.set(net.topo_order().back(), 0);
  e.set(net.topo_order().front(), 0);
  Assignment a(net.n_nodes());
  const int qnode = net.topo_order()[net.n_nodes() / 2];
  a.set(qnode, 1);

  const double pe = testsupport::brute_force_probability(net, e);
  const auto merged = Assignment::merged(a, e);
  REQUIRE(merged);
  const double pae = testsupport::brute_force_probability(net, *merged);
  REQUIRE(pe > 0.0);
  CHECK(exact_posterior(net, a, e) == Catch::Approx(pae / pe).epsilon(1e-12));
}

TEST_CASE("posteriors over a node's states partition to 1") {
  const BayesNet net = testsupport::random_net(29, 9, 3);
  Assignment e(net.n_nodes());
  e.set(net.topo_order().back(), 0);
  const int qnode = net.topo_order()[1];
  double sum = 0.0;
  for (int s = 0; s < net.n_states(qnode); ++s) {
    Assignment a(net.n_nodes());
    a.set(qnode, s);
    sum += exact_posterior(net, a, e);
  }
  CHECK(std::fabs(sum - 1.0) < 1e-10);
}

TEST_CASE("event probability is invariant under node reordering in the file") {
  const BayesNet net = testsupport::chain_ab();
  // Same network with B declared first (parent index adjusted).
  const BayesNet swapped({
      testsupport::node("B", {"b0", "b1"}, {1}, {0.4, 0.6, 0.8, 0.2}),
      testsupport::node("A", {"a0", "a1"}, {}, {0.5, 0.5}),
  });
  REQUIRE(validate(swapped).empty());
  Assignment w1(2), w2(2);
  w1.set(1, 1); // B=b1 in original
  w2.set(0, 1); // B=b1 in swapped
  CHECK(exact_event_probability(net, w1).probability ==
        exact_event_probability(swapped, w2).probability);
}
