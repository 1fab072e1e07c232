#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace aisbn {

inline constexpr double kRowSumTolerance = 1e-9;

// Dense row-major probability table: one row per parent configuration, one
// column per child state. Row indexing treats the first declared parent as
// the most significant digit (see docs/formats.md for the exact layout).
struct ProbTable {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> v;

  ProbTable() = default;
  ProbTable(int rows, int cols, double fill = 0.0)
      : n_rows(rows), n_cols(cols), v(static_cast<std::size_t>(rows) * cols, fill) {}

  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * n_cols + c]; }
  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * n_cols + c]; }
  const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * n_cols; }
  double* row(int r) { return v.data() + static_cast<std::size_t>(r) * n_cols; }
  bool empty() const { return v.empty(); }
  bool same_shape(const ProbTable& o) const { return n_rows == o.n_rows && n_cols == o.n_cols; }
};

struct NodeSpec {
  std::string id;
  std::vector<std::string> states;
  std::vector<int> parents; // indices into BayesNet::nodes(), declared order
  ProbTable cpt;            // n_rows = product of parent arities, n_cols = |states|
};

// Partial or total assignment of states to nodes. Backed by a dense array
// indexed by node, -1 meaning unassigned.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(int n_nodes) : state_(static_cast<std::size_t>(n_nodes), -1) {}

  int n_nodes() const { return static_cast<int>(state_.size()); }
  bool has(int node) const { return state_.at(static_cast<std::size_t>(node)) >= 0; }
  int state(int node) const { return state_.at(static_cast<std::size_t>(node)); }

  void set(int node, int state) {
    int& slot = state_.at(static_cast<std::size_t>(node));
    if (slot < 0 && state >= 0) ++assigned_;
    if (slot >= 0 && state < 0) --assigned_;
    slot = state;
  }
  void unset(int node) { set(node, -1); }

  int assigned_count() const { return assigned_; }
  bool total() const { return assigned_ == n_nodes(); }
  bool empty() const { return assigned_ == 0; }

  // Union of two assignments; nullopt when they disagree on a shared node.
  static std::optional<Assignment> merged(const Assignment& a, const Assignment& b) {
    Assignment out = a;
    for (int i = 0; i < b.n_nodes(); ++i) {
      if (!b.has(i)) continue;
      if (out.has(i) && out.state(i) != b.state(i)) return std::nullopt;
      out.set(i, b.state(i));
    }
    return out;
  }

  bool operator==(const Assignment& o) const = default;

private:
  std::vector<int> state_;
  int assigned_ = 0;
};

// Immutable after construction. Construction computes the topological order
// (empty when the parent graph is cyclic), parent strides for row indexing,
// and cached log-CPTs for the samplers. validate() reports all invariant
// violations instead of throwing.
class BayesNet {
public:
  BayesNet() = default;

  explicit BayesNet(std::vector<NodeSpec> nodes) : nodes_(std::move(nodes)) {
    for (int i = 0; i < n_nodes(); ++i) id_index_.emplace(nodes_[i].id, i);
    compute_strides();
    compute_topo_order();
    compute_log_cpts();
  }

  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const NodeSpec& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  int n_states(int i) const { return static_cast<int>(node(i).states.size()); }

  // Empty when the parent graph has a cycle.
  const std::vector<int>& topo_order() const { return topo_order_; }
  bool acyclic() const { return topo_order_.size() == nodes_.size(); }

  std::optional<int> index_of(const std::string& id) const {
    auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
  }

  // CPT row index for node i under an assignment covering all its parents.
  int row_index(int i, const Assignment& s) const {
    int row = 0;
    const auto& ps = nodes_[static_cast<std::size_t>(i)].parents;
    const auto& st = strides_[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < ps.size(); ++j) row += st[j] * s.state(ps[j]);
    return row;
  }

  // Parent states for a given CPT row, in declared parent order.
  std::vector<int> decode_row(int i, int row) const {
    const auto& ps = nodes_[static_cast<std::size_t>(i)].parents;
    const auto& st = strides_[static_cast<std::size_t>(i)];
    std::vector<int> out(ps.size());
    for (std::size_t j = 0; j < ps.size(); ++j) {
      out[j] = row / st[j];
      row -= out[j] * st[j];
    }
    return out;
  }

  double log_cpt(int i, int row, int state) const {
    return log_cpts_[static_cast<std::size_t>(i)].at(row, state);
  }
  const ProbTable& log_cpt_table(int i) const { return log_cpts_[static_cast<std::size_t>(i)]; }

  int expected_rows(int i) const {
    const auto& ps = nodes_[static_cast<std::size_t>(i)].parents;
    long long rows = 1;
    for (int p : ps) {
      if (p < 0 || p >= n_nodes()) return -1;
      rows *= n_states(p);
      if (rows > std::numeric_limits<int>::max()) return -1;
    }
    return static_cast<int>(rows);
  }

private:
  void compute_strides() {
    strides_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& ps = nodes_[i].parents;
      auto& st = strides_[i];
      st.assign(ps.size(), 1);
      for (int j = static_cast<int>(ps.size()) - 2; j >= 0; --j) {
        int pn = ps[static_cast<std::size_t>(j) + 1];
        int arity = (pn >= 0 && pn < n_nodes()) ? n_states(pn) : 1;
        st[static_cast<std::size_t>(j)] = st[static_cast<std::size_t>(j) + 1] * arity;
      }
    }
  }

  void compute_topo_order() {
    // Kahn's algorithm; leaves topo_order_ empty when a cycle remains.
    const int n = n_nodes();
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int p : nodes_[static_cast<std::size_t>(i)].parents) {
        if (p < 0 || p >= n) return; // unresolved parent; validate() reports it
        ++indeg[static_cast<std::size_t>(i)];
        children[static_cast<std::size_t>(p)].push_back(i);
      }
    }
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
      if (indeg[static_cast<std::size_t>(i)] == 0) queue.push_back(i);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      int u = queue[head];
      order.push_back(u);
      for (int c : children[static_cast<std::size_t>(u)])
        if (--indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
    }
    if (static_cast<int>(order.size()) == n) topo_order_ = std::move(order);
  }

  void compute_log_cpts() {
    log_cpts_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const ProbTable& t = nodes_[i].cpt;
      ProbTable lg(t.n_rows, t.n_cols);
      for (std::size_t k = 0; k < t.v.size(); ++k)
        lg.v[k] = t.v[k] > 0.0 ? std::log(t.v[k]) : -std::numeric_limits<double>::infinity();
      log_cpts_[i] = std::move(lg);
    }
  }

  std::vector<NodeSpec> nodes_;
  std::vector<std::vector<int>> strides_;
  std::vector<int> topo_order_;
  std::vector<ProbTable> log_cpts_;
  std::unordered_map<std::string, int> id_index_;
};

// Returns every invariant violation: unresolved parents, bad CPT dimensions,
// out-of-range entries, row sums off by more than kRowSumTolerance, cycles.
// An empty result means the network is valid.
inline std::vector<std::string> validate(const BayesNet& net) {
  std::vector<std::string> out;
  const int n = net.n_nodes();
  for (int i = 0; i < n; ++i) {
    const NodeSpec& nd = net.node(i);
    if (nd.states.empty()) {
      out.push_back("node '" + nd.id + "': no states declared");
      continue;
    }
    bool parents_ok = true;
    for (int p : nd.parents) {
      if (p < 0 || p >= n) {
        out.push_back("node '" + nd.id + "': unresolved parent reference");
        parents_ok = false;
      } else if (p == i) {
        out.push_back("node '" + nd.id + "': node is its own parent");
        parents_ok = false;
      }
    }
    if (!parents_ok) continue;
    const int rows = net.expected_rows(i);
    const int cols = static_cast<int>(nd.states.size());
    if (nd.cpt.n_rows != rows || nd.cpt.n_cols != cols ||
        nd.cpt.v.size() != static_cast<std::size_t>(rows) * cols) {
      out.push_back("node '" + nd.id + "': CPT shape mismatch, expected " +
                    std::to_string(rows) + "x" + std::to_string(cols));
      continue;
    }
    for (int r = 0; r < rows; ++r) {
      double sum = 0.0;
      bool range_ok = true;
      for (int c = 0; c < cols; ++c) {
        const double p = nd.cpt.at(r, c);
        if (!(p >= 0.0 && p <= 1.0)) range_ok = false;
        sum += p;
      }
      if (!range_ok)
        out.push_back("node '" + nd.id + "': CPT row " + std::to_string(r) +
                      " has entries outside [0,1]");
      else if (std::fabs(sum - 1.0) > kRowSumTolerance)
        out.push_back("node '" + nd.id + "': CPT row " + std::to_string(r) +
                      " row sum != 1 (got " + std::to_string(sum) + ")");
    }
  }
  if (!net.acyclic()) {
    bool unresolved = false;
    for (int i = 0; i < n; ++i)
      for (int p : net.node(i).parents)
        if (p < 0 || p >= n) unresolved = true;
    if (!unresolved) out.push_back("cycle in parent graph");
  }
  return out;
}

// Chain-rule joint probability of a total assignment.
inline double joint_probability(const BayesNet& net, const Assignment& s) {
  if (!s.total() || s.n_nodes() != net.n_nodes())
    throw std::invalid_argument("incomplete assignment");
  double p = 1.0;
  for (int i = 0; i < net.n_nodes(); ++i)
    p *= net.node(i).cpt.at(net.row_index(i, s), s.state(i));
  return p;
}

inline double log_joint_probability(const BayesNet& net, const Assignment& s) {
  if (!s.total() || s.n_nodes() != net.n_nodes())
    throw std::invalid_argument("incomplete assignment");
  double lp = 0.0;
  for (int i = 0; i < net.n_nodes(); ++i)
    lp += net.log_cpt(i, net.row_index(i, s), s.state(i));
  return lp;
}

// u_i: the largest CPT entry for the observed state of an instantiated node,
// maximized over parent configurations consistent with the other
// instantiations. Parents not instantiated range over all their states.
inline double max_consistent_cpt_value(const BayesNet& net, int node, const Assignment& evidence) {
  if (!evidence.has(node)) throw std::invalid_argument("node not in evidence");
  const NodeSpec& nd = net.node(node);
  const int child_state = evidence.state(node);
  double best = 0.0;
  for (int r = 0; r < nd.cpt.n_rows; ++r) {
    const std::vector<int> pstates = net.decode_row(node, r);
    bool consistent = true;
    for (std::size_t j = 0; j < nd.parents.size(); ++j) {
      const int p = nd.parents[j];
      if (evidence.has(p) && evidence.state(p) != pstates[j]) {
        consistent = false;
        break;
      }
    }
    if (consistent) best = std::max(best, nd.cpt.at(r, child_state));
  }
  return best;
}

// Checks node/state ranges of an assignment against a network.
inline std::optional<std::string> check_assignment(const BayesNet& net, const Assignment& a) {
  if (a.n_nodes() != net.n_nodes()) return "assignment sized for a different network";
  for (int i = 0; i < net.n_nodes(); ++i)
    if (a.has(i) && a.state(i) >= net.n_states(i))
      return "node '" + net.node(i).id + "': state index out of range";
  return std::nullopt;
}

} // namespace aisbn
