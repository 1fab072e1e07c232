#pragma once
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aisbn/engine.hpp"
#include "aisbn/network.hpp"

namespace aisbn {

// All documents share one line-oriented shape: '#' starts a comment, blank
// lines are ignored, the first token of a line is a directive. Parsers
// report every problem with its line number instead of bailing at the first.

struct ParseIssue {
  int line = 0; // 0 = document-level
  std::string message;
};

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<ParseIssue> errors;
  bool ok() const { return value.has_value() && errors.empty(); }
};

struct TextLine {
  int number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<TextLine> tokenize_document(std::string_view text) {
  std::vector<TextLine> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    TextLine tl{line_no, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (i > start) tl.tokens.emplace_back(line.substr(start, i - start));
    }
    if (!tl.tokens.empty()) out.push_back(std::move(tl));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(const std::string& s) {
  std::int64_t v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) return std::nullopt;
  return v;
}

inline std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  return std::nullopt;
}

// 17 significant digits: enough to round-trip any double exactly, and a
// fixed-width conversion so equal values always print identically.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Network documents
//
//   aisbn-network v1
//   node <id> <state>...
//   parents <id> [<parent-id>...]
//   cpt <id> <p>...        row-major: first declared parent most significant,
//                          each row lists the child states in declared order
// ---------------------------------------------------------------------------

inline constexpr const char* kNetworkHeader = "aisbn-network";

inline ParseResult<BayesNet> parse_network(std::string_view text) {
  ParseResult<BayesNet> res;
  const auto lines = tokenize_document(text);
  if (lines.empty() || lines[0].tokens[0] != kNetworkHeader || lines[0].tokens.size() != 2 ||
      lines[0].tokens[1] != "v1") {
    res.errors.push_back({lines.empty() ? 0 : lines[0].number,
                          std::string("expected header '") + kNetworkHeader + " v1'"});
    return res;
  }

  struct Raw {
    std::string id;
    std::vector<std::string> states;
    std::vector<std::string> parents;
    bool have_parents = false;
    std::vector<double> cpt;
    bool have_cpt = false;
    int decl_line = 0;
  };
  std::vector<Raw> raw;
  std::unordered_map<std::string, int> index;

  auto find = [&](const std::string& id) -> Raw* {
    auto it = index.find(id);
    return it == index.end() ? nullptr : &raw[static_cast<std::size_t>(it->second)];
  };

  // Pass 1: collect declarations so parents may reference later nodes.
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const TextLine& tl = lines[li];
    if (tl.tokens[0] != "node") continue;
    if (tl.tokens.size() < 3) {
      res.errors.push_back({tl.number, "node needs an id and at least one state"});
      continue;
    }
    const std::string& id = tl.tokens[1];
    if (find(id)) {
      res.errors.push_back({tl.number, "duplicate node '" + id + "'"});
      continue;
    }
    Raw r;
    r.id = id;
    r.states.assign(tl.tokens.begin() + 2, tl.tokens.end());
    r.decl_line = tl.number;
    index.emplace(id, static_cast<int>(raw.size()));
    raw.push_back(std::move(r));
  }

  // Pass 2: parents and cpt directives.
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const TextLine& tl = lines[li];
    const std::string& d = tl.tokens[0];
    if (d == "node") continue;
    if (d != "parents" && d != "cpt") {
      res.errors.push_back({tl.number, "unknown directive '" + d + "'"});
      continue;
    }
    if (tl.tokens.size() < 2) {
      res.errors.push_back({tl.number, d + " needs a node id"});
      continue;
    }
    Raw* r = find(tl.tokens[1]);
    if (!r) {
      res.errors.push_back({tl.number, "unknown node '" + tl.tokens[1] + "'"});
      continue;
    }
    if (d == "parents") {
      if (r->have_parents) {
        res.errors.push_back({tl.number, "duplicate parents for '" + r->id + "'"});
        continue;
      }
      r->have_parents = true;
      for (std::size_t k = 2; k < tl.tokens.size(); ++k) {
        if (!find(tl.tokens[k]))
          res.errors.push_back({tl.number, "unknown node '" + tl.tokens[k] + "' in parents of '" +
                                               r->id + "'"});
        else
          r->parents.push_back(tl.tokens[k]);
      }
    } else {
      if (r->have_cpt) {
        res.errors.push_back({tl.number, "duplicate cpt for '" + r->id + "'"});
        continue;
      }
      r->have_cpt = true;
      for (std::size_t k = 2; k < tl.tokens.size(); ++k) {
        const auto v = parse_double(tl.tokens[k]);
        if (!v) {
          res.errors.push_back({tl.number, "bad probability '" + tl.tokens[k] + "' in cpt of '" +
                                               r->id + "'"});
          r->cpt.push_back(0.0);
        } else {
          r->cpt.push_back(*v);
        }
      }
    }
  }
  if (raw.empty()) res.errors.push_back({0, "no nodes declared"});
  if (!res.errors.empty()) return res;

  std::vector<NodeSpec> nodes;
  nodes.reserve(raw.size());
  for (const Raw& r : raw) {
    NodeSpec n;
    n.id = r.id;
    n.states = r.states;
    for (const std::string& p : r.parents) n.parents.push_back(index.at(p));
    nodes.push_back(std::move(n));
  }
  // CPT shapes need resolved parents, hence a second fill pass.
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Raw& r = raw[i];
    long long rows = 1;
    for (int p : nodes[i].parents) rows *= static_cast<long long>(raw[static_cast<std::size_t>(p)].states.size());
    const long long cols = static_cast<long long>(r.states.size());
    if (!r.have_cpt) {
      res.errors.push_back({r.decl_line, "node '" + r.id + "': missing cpt"});
      continue;
    }
    if (static_cast<long long>(r.cpt.size()) != rows * cols) {
      res.errors.push_back({r.decl_line, "node '" + r.id + "': cpt has " +
                                             std::to_string(r.cpt.size()) + " entries, expected " +
                                             std::to_string(rows * cols)});
      continue;
    }
    nodes[i].cpt = ProbTable(static_cast<int>(rows), static_cast<int>(cols));
    nodes[i].cpt.v = r.cpt;
  }
  if (!res.errors.empty()) return res;

  BayesNet net(std::move(nodes));
  for (const std::string& v : validate(net)) {
    int line = 0;
    for (const Raw& r : raw)
      if (v.find("'" + r.id + "'") != std::string::npos) {
        line = r.decl_line;
        break;
      }
    res.errors.push_back({line, v});
  }
  if (!res.errors.empty()) return res;
  res.value = std::move(net);
  return res;
}

inline std::string serialize_network(const BayesNet& net) {
  std::ostringstream os;
  os << kNetworkHeader << " v1\n";
  for (const NodeSpec& n : net.nodes()) {
    os << "node " << n.id;
    for (const std::string& s : n.states) os << ' ' << s;
    os << '\n';
    os << "parents " << n.id;
    for (int p : n.parents) os << ' ' << net.node(p).id;
    os << '\n';
    os << "cpt " << n.id;
    for (double v : n.cpt.v) os << ' ' << format_double(v);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Run configuration documents: 'aisbn-config v1' then 'key value' lines.
// Every key is optional; unknown keys are errors so typos cannot silently
// fall back to defaults.
// ---------------------------------------------------------------------------

inline constexpr const char* kConfigHeader = "aisbn-config";

struct RunConfig {
  EngineConfig engine;
  std::uint64_t seed = 1;
};

inline ParseResult<RunConfig> parse_run_config(std::string_view text) {
  ParseResult<RunConfig> res;
  RunConfig cfg;
  const auto lines = tokenize_document(text);
  if (lines.empty() || lines[0].tokens[0] != kConfigHeader || lines[0].tokens.size() != 2 ||
      lines[0].tokens[1] != "v1") {
    res.errors.push_back({lines.empty() ? 0 : lines[0].number,
                          std::string("expected header '") + kConfigHeader + " v1'"});
    return res;
  }
  DeltaSTable table;
  bool use_paper_table = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const TextLine& tl = lines[li];
    const std::string& key = tl.tokens[0];
    auto bad = [&](const std::string& why) { res.errors.push_back({tl.number, why}); };
    auto need = [&](std::size_t n) {
      if (tl.tokens.size() != n + 1) {
        bad("'" + key + "' expects " + std::to_string(n) + " value(s)");
        return false;
      }
      return true;
    };
    auto num = [&](std::size_t k, double& out) {
      const auto v = parse_double(tl.tokens[k]);
      if (!v) {
        bad("bad number '" + tl.tokens[k] + "'");
        return false;
      }
      out = *v;
      return true;
    };
    auto integer = [&](std::size_t k, std::int64_t& out) {
      const auto v = parse_int(tl.tokens[k]);
      if (!v) {
        bad("bad integer '" + tl.tokens[k] + "'");
        return false;
      }
      out = *v;
      return true;
    };
    auto boolean = [&](std::size_t k, bool& out) {
      const auto v = parse_bool(tl.tokens[k]);
      if (!v) {
        bad("bad boolean '" + tl.tokens[k] + "'");
        return false;
      }
      out = *v;
      return true;
    };

    std::int64_t iv = 0;
    if (key == "epsilon_r") {
      if (need(1)) num(1, cfg.engine.eps_r);
    } else if (key == "delta") {
      if (need(1)) num(1, cfg.engine.delta);
    } else if (key == "updating_interval") {
      if (need(1) && integer(1, iv)) cfg.engine.updating_interval = iv;
    } else if (key == "threshold") {
      if (need(1) && integer(1, iv)) cfg.engine.threshold = iv;
    } else if (key == "warmup_stages") {
      if (need(1) && integer(1, iv)) cfg.engine.warmup_stages = static_cast<int>(iv);
    } else if (key == "sample_cap") {
      if (need(1) && integer(1, iv)) cfg.engine.sample_cap = iv;
    } else if (key == "max_restarts") {
      if (need(1) && integer(1, iv)) cfg.engine.max_restarts = static_cast<int>(iv);
    } else if (key == "restart_strategy_switch") {
      if (need(1) && integer(1, iv)) cfg.engine.restart_strategy_switch = static_cast<int>(iv);
    } else if (key == "algorithm") {
      if (!need(1)) continue;
      if (tl.tokens[1] == "ais-sigma")
        cfg.engine.algorithm = Algorithm::ais_sigma;
      else if (tl.tokens[1] == "ais-mu")
        cfg.engine.algorithm = Algorithm::ais_mu;
      else
        bad("algorithm must be ais-sigma or ais-mu");
    } else if (key == "seed") {
      if (need(1) && integer(1, iv)) cfg.seed = static_cast<std::uint64_t>(iv);
    } else if (key == "interleave_learning") {
      if (need(1)) boolean(1, cfg.engine.interleave_learning);
    } else if (key == "reuse_learned_importance") {
      if (need(1)) boolean(1, cfg.engine.reuse_learned_importance);
    } else if (key == "mu_analytic_bound") {
      if (need(1)) boolean(1, cfg.engine.mu_uses_analytic_bound);
    } else if (key == "p_floor") {
      if (need(1)) num(1, cfg.engine.p_floor);
    } else if (key == "init_strategy") {
      if (!need(1)) continue;
      if (tl.tokens[1] == "cpt-clamp")
        cfg.engine.init_strategy = InitStrategy::cpt_clamp;
      else if (tl.tokens[1] == "uniform-evidence-parents")
        cfg.engine.init_strategy = InitStrategy::uniform_evidence_parents;
      else
        bad("init_strategy must be cpt-clamp or uniform-evidence-parents");
    } else if (key == "delta_s") {
      if (!need(3)) continue;
      DeltaSEntry e{};
      if (num(1, e.delta) && num(2, e.eps_r) && num(3, e.delta_s)) table.entries.push_back(e);
    } else if (key == "use_paper_delta_s_table") {
      if (need(1)) boolean(1, use_paper_table);
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  if (use_paper_table)
    for (const auto& e : paper_delta_s_table().entries) table.entries.push_back(e);
  if (!table.entries.empty()) cfg.engine.delta_s_table = std::move(table);

  if (res.errors.empty()) {
    try {
      cfg.engine.validate_or_throw();
    } catch (const std::exception& ex) {
      res.errors.push_back({0, ex.what()});
    }
  }
  if (!res.errors.empty()) return res;
  res.value = std::move(cfg);
  return res;
}

// ---------------------------------------------------------------------------
// Evidence / query specs: 'Node=state' pairs, from the command line or from
// files (one or more pairs per line, '#' comments). A node given two
// different states is a conflict, not an override.
// ---------------------------------------------------------------------------

struct NodeStatePair {
  std::string node;
  std::string state;
};

inline ParseResult<std::vector<NodeStatePair>> parse_pair_list(std::string_view text) {
  ParseResult<std::vector<NodeStatePair>> res;
  std::vector<NodeStatePair> out;
  for (const TextLine& tl : tokenize_document(text)) {
    for (const std::string& tok : tl.tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
        res.errors.push_back({tl.number, "expected node=state, got '" + tok + "'"});
        continue;
      }
      out.push_back({tok.substr(0, eq), tok.substr(eq + 1)});
    }
  }
  if (!res.errors.empty()) return res;
  res.value = std::move(out);
  return res;
}

// Resolves pairs against a network into an assignment. `conflict` marks a
// node bound to two different states (its own error class downstream).
struct ResolvedAssignment {
  Assignment assignment;
  std::vector<std::string> errors;
  bool conflict = false;
};

inline ResolvedAssignment resolve_pairs(const BayesNet& net,
                                        const std::vector<NodeStatePair>& pairs) {
  ResolvedAssignment out;
  out.assignment = Assignment(net.n_nodes());
  for (const NodeStatePair& p : pairs) {
    const auto node = net.index_of(p.node);
    if (!node) {
      out.errors.push_back("unknown node '" + p.node + "'");
      continue;
    }
    const auto& states = net.node(*node).states;
    int st = -1;
    for (std::size_t s = 0; s < states.size(); ++s)
      if (states[s] == p.state) st = static_cast<int>(s);
    if (st < 0) {
      out.errors.push_back("node '" + p.node + "' has no state '" + p.state + "'");
      continue;
    }
    if (out.assignment.has(*node) && out.assignment.state(*node) != st) {
      out.errors.push_back("node '" + p.node + "' assigned two different states");
      out.conflict = true;
      continue;
    }
    out.assignment.set(*node, st);
  }
  return out;
}

} // namespace aisbn
