#pragma once

#include "causalbell/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace causalbell {

// Input-output Bell DAG: per party, the set of parties whose inputs feed its
// output. Party indices are 0-based internally; the text syntax is 1-based.
// in_set(i) always contains i and is kept sorted.
class IoBdag {
public:
  explicit IoBdag(std::vector<std::vector<int>> in_sets) : in_(std::move(in_sets)) {
    const int n = int(in_.size());
    if (n < 1) throw std::invalid_argument("iobdag: need at least one party");
    for (int i = 0; i < n; ++i) {
      auto& s = in_[std::size_t(i)];
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      for (int j : s)
        if (j < 0 || j >= n) throw std::invalid_argument("iobdag: input index out of range");
      if (!std::binary_search(s.begin(), s.end(), i))
        throw std::invalid_argument("iobdag: party " + std::to_string(i + 1) +
                                    " must see its own input");
    }
  }

  static IoBdag lhv(int parties) {
    std::vector<std::vector<int>> in;
    for (int i = 0; i < parties; ++i) in.push_back({i});
    return IoBdag(std::move(in));
  }

  int num_parties() const { return int(in_.size()); }
  const std::vector<int>& in_set(int party) const { return in_.at(std::size_t(party)); }
  const std::vector<std::vector<int>>& in_sets() const { return in_; }

  bool operator==(const IoBdag& o) const { return in_ == o.in_; }
  bool operator!=(const IoBdag& o) const { return !(*this == o); }
  bool operator<(const IoBdag& o) const { return in_ < o.in_; }

  // Number of extra input-to-output edges, sum_i (|in_i| - 1).
  int level() const {
    int l = 0;
    for (const auto& s : in_) l += int(s.size()) - 1;
    return l;
  }

  // Image under a relabeling of parties: party i becomes perm[i].
  IoBdag permuted(const std::vector<int>& perm) const {
    const int n = num_parties();
    std::vector<std::vector<int>> out(std::size_t(n));
    for (int i = 0; i < n; ++i) {
      std::vector<int> s;
      s.reserve(in_[std::size_t(i)].size());
      for (int j : in_[std::size_t(i)]) s.push_back(perm[std::size_t(j)]);
      out[std::size_t(perm[std::size_t(i)])] = std::move(s);
    }
    return IoBdag(std::move(out));
  }

private:
  std::vector<std::vector<int>> in_;
};

namespace detail {
template <typename F>
void for_each_permutation(int n, F&& f) {
  std::vector<int> perm(std::size_t(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    f(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
}
} // namespace detail

// Lexicographically smallest representative under simultaneous party
// relabeling. Idempotent.
inline IoBdag canonical_form(const IoBdag& io) {
  IoBdag best = io;
  detail::for_each_permutation(io.num_parties(), [&](const std::vector<int>& perm) {
    IoBdag img = io.permuted(perm);
    if (img < best) best = img;
  });
  return best;
}

// Number of distinct IO BDAGs in the S_N orbit.
inline int orbit_size(const IoBdag& io) {
  std::set<std::vector<std::vector<int>>> seen;
  detail::for_each_permutation(io.num_parties(), [&](const std::vector<int>& perm) {
    seen.insert(io.permuted(perm).in_sets());
  });
  return int(seen.size());
}

inline std::vector<IoBdag> orbit_representatives(const IoBdag& io) {
  std::set<std::vector<std::vector<int>>> seen;
  detail::for_each_permutation(io.num_parties(), [&](const std::vector<int>& perm) {
    seen.insert(io.permuted(perm).in_sets());
  });
  std::vector<IoBdag> out;
  out.reserve(seen.size());
  for (const auto& s : seen) out.push_back(IoBdag(s));
  return out;
}

// True iff some party ordering pi has in_{pi(k)} containing {pi(1)..pi(k)} for
// every k: the structure embeds a full communication chain, which makes the
// class able to reproduce every nonsignaling behavior. For three parties this
// criterion is exhaustive; for more it is a sufficient witness.
inline bool is_chain_boring(const IoBdag& io) {
  const int n = io.num_parties();
  bool found = false;
  detail::for_each_permutation(n, [&](const std::vector<int>& order) {
    if (found) return;
    // order[k] = party at chain position k
    for (int k = 0; k < n; ++k) {
      const auto& s = io.in_set(order[std::size_t(k)]);
      for (int t = 0; t <= k; ++t)
        if (!std::binary_search(s.begin(), s.end(), order[std::size_t(t)])) return;
    }
    found = true;
  });
  return found;
}

// Text form "{(1),(1,2),(1,2,3)}": ascending 1-based indices per party,
// parties in order. print/parse are exact inverses.
inline std::string to_string(const IoBdag& io) {
  std::ostringstream os;
  os << '{';
  for (int i = 0; i < io.num_parties(); ++i) {
    if (i) os << ',';
    os << '(';
    const auto& s = io.in_set(i);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k) os << ',';
      os << s[k] + 1;
    }
    os << ')';
  }
  os << '}';
  return os.str();
}

inline IoBdag parse_iobdag(std::string_view text) {
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  auto fail = [&](const std::string& why) {
    return parse_error("iobdag '" + std::string(text) + "': " + why);
  };
  if (compact.size() < 2 || compact.front() != '{' || compact.back() != '}')
    throw fail("expected {...}");
  std::vector<std::vector<int>> sets;
  std::size_t i = 1;
  const std::size_t end = compact.size() - 1;
  while (i < end) {
    if (compact[i] != '(') throw fail("expected '('");
    ++i;
    std::vector<int> s;
    while (i < end && compact[i] != ')') {
      std::size_t j = i;
      while (j < end && std::isdigit(static_cast<unsigned char>(compact[j]))) ++j;
      if (j == i) throw fail("expected party index");
      s.push_back(std::stoi(compact.substr(i, j - i)) - 1);
      i = j;
      if (i < end && compact[i] == ',') ++i;
    }
    if (i >= end) throw fail("unterminated set");
    ++i; // ')'
    if (i < end) {
      if (compact[i] != ',') throw fail("expected ',' between sets");
      ++i;
    }
    sets.push_back(std::move(s));
  }
  if (sets.empty()) throw fail("no parties");
  const int n = int(sets.size());
  for (std::size_t p = 0; p < sets.size(); ++p) {
    auto sorted = sets[p];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw fail("duplicate index in a set");
    if (sorted != sets[p]) throw fail("indices must be ascending");
    for (int v : sets[p])
      if (v < 0 || v >= n) throw fail("party index out of range");
    if (std::find(sets[p].begin(), sets[p].end(), int(p)) == sets[p].end())
      throw fail("party " + std::to_string(p + 1) + " must list its own input");
  }
  return IoBdag(std::move(sets));
}

// General Bell DAG over the nodes {x_1..x_N, a_1..a_N, lambda}. The defining
// edges x_i -> a_i and lambda -> a_i are implicit and always present; the edge
// list holds everything else.
class GeneralBdag {
public:
  enum class NodeKind { input, output, hidden };
  struct Node {
    NodeKind kind;
    int party; // ignored for hidden
    bool operator==(const Node& o) const {
      return kind == o.kind && (kind == NodeKind::hidden || party == o.party);
    }
  };
  struct Edge {
    Node from, to;
  };

  GeneralBdag(int parties, std::vector<Edge> edges)
      : parties_(parties), edges_(std::move(edges)) {
    if (parties_ < 1) throw std::invalid_argument("bdag: need at least one party");
    for (const Edge& e : edges_) {
      check_node(e.from);
      check_node(e.to);
      if (e.from == e.to) throw std::invalid_argument("bdag: self-loop");
    }
    if (!acyclic()) throw std::invalid_argument("bdag: cycle detected");
  }

  int num_parties() const { return parties_; }
  const std::vector<Edge>& edges() const { return edges_; }

private:
  void check_node(const Node& n) const {
    if (n.kind != NodeKind::hidden && (n.party < 0 || n.party >= parties_))
      throw std::invalid_argument("bdag: party index out of range");
  }

  int node_id(const Node& n) const {
    if (n.kind == NodeKind::hidden) return 2 * parties_;
    return (n.kind == NodeKind::input ? 0 : parties_) + n.party;
  }

  bool acyclic() const {
    const int total = 2 * parties_ + 1;
    std::vector<std::vector<int>> adj(std::size_t(total));
    auto add = [&](const Node& u, const Node& v) {
      adj[std::size_t(node_id(u))].push_back(node_id(v));
    };
    for (int i = 0; i < parties_; ++i) {
      add(Node{NodeKind::input, i}, Node{NodeKind::output, i});
      add(Node{NodeKind::hidden, 0}, Node{NodeKind::output, i});
    }
    for (const Edge& e : edges_) add(e.from, e.to);
    std::vector<int> state(std::size_t(total), 0);
    std::vector<int> stack;
    for (int s = 0; s < total; ++s) {
      if (state[std::size_t(s)]) continue;
      stack.push_back(s);
      while (!stack.empty()) {
        int u = stack.back();
        if (state[std::size_t(u)] == 0) {
          state[std::size_t(u)] = 1;
          for (int v : adj[std::size_t(u)]) {
            if (state[std::size_t(v)] == 1) return false;
            if (state[std::size_t(v)] == 0) stack.push_back(v);
          }
        } else {
          if (state[std::size_t(u)] == 1) state[std::size_t(u)] = 2;
          stack.pop_back();
        }
      }
    }
    return true;
  }

  int parties_;
  std::vector<Edge> edges_;
};

// Rewrites a general Bell DAG into its nonsignaling-equivalent IO BDAG:
// any party-to-party influence i -> j (any edge among {x_i,a_i} -> {x_j,a_j})
// becomes j's in-set gaining i, and any edge between lambda and an input x_i
// broadcasts i into every party's in-set.
inline IoBdag canonicalize_to_io(const GeneralBdag& g) {
  using Node = GeneralBdag::Node;
  using Kind = GeneralBdag::NodeKind;
  const int n = g.num_parties();
  std::vector<std::set<int>> in(std::size_t(n));
  for (int i = 0; i < n; ++i) in[std::size_t(i)].insert(i);
  auto party_of = [](const Node& nd) { return nd.kind == Kind::hidden ? -1 : nd.party; };
  for (const auto& e : g.edges()) {
    const int pf = party_of(e.from), pt = party_of(e.to);
    if (pf >= 0 && pt >= 0) {
      if (pf != pt) in[std::size_t(pt)].insert(pf);
      continue;
    }
    // Edge touching lambda. lambda -> a_i is the defining edge; an edge in
    // either direction between lambda and x_i is a measurement-independence
    // relaxation and broadcasts x_i.
    const Node& other = pf < 0 ? e.to : e.from;
    if (other.kind == Kind::input) {
      for (int j = 0; j < n; ++j) in[std::size_t(j)].insert(other.party);
    }
  }
  std::vector<std::vector<int>> sets;
  sets.reserve(std::size_t(n));
  for (auto& s : in) sets.emplace_back(s.begin(), s.end());
  return IoBdag(std::move(sets));
}

// Views an IO BDAG as a general Bell DAG (edges x_j -> a_i for j in in_i).
inline GeneralBdag as_general(const IoBdag& io) {
  using Node = GeneralBdag::Node;
  using Kind = GeneralBdag::NodeKind;
  std::vector<GeneralBdag::Edge> edges;
  for (int i = 0; i < io.num_parties(); ++i)
    for (int j : io.in_set(i))
      if (j != i)
        edges.push_back({Node{Kind::input, j}, Node{Kind::output, i}});
  return GeneralBdag(io.num_parties(), std::move(edges));
}

// Edge-list syntax for general Bell DAGs: semicolon/comma separated tokens
// "u->v" with u,v in {x<k>, a<k>, l | lambda}, e.g. "a1->x2; x1->a2".
// The defining edges are implicit and need not be listed.
inline GeneralBdag parse_general_bdag(std::string_view text, int parties) {
  using Node = GeneralBdag::Node;
  using Kind = GeneralBdag::NodeKind;
  auto fail = [&](const std::string& why) {
    return parse_error("bdag '" + std::string(text) + "': " + why);
  };
  auto parse_node = [&](std::string_view tok) -> Node {
    if (tok == "l" || tok == "lambda") return Node{Kind::hidden, 0};
    if (tok.size() >= 2 && (tok[0] == 'x' || tok[0] == 'a')) {
      int party = 0;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) throw fail("bad node token");
        party = party * 10 + (tok[i] - '0');
      }
      return Node{tok[0] == 'x' ? Kind::input : Kind::output, party - 1};
    }
    throw fail("bad node token '" + std::string(tok) + "'");
  };
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c == ';' ? ',' : c);
  std::vector<GeneralBdag::Edge> edges;
  std::size_t pos = 0;
  while (pos < compact.size()) {
    std::size_t next = compact.find(',', pos);
    if (next == std::string::npos) next = compact.size();
    std::string_view item(compact.data() + pos, next - pos);
    if (!item.empty()) {
      const std::size_t arrow = item.find("->");
      if (arrow == std::string_view::npos) throw fail("expected 'u->v'");
      edges.push_back({parse_node(item.substr(0, arrow)), parse_node(item.substr(arrow + 2))});
    }
    pos = next + 1;
  }
  return GeneralBdag(parties, std::move(edges));
}

} // namespace causalbell
