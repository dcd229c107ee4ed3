#pragma once

#include "causalbell/behavior.hpp"
#include "causalbell/dag.hpp"
#include "causalbell/lp.hpp"
#include "causalbell/strategies.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace causalbell {

// One product term of a Bell expression: an input per party and a rational
// weight per output of each party. The term contributes
//   coeff * sum_a prod_i weight_i(a_i) * p(a | x).
// Correlator records lower to +/-1 weights (outputs mapped a -> 1-2a unless an
// explicit sign map is given); probability records lower to indicator weights.
struct BellTerm {
  std::vector<int> inputs;
  std::vector<RationalVector> weights;
  Rational coeff;
};

class BellExpression {
public:
  BellExpression(Scenario scenario, std::vector<BellTerm> terms)
      : scenario_(std::move(scenario)), terms_(std::move(terms)) {
    for (const BellTerm& t : terms_) {
      if (int(t.inputs.size()) != scenario_.num_parties() ||
          int(t.weights.size()) != scenario_.num_parties())
        throw std::invalid_argument("bell expression: term arity mismatch");
      for (int i = 0; i < scenario_.num_parties(); ++i) {
        if (t.inputs[std::size_t(i)] < 0 ||
            t.inputs[std::size_t(i)] >= scenario_.num_inputs(i))
          throw std::invalid_argument("bell expression: term input out of range");
        if (int(t.weights[std::size_t(i)].size()) != scenario_.num_outputs(i))
          throw std::invalid_argument("bell expression: weight table size mismatch");
      }
    }
  }

  const Scenario& scenario() const { return scenario_; }
  const std::vector<BellTerm>& terms() const { return terms_; }

  std::optional<Rational> bound_lhv;       // recorded beta_L
  std::optional<Rational> bound_ns;        // recorded beta_NS
  std::optional<Rational> bound_algebraic; // recorded beta_alg
  // Bound recorded by the composite construction (beta_L + 2 beta_NS).
  std::optional<Rational> bound_composite;

  // Dense coefficient vector over the canonical flat behavior index.
  RationalVector to_dense() const {
    RationalVector v(scenario_.dimension(), Rational(0));
    const std::uint64_t block = scenario_.joint_output_count();
    std::vector<int> a(std::size_t(scenario_.num_parties()));
    for (const BellTerm& t : terms_) {
      const std::uint64_t base = scenario_.flat_input(t.inputs) * block;
      for (std::uint64_t af = 0; af < block; ++af) {
        scenario_.unflatten_output(af, a);
        Rational w = t.coeff;
        for (int i = 0; i < scenario_.num_parties() && w != 0; ++i)
          w *= t.weights[std::size_t(i)][std::size_t(a[std::size_t(i)])];
        if (w != 0) v[base + af] += w;
      }
    }
    return v;
  }

private:
  Scenario scenario_;
  std::vector<BellTerm> terms_;
};

namespace detail {
inline RationalVector pm_signs(int outputs) {
  RationalVector w(std::size_t(outputs));
  for (int a = 0; a < outputs; ++a) w[std::size_t(a)] = 1 - 2 * (a % 2);
  return w;
}
} // namespace detail

// Full correlator term over binary outputs with the global sign convention
// a -> 1 - 2a.
inline BellTerm correlator_term(const Scenario& s, std::vector<int> inputs,
                                Rational coeff) {
  BellTerm t;
  t.inputs = std::move(inputs);
  t.coeff = std::move(coeff);
  for (int i = 0; i < s.num_parties(); ++i) {
    if (s.num_outputs(i) != 2)
      throw std::invalid_argument("correlator term: non-binary outputs need explicit sign maps");
    t.weights.push_back(detail::pm_signs(2));
  }
  return t;
}

inline Rational evaluate(const BellExpression& e, const Behavior& b) {
  if (e.scenario() != b.scenario())
    throw std::invalid_argument("evaluate: scenario mismatch");
  return dot(e.to_dense(), b.values());
}

// Max over all deterministic assignments, signaling ones included: each joint
// input picks its best output tuple independently.
inline Rational algebraic_max(const BellExpression& e) {
  const Scenario& s = e.scenario();
  const RationalVector v = e.to_dense();
  const std::uint64_t block = s.joint_output_count();
  Rational total = 0;
  for (std::uint64_t x = 0; x < s.joint_input_count(); ++x) {
    Rational best = v[x * block];
    for (std::uint64_t a = 1; a < block; ++a)
      if (v[x * block + a] > best) best = v[x * block + a];
    total += best;
  }
  return total;
}

struct ScanResult {
  Rational value;
  std::size_t representative = 0; // index into orbit representatives
  std::uint64_t argmax = 0;       // column index within that representative
};

struct ScanOptions {
  std::uint64_t max_columns = 200'000'000; // scan budget over the whole orbit
  unsigned jobs = 1;
};

namespace detail {

// Streamed maximum of a dense functional over the strategy columns of one
// representative, on [first, last). Exact: coefficients are pre-scaled to a
// common denominator and accumulated in 64-bit integers when they fit, with a
// rational fallback otherwise. Ties resolve to the smallest column index.
template <typename Value, typename Table>
void scan_range(const StrategyMatrix& sm, const Table& coef, std::uint64_t first,
                std::uint64_t last, Value& best, std::uint64_t& best_lambda) {
  const Scenario& s = sm.scenario();
  const int n = s.num_parties();
  const std::uint64_t joint = s.joint_input_count();
  const std::uint64_t block = s.joint_output_count();
  std::vector<std::uint64_t> out_stride(std::size_t(n));
  {
    std::uint64_t acc = 1;
    for (int i = n; i-- > 0;) {
      out_stride[std::size_t(i)] = acc;
      acc *= std::uint64_t(s.num_outputs(i));
    }
  }
  auto cursor = sm.make_cursor(first);
  bool have = false;
  for (std::uint64_t l = first; l < last; ++l) {
    Value total{};
    for (std::uint64_t xf = 0; xf < joint; ++xf) {
      std::uint64_t aflat = 0;
      for (int i = 0; i < n; ++i)
        aflat += out_stride[std::size_t(i)] *
                 std::uint64_t(cursor.tables[std::size_t(i)]
                                   [sm.contexts_per_input(i)[xf]]);
      total += coef[xf * block + aflat];
    }
    if (!have || total > best) {
      best = total;
      best_lambda = l;
      have = true;
    }
    if (l + 1 < last) sm.advance(cursor);
  }
}

inline bool scale_to_int64(const RationalVector& v, std::uint64_t terms_per_column,
                           std::vector<std::int64_t>& out, Integer& denom) {
  denom = 1;
  for (const Rational& q : v) denom = lcm(denom, q.get_den());
  Integer max_abs = 0;
  std::vector<Integer> scaled(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    scaled[i] = v[i].get_num() * (denom / v[i].get_den());
    Integer a = abs(scaled[i]);
    if (a > max_abs) max_abs = a;
  }
  // Column sums stay within int64 even in the worst case.
  Integer limit = max_abs * Integer(std::uint64_t(terms_per_column) + 1);
  if (limit >= Integer("4611686018427387904")) return false; // 2^62
  out.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::int64_t(scaled[i].get_si());
  return true;
}

} // namespace detail

// Max of the expression over all strategy columns of all party-permutation
// representatives of the class. Exact; convexity puts the maximum at a column.
// Deterministic argmax: first representative, then smallest column index.
inline ScanResult class_bound_scan(const BellExpression& e, const IoBdag& io,
                                   const ScanOptions& options = {}) {
  const Scenario& s = e.scenario();
  if (s.num_parties() != io.num_parties())
    throw std::invalid_argument("class_bound: scenario/io party mismatch");
  const std::vector<IoBdag> reps = orbit_representatives(io);
  std::uint64_t total = 0;
  for (const IoBdag& rep : reps) total += strategy_count(s, rep);
  if (total > options.max_columns)
    throw guard_error("class_bound: " + std::to_string(total) +
                      " strategy columns exceed the scan budget " +
                      std::to_string(options.max_columns));

  const RationalVector dense = e.to_dense();
  std::vector<std::int64_t> fast;
  Integer denom;
  const bool use_fast = detail::scale_to_int64(dense, s.joint_input_count(), fast, denom);

  std::optional<ScanResult> best;
  Rational best_value;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    StrategyMatrix sm(s, reps[r]);
    const std::uint64_t cols = sm.num_columns();
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs,
                                                          unsigned(std::min<std::uint64_t>(cols, 64))));
    std::vector<Rational> part_val(jobs);
    std::vector<std::int64_t> part_int(jobs, std::numeric_limits<std::int64_t>::min());
    std::vector<std::uint64_t> part_arg(jobs, 0);
    std::vector<char> part_have(jobs, 0);
    auto work = [&](unsigned w) {
      const std::uint64_t lo = cols * w / jobs;
      const std::uint64_t hi = cols * (w + 1) / jobs;
      if (lo >= hi) return;
      if (use_fast) {
        std::int64_t bi = 0;
        std::uint64_t arg = 0;
        detail::scan_range(sm, fast, lo, hi, bi, arg);
        part_int[w] = bi;
        part_arg[w] = arg;
      } else {
        Rational bq;
        std::uint64_t arg = 0;
        detail::scan_range(sm, dense, lo, hi, bq, arg);
        part_val[w] = bq;
        part_arg[w] = arg;
      }
      part_have[w] = 1;
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
      for (auto& t : threads) t.join();
    }
    for (unsigned w = 0; w < jobs; ++w) {
      if (!part_have[w]) continue;
      Rational value = use_fast ? Rational(make_rational(Integer(part_int[w]), denom))
                                : part_val[w];
      if (!best || value > best_value) {
        best_value = value;
        best = ScanResult{value, r, part_arg[w]};
      }
    }
  }
  if (!best) throw std::logic_error("class_bound: empty scan");
  return *best;
}

inline Rational class_bound(const BellExpression& e, const IoBdag& io,
                            const ScanOptions& options = {}) {
  return class_bound_scan(e, io, options).value;
}

// Exact maximum of the expression over the nonsignaling polytope
// (normalization + nonnegativity + the nonsignaling equalities), by LP.
inline Rational ns_bound(const BellExpression& e, const LpOptions& lp_options = {}) {
  const Scenario& s = e.scenario();
  const std::uint64_t d = s.dimension();
  if (d > lp_options.max_columns)
    throw guard_error("ns_bound: behavior dimension exceeds the LP column limit");
  const std::uint64_t block = s.joint_output_count();
  const std::uint64_t contexts = s.joint_input_count();

  LinearProgram lp;
  lp.columns.resize(d);
  std::uint32_t row = 0;
  // Normalization per joint input.
  for (std::uint64_t x = 0; x < contexts; ++x, ++row) {
    for (std::uint64_t a = 0; a < block; ++a)
      lp.columns[x * block + a].add(row, Rational(1));
    lp.rhs.push_back(1);
  }
  for (const auto& eq : ns_equality_rows(s)) {
    for (const auto& [idx, sign] : eq) lp.columns[idx].add(row, Rational(sign));
    lp.rhs.push_back(0);
    ++row;
  }
  lp.num_rows = row;
  const RationalVector dense = e.to_dense();
  lp.objective.resize(d);
  for (std::uint64_t i = 0; i < d; ++i) lp.objective[i] = -dense[i];
  LpOutcome out = solve(lp, lp_options);
  if (out.status != LpStatus::optimal)
    throw std::logic_error("ns_bound: polytope LP unexpectedly not optimal");
  return -out.value;
}

// Composite tripartite expression I3 = I2(A,B) + I2(A',C) + I2(B',C') for a
// bipartite correlator-form I2. Each tripartite output encodes two components
// of the bipartite alphabet, first factor fastest. The uninvolved party of
// each pair is averaged uniformly over its inputs (expanded term by term) and
// weighted constantly over its outputs. Records the bound beta_L + 2 beta_NS.
inline BellExpression compose_i3(const BellExpression& i2, const Rational& beta_l,
                                 const Rational& beta_ns) {
  const Scenario& bs = i2.scenario();
  if (bs.num_parties() != 2)
    throw std::invalid_argument("compose_i3: i2 must be bipartite");
  if (bs.num_outputs(0) != bs.num_outputs(1))
    throw std::invalid_argument("compose_i3: i2 must have equal output alphabets");
  if (bs.num_inputs(0) != bs.num_inputs(1))
    throw std::invalid_argument("compose_i3: i2 must have equal input alphabets");
  const int o = bs.num_outputs(0);
  const int m = bs.num_inputs(0);
  for (const BellTerm& t : i2.terms())
    for (const RationalVector& w : t.weights)
      for (const Rational& q : w)
        if (q != 1 && q != -1)
          throw std::invalid_argument("compose_i3: i2 must be in correlator form");

  const Scenario ts = Scenario::uniform(3, m, o * o);
  // component extraction: first factor = a % o, second = a / o
  auto lift = [&](const RationalVector& signs, int component) {
    RationalVector w(std::size_t(o * o));
    for (int hi = 0; hi < o; ++hi)
      for (int lo = 0; lo < o; ++lo)
        w[std::size_t(hi * o + lo)] = signs[std::size_t(component == 0 ? lo : hi)];
    return w;
  };
  const RationalVector ones(std::size_t(o * o), Rational(1));

  struct Pair {
    int left_party, right_party, spectator;
    int left_component, right_component;
  };
  // (A,B) on parties 1,2; (A',C) on parties 1,3; (B',C') on parties 2,3.
  const Pair pairs[3] = {{0, 1, 2, 0, 0}, {0, 2, 1, 1, 0}, {1, 2, 0, 1, 1}};

  std::vector<BellTerm> terms;
  for (const Pair& pr : pairs) {
    for (const BellTerm& t : i2.terms()) {
      for (int xs = 0; xs < m; ++xs) {
        BellTerm out;
        out.inputs.assign(3, 0);
        out.inputs[std::size_t(pr.left_party)] = t.inputs[0];
        out.inputs[std::size_t(pr.right_party)] = t.inputs[1];
        out.inputs[std::size_t(pr.spectator)] = xs;
        out.weights.assign(3, ones);
        out.weights[std::size_t(pr.left_party)] = lift(t.weights[0], pr.left_component);
        out.weights[std::size_t(pr.right_party)] = lift(t.weights[1], pr.right_component);
        out.coeff = t.coeff / m;
        terms.push_back(std::move(out));
      }
    }
  }
  BellExpression e(ts, std::move(terms));
  e.bound_composite = beta_l + 2 * beta_ns;
  return e;
}

// Built-in expressions. chained(k) takes the input count as parameter.
inline BellExpression builtin_chsh() {
  const Scenario s = Scenario::uniform(2, 2, 2);
  std::vector<BellTerm> terms;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      terms.push_back(correlator_term(s, {x, y}, Rational(x == 1 && y == 1 ? -1 : 1)));
  BellExpression e(s, std::move(terms));
  e.bound_lhv = 2;
  e.bound_ns = 4;
  e.bound_algebraic = 4;
  return e;
}

inline BellExpression builtin_svetlichny() {
  const Scenario s = Scenario::uniform(3, 2, 2);
  std::vector<BellTerm> terms;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const int sign = (x == 0 && y == 0 && z == 0) || (x == 1 && y == 1 && z == 1) ? -1 : 1;
        terms.push_back(correlator_term(s, {x, y, z}, Rational(sign)));
      }
  BellExpression e(s, std::move(terms));
  e.bound_lhv = 4;
  e.bound_ns = 8;
  e.bound_algebraic = 8;
  return e;
}

// Differs from the Svetlichny expression only in the sign of the first
// correlator; the bound 6 holds over the circle class.
inline BellExpression builtin_circle() {
  const Scenario s = Scenario::uniform(3, 2, 2);
  std::vector<BellTerm> terms;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        terms.push_back(
            correlator_term(s, {x, y, z}, Rational(x == 1 && y == 1 && z == 1 ? -1 : 1)));
  BellExpression e(s, std::move(terms));
  e.bound_lhv = 6;
  e.bound_ns = 8;
  e.bound_algebraic = 8;
  return e;
}

inline BellExpression builtin_chained(int k) {
  if (k < 2) throw std::invalid_argument("chained: need at least two inputs");
  const Scenario s = Scenario::uniform(2, k, 2);
  std::vector<BellTerm> terms;
  for (int x = 0; x < k; ++x) {
    terms.push_back(correlator_term(s, {x, x}, Rational(1)));
    if (x + 1 < k)
      terms.push_back(correlator_term(s, {x + 1, x}, Rational(1)));
    else
      terms.push_back(correlator_term(s, {0, x}, Rational(-1)));
  }
  BellExpression e(s, std::move(terms));
  e.bound_lhv = 2 * k - 2;
  e.bound_ns = 2 * k;
  e.bound_algebraic = 2 * k;
  return e;
}

inline BellExpression builtin_expression(const std::string& name) {
  if (name == "chsh") return builtin_chsh();
  if (name == "svetlichny") return builtin_svetlichny();
  if (name == "circle") return builtin_circle();
  if (name.rfind("chained(", 0) == 0 && name.back() == ')') {
    const std::string arg = name.substr(8, name.size() - 9);
    for (char c : arg)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("builtin: bad chained argument '" + arg + "'");
    return builtin_chained(std::stoi(arg));
  }
  throw std::invalid_argument("builtin: unknown expression '" + name + "'");
}

} // namespace causalbell
