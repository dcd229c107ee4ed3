#pragma once

#include "causalbell/rational.hpp"
#include "causalbell/scenario.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace causalbell {

// A behavior p(a_1..a_N | x_1..x_N) as a dense vector of exact rationals in
// the canonical flat order of Scenario. Construction is permissive (so that
// the normalization / nonsignaling predicates have something to reject);
// file loaders and generators enforce the invariants.
class Behavior {
public:
  Behavior(Scenario scenario, RationalVector values)
      : scenario_(std::move(scenario)), values_(std::move(values)) {
    if (values_.size() != scenario_.dimension())
      throw std::invalid_argument("behavior: value vector has wrong length");
  }

  const Scenario& scenario() const { return scenario_; }
  const RationalVector& values() const { return values_; }

  const Rational& at(std::span<const int> x, std::span<const int> a) const {
    return values_[scenario_.index(x, a)];
  }
  const Rational& operator[](std::uint64_t flat) const { return values_[flat]; }

  bool operator==(const Behavior& o) const {
    return scenario_ == o.scenario_ && values_ == o.values_;
  }
  bool operator!=(const Behavior& o) const { return !(*this == o); }

private:
  Scenario scenario_;
  RationalVector values_;
};

// First nonsignaling constraint found violated, if any: the marginal of all
// parties but `party`, at outputs `other_outputs` and inputs `context`, differs
// between setting party's input to `input_value` vs `reference_value`.
struct NsViolation {
  int party = 0;
  std::vector<int> context;
  std::vector<int> other_outputs;
  int input_value = 0;
  int reference_value = 0;

  std::string describe() const {
    std::ostringstream os;
    os << "marginal of parties other than " << (party + 1) << " at outputs (";
    for (std::size_t i = 0; i < other_outputs.size(); ++i)
      os << (i ? "," : "") << other_outputs[i];
    os << ") and inputs (";
    for (std::size_t i = 0; i < context.size(); ++i) {
      os << (i ? "," : "");
      if (int(i) == party)
        os << "*";
      else
        os << context[i];
    }
    os << ") depends on party " << (party + 1) << "'s input (" << input_value
       << " vs " << reference_value << ")";
    return os.str();
  }
};

inline bool is_normalized(const Behavior& b) {
  const Scenario& s = b.scenario();
  const std::uint64_t contexts = s.joint_input_count();
  const std::uint64_t block = s.joint_output_count();
  for (std::uint64_t x = 0; x < contexts; ++x) {
    Rational sum = 0;
    for (std::uint64_t a = 0; a < block; ++a) {
      const Rational& v = b[x * block + a];
      if (v < 0 || v > 1) return false;
      sum += v;
    }
    if (sum != 1) return false;
  }
  return true;
}

// Exhaustive check of the nonsignaling equalities: for each party, the output
// marginal over the remaining parties must agree for every value of that
// party's input (compared against input 0).
inline std::optional<NsViolation> find_signaling(const Behavior& b) {
  const Scenario& s = b.scenario();
  const int n = s.num_parties();
  std::vector<int> x(std::size_t(n)), a(std::size_t(n));
  const std::uint64_t contexts = s.joint_input_count();
  const std::uint64_t block = s.joint_output_count();

  for (int party = 0; party < n; ++party) {
    for (std::uint64_t xf = 0; xf < contexts; ++xf) {
      s.unflatten_input(xf, x);
      if (x[std::size_t(party)] == 0) continue;
      std::vector<int> x_ref = x;
      x_ref[std::size_t(party)] = 0;
      const std::uint64_t base = xf * block;
      const std::uint64_t base_ref = s.flat_input(x_ref) * block;
      // Compare marginals over party's output for every joint output of the rest.
      for (std::uint64_t af = 0; af < block; ++af) {
        s.unflatten_output(af, a);
        if (a[std::size_t(party)] != 0) continue;
        Rational lhs = 0, rhs = 0;
        for (int v = 0; v < s.num_outputs(party); ++v) {
          a[std::size_t(party)] = v;
          const std::uint64_t of = s.flat_output(a);
          lhs += b[base + of];
          rhs += b[base_ref + of];
        }
        a[std::size_t(party)] = 0;
        if (lhs != rhs) {
          NsViolation viol;
          viol.party = party;
          viol.context = x;
          viol.other_outputs.reserve(std::size_t(n - 1));
          for (int i = 0; i < n; ++i)
            if (i != party) viol.other_outputs.push_back(a[std::size_t(i)]);
          viol.input_value = x[std::size_t(party)];
          viol.reference_value = 0;
          return viol;
        }
      }
    }
  }
  return std::nullopt;
}

inline bool is_nonsignaling(const Behavior& b) { return !find_signaling(b).has_value(); }

// Sparse rows (flat index, +/-1) of the nonsignaling equality system: for each
// party and each joint input with that party's input nonzero, the output
// marginal over the remaining parties is pinned to its value at input 0.
inline std::vector<std::vector<std::pair<std::uint32_t, int>>>
ns_equality_rows(const Scenario& s) {
  std::vector<std::vector<std::pair<std::uint32_t, int>>> rows;
  const int n = s.num_parties();
  const std::uint64_t contexts = s.joint_input_count();
  const std::uint64_t block = s.joint_output_count();
  std::vector<int> x(std::size_t(n)), a(std::size_t(n));
  for (int party = 0; party < n; ++party) {
    for (std::uint64_t xf = 0; xf < contexts; ++xf) {
      s.unflatten_input(xf, x);
      if (x[std::size_t(party)] == 0) continue;
      std::vector<int> xref = x;
      xref[std::size_t(party)] = 0;
      const std::uint64_t base = xf * block;
      const std::uint64_t base_ref = s.flat_input(xref) * block;
      for (std::uint64_t af = 0; af < block; ++af) {
        s.unflatten_output(af, a);
        if (a[std::size_t(party)] != 0) continue;
        std::vector<std::pair<std::uint32_t, int>> row;
        for (int v = 0; v < s.num_outputs(party); ++v) {
          a[std::size_t(party)] = v;
          const std::uint64_t of = s.flat_output(a);
          row.emplace_back(std::uint32_t(base + of), 1);
          row.emplace_back(std::uint32_t(base_ref + of), -1);
        }
        a[std::size_t(party)] = 0;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

// Marginal behavior over `parties` (0-based, strictly increasing). Requires a
// nonsignaling argument; otherwise the marginal would depend on the discarded
// parties' inputs.
inline Behavior marginal(const Behavior& b, const std::vector<int>& parties) {
  const Scenario& s = b.scenario();
  const int n = s.num_parties();
  if (parties.empty()) throw std::invalid_argument("marginal: empty party set");
  for (std::size_t i = 0; i < parties.size(); ++i) {
    if (parties[i] < 0 || parties[i] >= n)
      throw std::invalid_argument("marginal: party index out of range");
    if (i > 0 && parties[i] <= parties[i - 1])
      throw std::invalid_argument("marginal: party set must be strictly increasing");
  }
  if (auto viol = find_signaling(b))
    throw std::invalid_argument("marginal: behavior is signaling (" + viol->describe() + ")");

  std::vector<int> sub_inputs, sub_outputs;
  for (int p : parties) {
    sub_inputs.push_back(s.num_inputs(p));
    sub_outputs.push_back(s.num_outputs(p));
  }
  Scenario sub(sub_inputs, sub_outputs);

  // Discarded parties' inputs are pinned to 0; nonsignaling makes the choice
  // irrelevant.
  RationalVector out(sub.dimension(), Rational(0));
  std::vector<int> x(std::size_t(n), 0), a(std::size_t(n));
  std::vector<int> xs(parties.size()), as(parties.size());
  const std::uint64_t sub_contexts = sub.joint_input_count();
  const std::uint64_t block = s.joint_output_count();
  for (std::uint64_t xf = 0; xf < sub_contexts; ++xf) {
    sub.unflatten_input(xf, xs);
    for (std::size_t i = 0; i < parties.size(); ++i) x[std::size_t(parties[i])] = xs[i];
    const std::uint64_t base = s.flat_input(x) * block;
    for (std::uint64_t af = 0; af < block; ++af) {
      s.unflatten_output(af, a);
      for (std::size_t i = 0; i < parties.size(); ++i) as[i] = a[std::size_t(parties[i])];
      out[sub.index(xs, as)] += b[base + af];
    }
  }
  return Behavior(std::move(sub), std::move(out));
}

inline Behavior mix(std::span<const Behavior> behaviors, std::span<const Rational> weights) {
  if (behaviors.empty() || behaviors.size() != weights.size())
    throw std::invalid_argument("mix: need matching nonempty behavior/weight lists");
  const Scenario& s = behaviors[0].scenario();
  Rational total = 0;
  for (const Rational& w : weights) {
    if (w < 0) throw std::invalid_argument("mix: negative weight");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("mix: weights must sum to 1");
  RationalVector out(s.dimension(), Rational(0));
  for (std::size_t k = 0; k < behaviors.size(); ++k) {
    if (behaviors[k].scenario() != s) throw std::invalid_argument("mix: scenario mismatch");
    if (weights[k] == 0) continue;
    const RationalVector& v = behaviors[k].values();
    for (std::size_t i = 0; i < out.size(); ++i)
      if (v[i] != 0) out[i] += weights[k] * v[i];
  }
  return Behavior(s, std::move(out));
}

inline Behavior mix(std::initializer_list<Behavior> behaviors,
                    std::initializer_list<Rational> weights) {
  return mix(std::span<const Behavior>(behaviors.begin(), behaviors.size()),
             std::span<const Rational>(weights.begin(), weights.size()));
}

inline Behavior white_noise(const Scenario& s) {
  Rational u = make_rational(1, long(s.joint_output_count()));
  return Behavior(s, RationalVector(s.dimension(), u));
}

// Which neighbour each party tries to guess in the cyclic guessing game.
enum class GyniTarget { next_neighbor, previous_neighbor };

// Success probability of the tripartite cyclic input-guessing game: inputs are
// uniform over the promise x_1 + x_2 + x_3 = 0 (mod 2) and the parties win when
// every a_i equals the chosen neighbour's input.
inline Rational gyni_success(const Behavior& b, GyniTarget target = GyniTarget::next_neighbor) {
  const Scenario& s = b.scenario();
  if (s.num_parties() != 3 || s.inputs() != std::vector<int>{2, 2, 2} ||
      s.outputs() != std::vector<int>{2, 2, 2})
    throw std::invalid_argument("gyni_success: needs the 3-party binary scenario");
  Rational total = 0;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) {
      const int x3 = x1 ^ x2; // promise
      const std::vector<int> x{x1, x2, x3};
      std::vector<int> a(3);
      for (int i = 0; i < 3; ++i) {
        const int offset = (target == GyniTarget::next_neighbor) ? 1 : 2;
        a[std::size_t(i)] = x[std::size_t((i + offset) % 3)];
      }
      total += b.at(x, a);
    }
  return total / 4;
}

} // namespace causalbell
