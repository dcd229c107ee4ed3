#pragma once

#include "causalbell/behavior.hpp"
#include "causalbell/dag.hpp"
#include "causalbell/lp.hpp"
#include "causalbell/strategies.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace causalbell {

struct MembershipOptions {
  std::size_t max_lp_columns = 200000;
  // Research knob: use only strategy columns that are themselves nonsignaling
  // behaviors. The default (off) matches the membership program in which
  // arbitrary deterministic strategies may mix into a nonsignaling total.
  bool ns_columns_only = false;
};

struct MembershipResult {
  bool feasible = false;
  // Orbit representatives in canonical order; the witness lists, per
  // representative, the nonzero weights as (column index, weight) pairs.
  std::vector<IoBdag> representatives;
  std::vector<std::vector<std::pair<std::uint64_t, Rational>>> witness;
  RationalVector farkas; // infeasibility certificate over (behavior rows, sum row)
  std::uint64_t lp_iterations = 0;
};

namespace detail {

struct ClassColumns {
  std::vector<IoBdag> representatives;
  std::vector<StrategyMatrix> matrices;
  std::vector<std::uint64_t> offsets; // column offset per representative
  std::uint64_t total = 0;
};

inline ClassColumns class_columns(const Scenario& s, const IoBdag& io,
                                  std::size_t max_columns) {
  ClassColumns cc;
  cc.representatives = orbit_representatives(io);
  for (const IoBdag& rep : cc.representatives) {
    cc.offsets.push_back(cc.total);
    cc.matrices.emplace_back(s, rep);
    cc.total += cc.matrices.back().num_columns();
    if (cc.total > max_columns)
      throw guard_error("class membership: " + std::to_string(cc.total) +
                        "+ strategy columns exceed the LP column limit " +
                        std::to_string(max_columns));
  }
  return cc;
}

// Membership/threshold programs share their structure: behavior rows, one
// normalization row for q, strategy columns, optionally one mixing variable.
inline LinearProgram assemble_membership_lp(const Behavior& b, const ClassColumns& cc,
                                            const Behavior* direction_target,
                                            bool ns_columns_only) {
  const Scenario& s = b.scenario();
  const std::uint64_t d = s.dimension();
  LinearProgram lp;
  lp.num_rows = d + 1;
  lp.rhs = b.values();
  lp.rhs.push_back(1); // sum of q
  lp.columns.reserve(cc.total + (direction_target ? 1 : 0));
  std::vector<std::uint32_t> rows;
  for (const StrategyMatrix& sm : cc.matrices) {
    for (std::uint64_t l = 0; l < sm.num_columns(); ++l) {
      sm.column_rows(l, rows);
      LpColumn col;
      col.unit_rows.assign(rows.begin(), rows.end());
      col.unit_rows.push_back(std::uint32_t(d));
      if (ns_columns_only && !is_nonsignaling(sm.column_behavior(l))) continue;
      lp.columns.push_back(std::move(col));
    }
  }
  if (direction_target) {
    // Mixing weight nu: D q + nu (p - t) = p, so the mixture (1-nu) p + nu t
    // is what the strategies must reproduce.
    const RationalVector& t = direction_target->values();
    LpColumn col;
    for (std::uint64_t i = 0; i < d; ++i) {
      const Rational diff = b.values()[i] - t[i];
      if (diff != 0) col.add(std::uint32_t(i), diff);
    }
    lp.columns.push_back(std::move(col));
  }
  lp.objective.assign(lp.columns.size(), Rational(0));
  if (direction_target) lp.objective.back() = 1;
  return lp;
}

} // namespace detail

// Is the behavior inside the causal Bell class of `io` (convex hull over all
// party-permutation representatives)? Exact feasibility LP; the witness or the
// Farkas certificate re-verifies exactly.
inline MembershipResult class_membership(const Behavior& b, const IoBdag& io,
                                         const MembershipOptions& options = {}) {
  const Scenario& s = b.scenario();
  if (s.num_parties() != io.num_parties())
    throw std::invalid_argument("class_membership: scenario/io party mismatch");
  if (auto viol = find_signaling(b))
    throw std::invalid_argument("class_membership: behavior is signaling (" +
                                viol->describe() + ")");
  detail::ClassColumns cc = detail::class_columns(s, io, options.max_lp_columns);
  LinearProgram lp = detail::assemble_membership_lp(b, cc, nullptr, options.ns_columns_only);
  LpOptions lpo;
  lpo.max_columns = options.max_lp_columns + 1;
  LpOutcome out = solve(lp, lpo);

  MembershipResult res;
  res.representatives = cc.representatives;
  res.lp_iterations = out.iterations;
  if (out.status == LpStatus::optimal) {
    res.feasible = true;
    res.witness.resize(cc.representatives.size());
    // With ns_columns_only the LP columns are a subsequence; witness indices
    // are only reconstructed for the full-column program.
    if (!options.ns_columns_only) {
      for (std::size_t j = 0; j < out.solution.size(); ++j) {
        if (out.solution[j] == 0) continue;
        std::size_t rep = cc.offsets.size() - 1;
        while (cc.offsets[rep] > j) --rep;
        res.witness[rep].emplace_back(std::uint64_t(j) - cc.offsets[rep], out.solution[j]);
      }
    }
  } else {
    res.feasible = false;
    res.farkas = out.farkas;
  }
  return res;
}

// Reconstructs the behavior encoded by a membership witness; callers can check
// it reproduces the tested behavior exactly.
inline Behavior witness_behavior(const Scenario& s, const MembershipResult& res) {
  RationalVector values(s.dimension(), Rational(0));
  std::vector<std::uint32_t> rows;
  for (std::size_t rep = 0; rep < res.representatives.size(); ++rep) {
    StrategyMatrix sm(s, res.representatives[rep]);
    for (const auto& [lambda, weight] : res.witness[rep]) {
      sm.column_rows(lambda, rows);
      for (auto r : rows) values[r] += weight;
    }
  }
  return Behavior(s, std::move(values));
}

// Smallest nu in [0,1] with (1-nu) p_ext + nu white_noise inside the class.
// White noise belongs to every class, so the program is always feasible.
inline Rational critical_noise(const Behavior& p_ext, const IoBdag& io,
                               const MembershipOptions& options = {}) {
  const Scenario& s = p_ext.scenario();
  if (s.num_parties() != io.num_parties())
    throw std::invalid_argument("critical_noise: scenario/io party mismatch");
  if (auto viol = find_signaling(p_ext))
    throw std::invalid_argument("critical_noise: behavior is signaling (" +
                                viol->describe() + ")");
  detail::ClassColumns cc = detail::class_columns(s, io, options.max_lp_columns);
  const Behavior wn = white_noise(s);
  LinearProgram lp = detail::assemble_membership_lp(p_ext, cc, &wn, options.ns_columns_only);
  LpOptions lpo;
  lpo.max_columns = options.max_lp_columns + 1;
  LpOutcome out = solve(lp, lpo);
  if (out.status != LpStatus::optimal)
    throw std::logic_error("critical_noise: mixing program unexpectedly " +
                           std::string(out.status == LpStatus::infeasible ? "infeasible"
                                                                          : "unbounded"));
  return out.value;
}

// Smallest nu with (1-nu) p_a + nu p_b inside the class; nullopt when no
// nu in [0,1] works.
inline std::optional<Rational> mixture_threshold(const Behavior& p_a, const Behavior& p_b,
                                                 const IoBdag& io,
                                                 const MembershipOptions& options = {}) {
  if (p_a.scenario() != p_b.scenario())
    throw std::invalid_argument("mixture_threshold: scenario mismatch");
  const Scenario& s = p_a.scenario();
  if (s.num_parties() != io.num_parties())
    throw std::invalid_argument("mixture_threshold: scenario/io party mismatch");
  for (const Behavior* p : {&p_a, &p_b})
    if (auto viol = find_signaling(*p))
      throw std::invalid_argument("mixture_threshold: behavior is signaling (" +
                                  viol->describe() + ")");
  detail::ClassColumns cc = detail::class_columns(s, io, options.max_lp_columns);
  LinearProgram lp = detail::assemble_membership_lp(p_a, cc, &p_b, options.ns_columns_only);
  LpOptions lpo;
  lpo.max_columns = options.max_lp_columns + 1;
  LpOutcome out = solve(lp, lpo);
  if (out.status != LpStatus::optimal) return std::nullopt;
  if (out.value > 1) return std::nullopt;
  return out.value;
}

// The three star-family IO BDAGs for N=3, in hierarchy order.
inline std::vector<IoBdag> star_family_classes() {
  return {IoBdag({{0}, {1}, {0, 1, 2}}),
          IoBdag({{0}, {1, 2}, {0, 1, 2}}),
          IoBdag({{0, 2}, {1, 2}, {0, 1, 2}})};
}

// Membership verdicts across the three star-family classes must agree; returns
// whether they do for this behavior.
inline bool star_collapse_check(const Behavior& b, const MembershipOptions& options = {}) {
  if (b.scenario().num_parties() != 3)
    throw std::invalid_argument("star_collapse_check: needs three parties");
  std::optional<bool> verdict;
  for (const IoBdag& io : star_family_classes()) {
    const bool feasible = class_membership(b, io, options).feasible;
    if (!verdict)
      verdict = feasible;
    else if (*verdict != feasible)
      return false;
  }
  return true;
}

// Is the marginal over the first two parties explainable by a bipartite LHV
// model?
inline bool ab_marginal_is_lhv(const Behavior& b, const MembershipOptions& options = {}) {
  if (b.scenario().num_parties() != 3)
    throw std::invalid_argument("ab_marginal_is_lhv: needs three parties");
  const Behavior ab = marginal(b, {0, 1});
  return class_membership(ab, IoBdag::lhv(2), options).feasible;
}

} // namespace causalbell
