#pragma once

#include "causalbell/behavior.hpp"
#include "causalbell/dag.hpp"
#include "causalbell/errors.hpp"
#include "causalbell/scenario.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace causalbell {

namespace detail {
inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, const char* what) {
  std::uint64_t r = 1;
  for (std::uint64_t k = 0; k < exp; ++k) r = checked_mul(r, base, what);
  return r;
}
} // namespace detail

// Number of global deterministic strategies for (scenario, io):
// prod_i |A_i| ^ (prod_{j in in_i} |X_j|). Checked arithmetic.
inline std::uint64_t strategy_count(const Scenario& s, const IoBdag& io) {
  if (s.num_parties() != io.num_parties())
    throw std::invalid_argument("strategy_count: scenario/io party mismatch");
  std::uint64_t total = 1;
  for (int i = 0; i < s.num_parties(); ++i) {
    std::uint64_t contexts = 1;
    for (int j : io.in_set(i))
      contexts = detail::checked_mul(contexts, std::uint64_t(s.num_inputs(j)), "strategy_count");
    const std::uint64_t local =
        detail::checked_pow(std::uint64_t(s.num_outputs(i)), contexts, "strategy_count");
    total = detail::checked_mul(total, local, "strategy_count");
  }
  return total;
}

// The 0/1 matrix of global deterministic strategies for one IO BDAG. Columns
// are generated on demand; each column is a product of local deterministic
// response functions and holds exactly one 1 per joint-input context.
//
// Column ordering: lambda = (lambda_1..lambda_N) in mixed radix with party 1
// slowest. lambda_i enumerates the response tables of party i in lexicographic
// order of the table (f(ctx_0), f(ctx_1), ...), where contexts of the sorted
// in-set are flattened with the first in-set member slowest.
class StrategyMatrix {
public:
  StrategyMatrix(Scenario scenario, IoBdag io)
      : scenario_(std::move(scenario)), io_(std::move(io)) {
    num_columns_ = strategy_count(scenario_, io_);
    const int n = scenario_.num_parties();
    party_.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
      PartyData& pd = party_[std::size_t(i)];
      pd.outputs = std::uint64_t(scenario_.num_outputs(i));
      pd.contexts = 1;
      for (int j : io_.in_set(i)) pd.contexts *= std::uint64_t(scenario_.num_inputs(j));
      pd.local_count = detail::checked_pow(pd.outputs, pd.contexts, "strategy matrix");
      // power table for digit extraction, most significant digit = context 0
      pd.powers.resize(pd.contexts);
      std::uint64_t p = 1;
      for (std::uint64_t k = pd.contexts; k-- > 0;) {
        pd.powers[k] = p;
        if (k > 0) p *= pd.outputs;
      }
    }
    // Per joint input, the context index seen by each party.
    const std::uint64_t joint = scenario_.joint_input_count();
    context_of_.assign(std::size_t(n), std::vector<std::uint64_t>(joint));
    std::vector<int> x(std::size_t(n));
    for (std::uint64_t xf = 0; xf < joint; ++xf) {
      scenario_.unflatten_input(xf, x);
      for (int i = 0; i < n; ++i) {
        std::uint64_t ctx = 0;
        for (int j : io_.in_set(i))
          ctx = ctx * std::uint64_t(scenario_.num_inputs(j)) + std::uint64_t(x[std::size_t(j)]);
        context_of_[std::size_t(i)][xf] = ctx;
      }
    }
  }

  const Scenario& scenario() const { return scenario_; }
  const IoBdag& io_bdag() const { return io_; }
  std::uint64_t num_columns() const { return num_columns_; }

  // Splits a global column index into per-party strategy indices.
  std::vector<std::uint64_t> split(std::uint64_t lambda) const {
    const std::size_t n = party_.size();
    std::vector<std::uint64_t> parts(n);
    for (std::size_t i = n; i-- > 0;) {
      parts[i] = lambda % party_[i].local_count;
      lambda /= party_[i].local_count;
    }
    return parts;
  }

  // Output of party i under local strategy lambda_i at context ctx.
  int respond(int party, std::uint64_t lambda_i, std::uint64_t ctx) const {
    const PartyData& pd = party_[std::size_t(party)];
    return int((lambda_i / pd.powers[ctx]) % pd.outputs);
  }

  // Row indices (canonical flat behavior indices) of the 1-entries of column
  // lambda, one per joint input, ascending.
  void column_rows(std::uint64_t lambda, std::vector<std::uint32_t>& rows) const {
    const std::size_t n = party_.size();
    std::vector<std::uint64_t> parts = split(lambda);
    const std::uint64_t joint = scenario_.joint_input_count();
    const std::uint64_t block = scenario_.joint_output_count();
    rows.clear();
    rows.reserve(joint);
    for (std::uint64_t xf = 0; xf < joint; ++xf) {
      std::uint64_t aflat = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const int a = respond(int(i), parts[i], context_of_[i][xf]);
        aflat = aflat * party_[i].outputs + std::uint64_t(a);
      }
      rows.push_back(std::uint32_t(xf * block + aflat));
    }
  }

  Behavior column_behavior(std::uint64_t lambda) const {
    RationalVector values(scenario_.dimension(), Rational(0));
    std::vector<std::uint32_t> rows;
    column_rows(lambda, rows);
    for (auto r : rows) values[r] = 1;
    return Behavior(scenario_, std::move(values));
  }

  // Dense materialization (rows = behavior entries, columns = strategies).
  // Guarded: this is for small instances and tests.
  std::vector<std::vector<int>> materialize(std::uint64_t max_columns = 65536) const {
    if (num_columns_ > max_columns)
      throw guard_error("strategy matrix: " + std::to_string(num_columns_) +
                        " columns exceed the materialization cap " + std::to_string(max_columns));
    std::vector<std::vector<int>> dense(scenario_.dimension(),
                                        std::vector<int>(num_columns_, 0));
    std::vector<std::uint32_t> rows;
    for (std::uint64_t l = 0; l < num_columns_; ++l) {
      column_rows(l, rows);
      for (auto r : rows) dense[r][l] = 1;
    }
    return dense;
  }

  // Iteration support for streamed scans: per-party response tables for a
  // column, refreshed only for the parties whose local index changed.
  struct Cursor {
    std::vector<std::uint64_t> parts;
    std::vector<std::vector<int>> tables; // party -> context -> output
  };

  Cursor make_cursor(std::uint64_t lambda) const {
    Cursor c;
    c.parts = split(lambda);
    c.tables.resize(party_.size());
    for (std::size_t i = 0; i < party_.size(); ++i) fill_table(int(i), c.parts[i], c.tables[i]);
    return c;
  }

  // Advances the cursor to the next column; returns false on wrap-around.
  bool advance(Cursor& c) const {
    for (std::size_t i = party_.size(); i-- > 0;) {
      if (++c.parts[i] < party_[i].local_count) {
        fill_table(int(i), c.parts[i], c.tables[i]);
        return true;
      }
      c.parts[i] = 0;
      fill_table(int(i), 0, c.tables[i]);
    }
    return false;
  }

  const std::vector<std::uint64_t>& contexts_per_input(int party) const {
    return context_of_[std::size_t(party)];
  }

private:
  struct PartyData {
    std::uint64_t outputs = 0;
    std::uint64_t contexts = 0;
    std::uint64_t local_count = 0;
    std::vector<std::uint64_t> powers;
  };

  void fill_table(int party, std::uint64_t lambda_i, std::vector<int>& table) const {
    const PartyData& pd = party_[std::size_t(party)];
    table.resize(pd.contexts);
    for (std::uint64_t k = 0; k < pd.contexts; ++k)
      table[k] = int((lambda_i / pd.powers[k]) % pd.outputs);
  }

  Scenario scenario_;
  IoBdag io_;
  std::uint64_t num_columns_ = 0;
  std::vector<PartyData> party_;
  std::vector<std::vector<std::uint64_t>> context_of_;
};

inline StrategyMatrix build_strategy_matrix(const Scenario& s, const IoBdag& io) {
  return StrategyMatrix(s, io);
}

} // namespace causalbell
