#pragma once

#include "causalbell/errors.hpp"
#include "causalbell/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace causalbell {

// Sparse constraint column. Entries with value exactly one are stored as bare
// row indices: deterministic-strategy columns are 0/1, and pricing them can
// then run in integer arithmetic.
struct LpColumn {
  std::vector<std::uint32_t> unit_rows;
  std::vector<std::pair<std::uint32_t, Rational>> entries;

  void add(std::uint32_t row, const Rational& value) {
    if (value == 0) return;
    if (value == 1)
      unit_rows.push_back(row);
    else
      entries.emplace_back(row, value);
  }
};

// minimize c.z  subject to  A z = b,  lower <= z (<= upper where given).
// Empty `lower` means all zeros; empty `upper` means no upper bounds.
struct LinearProgram {
  std::size_t num_rows = 0;
  std::vector<LpColumn> columns;
  RationalVector rhs;
  RationalVector objective;
  RationalVector lower;
  std::vector<std::optional<Rational>> upper;

  std::size_t num_cols() const { return columns.size(); }

  static LinearProgram from_dense(const std::vector<RationalVector>& rows,
                                  RationalVector b, RationalVector c) {
    LinearProgram lp;
    lp.num_rows = rows.size();
    lp.rhs = std::move(b);
    lp.objective = std::move(c);
    if (lp.rhs.size() != lp.num_rows)
      throw std::invalid_argument("lp: rhs length mismatch");
    const std::size_t n = lp.objective.size();
    lp.columns.resize(n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != n) throw std::invalid_argument("lp: row length mismatch");
      for (std::size_t j = 0; j < n; ++j)
        if (rows[r][j] != 0) lp.columns[j].add(std::uint32_t(r), rows[r][j]);
    }
    return lp;
  }

  void validate() const {
    if (rhs.size() != num_rows) throw std::invalid_argument("lp: rhs length mismatch");
    if (objective.size() != columns.size())
      throw std::invalid_argument("lp: objective length mismatch");
    if (!lower.empty() && lower.size() != columns.size())
      throw std::invalid_argument("lp: lower-bound length mismatch");
    if (!upper.empty() && upper.size() != columns.size())
      throw std::invalid_argument("lp: upper-bound length mismatch");
    for (const auto& col : columns) {
      for (auto r : col.unit_rows)
        if (r >= num_rows) throw std::invalid_argument("lp: row index out of range");
      for (const auto& [r, v] : col.entries) {
        if (r >= num_rows) throw std::invalid_argument("lp: row index out of range");
        if (v == 0 || v == 1) throw std::invalid_argument("lp: column entry not normalized");
      }
    }
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

// The standard form the solver actually works on: all variables >= 0, rows
// A x = b. Original variables come first (shifted by their lower bounds),
// followed by one slack per finite upper bound; each finite upper bound adds
// the row  x_j + s_j = upper_j - lower_j.  Certificates in LpOutcome refer to
// this row/column space.
struct LpStandardForm {
  std::size_t num_rows = 0;
  std::size_t num_structural = 0; // original variable count
  std::vector<LpColumn> columns;
  RationalVector rhs;
  RationalVector objective;
  Rational objective_shift; // c . lower
};

inline LpStandardForm standardize(const LinearProgram& lp) {
  lp.validate();
  LpStandardForm sf;
  sf.num_structural = lp.num_cols();
  const bool has_lower = !lp.lower.empty();
  const bool has_upper = !lp.upper.empty();
  std::size_t extra = 0;
  if (has_upper)
    for (const auto& u : lp.upper)
      if (u) ++extra;
  sf.num_rows = lp.num_rows + extra;
  sf.rhs = lp.rhs;
  sf.rhs.resize(sf.num_rows, Rational(0));
  sf.columns = lp.columns;
  sf.columns.reserve(lp.num_cols() + extra);
  sf.objective = lp.objective;
  sf.objective.resize(lp.num_cols() + extra, Rational(0));
  sf.objective_shift = 0;

  // Shift by lower bounds: b -= A.lower, track the objective offset.
  if (has_lower) {
    for (std::size_t j = 0; j < lp.num_cols(); ++j) {
      const Rational& l = lp.lower[j];
      if (l == 0) continue;
      sf.objective_shift += lp.objective[j] * l;
      for (auto r : lp.columns[j].unit_rows) sf.rhs[r] -= l;
      for (const auto& [r, v] : lp.columns[j].entries) sf.rhs[r] -= v * l;
    }
  }
  // One slack row per finite upper bound.
  std::size_t next_row = lp.num_rows;
  for (std::size_t j = 0; has_upper && j < lp.num_cols(); ++j) {
    if (!lp.upper[j]) continue;
    const Rational l = has_lower ? lp.lower[j] : Rational(0);
    const Rational range = *lp.upper[j] - l;
    if (range < 0) {
      // Empty box; encode as an unsatisfiable row  x_j + s = range < 0.
    }
    sf.columns[j].add(std::uint32_t(next_row), Rational(1));
    LpColumn slack;
    slack.add(std::uint32_t(next_row), Rational(1));
    sf.columns.push_back(std::move(slack));
    sf.rhs[next_row] = range;
    ++next_row;
  }
  return sf;
}

struct LpOutcome {
  LpStatus status = LpStatus::optimal;
  Rational value;           // optimal: c.z at the witness
  RationalVector solution;  // optimal: witness over the original variables
  RationalVector dual;      // optimal: y over standard-form rows, c_j - y.A_j >= 0
  RationalVector farkas;    // infeasible: y over standard-form rows, y.A_j <= 0, y.b > 0
  RationalVector ray;       // unbounded: d over original variables, A d = 0, d >= 0, c.d < 0
  std::uint64_t iterations = 0;
};

struct LpOptions {
  std::size_t max_columns = 200000;
  std::uint64_t max_iterations = 5'000'000;
};

namespace detail {

// Revised simplex with Bland's rule over exact rationals. Artificial columns
// never re-enter; zero-level artificials may stay basic, and the ratio test
// pins them at zero by allowing a degenerate pivot on any nonzero entry.
class SimplexSolver {
public:
  SimplexSolver(const LpStandardForm& sf, const LpOptions& opt) : sf_(sf), opt_(opt) {
    m_ = sf.num_rows;
    n_ = sf.columns.size();
  }

  LpOutcome run() {
    init();
    // Phase 1: minimize the artificial sum.
    phase1_ = true;
    iterate();
    Rational infeas = 0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= int(n_)) infeas += x_[i];
    LpOutcome out;
    out.iterations = iterations_;
    if (infeas > 0) {
      out.status = LpStatus::infeasible;
      out.farkas = dual_vector();
      return out;
    }
    // Phase 2: the real objective.
    phase1_ = false;
    const bool bounded = iterate();
    out.iterations = iterations_;
    if (!bounded) {
      out.status = LpStatus::unbounded;
      out.ray.assign(sf_.num_structural, Rational(0));
      if (ray_entering_ < sf_.num_structural) out.ray[ray_entering_] = 1;
      for (std::size_t i = 0; i < m_; ++i) {
        const int bj = basis_[i];
        if (bj >= 0 && bj < int(sf_.num_structural) && ray_dir_[i] != 0)
          out.ray[std::size_t(bj)] = -ray_dir_[i];
      }
      return out;
    }
    out.status = LpStatus::optimal;
    out.solution.assign(sf_.num_structural, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) {
      const int bj = basis_[i];
      if (bj >= 0 && bj < int(sf_.num_structural)) out.solution[std::size_t(bj)] = x_[i];
    }
    out.value = 0;
    for (std::size_t j = 0; j < sf_.num_structural; ++j)
      if (out.solution[j] != 0) out.value += sf_.objective[j] * out.solution[j];
    out.dual = dual_vector();
    return out;
  }

private:
  void init() {
    basis_.resize(m_);
    x_.resize(m_);
    binv_.assign(m_, RationalVector(m_, Rational(0)));
    in_basis_.assign(n_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = int(n_ + i);
      const int s = sf_.rhs[i] < 0 ? -1 : 1;
      binv_[i][i] = s; // initial basis = diag(sign), its own inverse
      x_[i] = s * sf_.rhs[i];
    }
  }

  // One simplex phase. Returns false iff unbounded.
  bool iterate() {
    RationalVector y(m_);
    std::vector<Integer> ynum(m_);
    RationalVector d(m_);
    while (true) {
      if (++iterations_ > opt_.max_iterations)
        throw std::runtime_error("lp: iteration limit exceeded");
      compute_y(y);
      // Common denominator of y, for integer pricing of 0/1 columns.
      Integer den = 1;
      for (std::size_t i = 0; i < m_; ++i) den = lcm(den, y[i].get_den());
      for (std::size_t i = 0; i < m_; ++i) {
        if (y[i] == 0)
          ynum[i] = 0;
        else {
          Integer scale;
          mpz_divexact(scale.get_mpz_t(), den.get_mpz_t(), y[i].get_den().get_mpz_t());
          ynum[i] = y[i].get_num() * scale;
        }
      }
      // Bland: first column (lowest index) with negative reduced cost.
      std::size_t enter = n_;
      Integer acc;
      for (std::size_t j = 0; j < n_; ++j) {
        if (in_basis_[j]) continue;
        const LpColumn& col = sf_.columns[j];
        if (!col.entries.empty()) {
          // Rational path for columns with non-unit entries.
          Rational red = cost(j);
          for (auto r : col.unit_rows) red -= y[r];
          for (const auto& [r, v] : col.entries) red -= y[r] * v;
          if (red < 0) { enter = j; break; }
          continue;
        }
        acc = 0;
        for (auto r : col.unit_rows) acc += ynum[r];
        const Rational& cj = cost(j);
        // reduced = cj - acc/den < 0  <=>  cj*den < acc  (den > 0)
        bool negative;
        if (cj == 0)
          negative = acc > 0;
        else
          negative = cmp(Integer(cj.get_num() * den), Integer(acc * cj.get_den())) < 0;
        if (negative) { enter = j; break; }
      }
      if (enter == n_) return true; // optimal for this phase

      // Direction d = B^-1 A_enter.
      const LpColumn& col = sf_.columns[enter];
      for (std::size_t i = 0; i < m_; ++i) {
        Rational s = 0;
        for (auto r : col.unit_rows)
          if (binv_[i][r] != 0) s += binv_[i][r];
        for (const auto& [r, v] : col.entries)
          if (binv_[i][r] != 0) s += binv_[i][r] * v;
        d[i] = s;
      }
      // Ratio test (Bland tie-break on basis column id). Zero-level basic
      // artificials must stay at zero: any nonzero pivot entry on such a row
      // allows a degenerate pivot.
      std::size_t leave = m_;
      Rational theta;
      bool have = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const bool artificial = basis_[i] >= int(n_);
        bool candidate = false;
        Rational ratio;
        if (d[i] > 0) {
          ratio = x_[i] / d[i];
          candidate = true;
        } else if (artificial && d[i] != 0 && x_[i] == 0) {
          ratio = 0;
          candidate = true;
        }
        if (!candidate) continue;
        if (!have || ratio < theta ||
            (ratio == theta && basis_[i] < basis_[leave])) {
          theta = ratio;
          leave = i;
          have = true;
        }
      }
      if (!have) {
        if (phase1_) throw std::logic_error("lp: phase-1 unbounded");
        ray_entering_ = enter;
        ray_dir_ = d;
        return false;
      }
      pivot(enter, leave, d, theta);
    }
  }

  const Rational& cost(std::size_t j) const {
    static const Rational zero(0);
    return phase1_ ? zero : sf_.objective[j];
  }

  void compute_y(RationalVector& y) {
    for (std::size_t k = 0; k < m_; ++k) y[k] = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      Rational ci;
      if (phase1_)
        ci = basis_[i] >= int(n_) ? Rational(1) : Rational(0);
      else
        ci = basis_[i] < int(n_) ? sf_.objective[std::size_t(basis_[i])]
                                 : Rational(0);
      if (ci == 0) continue;
      const RationalVector& row = binv_[i];
      for (std::size_t k = 0; k < m_; ++k)
        if (row[k] != 0) y[k] += ci * row[k];
    }
  }

  RationalVector dual_vector() {
    RationalVector y(m_);
    compute_y(y);
    return y;
  }

  void pivot(std::size_t enter, std::size_t leave, const RationalVector& d,
             const Rational& theta) {
    const int leaving_col = basis_[leave];
    if (leaving_col < int(n_)) in_basis_[std::size_t(leaving_col)] = 0;
    basis_[leave] = int(enter);
    in_basis_[enter] = 1;
    if (theta != 0)
      for (std::size_t i = 0; i < m_; ++i)
        if (d[i] != 0) x_[i] -= theta * d[i];
    x_[leave] = theta;
    const Rational pivinv = 1 / d[leave];
    RationalVector& prow = binv_[leave];
    for (auto& v : prow)
      if (v != 0) v *= pivinv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == leave || d[i] == 0) continue;
      const Rational f = d[i];
      RationalVector& row = binv_[i];
      for (std::size_t k = 0; k < m_; ++k)
        if (prow[k] != 0) row[k] -= f * prow[k];
    }
  }

  const LpStandardForm& sf_;
  const LpOptions& opt_;
  std::size_t m_ = 0, n_ = 0;
  bool phase1_ = true;
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  RationalVector x_;
  std::vector<RationalVector> binv_;
  std::uint64_t iterations_ = 0;
  std::size_t ray_entering_ = 0;
  RationalVector ray_dir_;
};

} // namespace detail

// Exact LP solve: optimal value with a witness and a verifying dual, an exact
// Farkas certificate on infeasibility, or an improving ray on unboundedness.
// Deterministic for a fixed input (Bland's pivoting rule throughout).
inline LpOutcome solve(const LinearProgram& lp, const LpOptions& options = {}) {
  if (lp.num_cols() > options.max_columns)
    throw guard_error("lp: column count " + std::to_string(lp.num_cols()) +
                      " exceeds the configured limit " + std::to_string(options.max_columns));
  const LpStandardForm sf = standardize(lp);
  detail::SimplexSolver solver(sf, options);
  LpOutcome out = solver.run();
  if (out.status == LpStatus::optimal) {
    out.value += sf.objective_shift;
    if (!lp.lower.empty())
      for (std::size_t j = 0; j < out.solution.size(); ++j)
        out.solution[j] += lp.lower[j];
  }
  return out;
}

} // namespace causalbell
