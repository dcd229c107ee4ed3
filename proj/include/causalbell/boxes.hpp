#pragma once

#include "causalbell/behavior.hpp"
#include "causalbell/dag.hpp"
#include "causalbell/linalg.hpp"
#include "causalbell/membership.hpp"

#include <atomic>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace causalbell {

struct BoxRecord {
  int id = 0;
  std::string label;
  Behavior behavior;
  bool claimed_extremal = false;
};

// True iff the tight constraints at the box (its zero entries together with
// all normalization and nonsignaling equalities) pin a zero-dimensional
// affine space, i.e. the box is an extremal point of the nonsignaling
// polytope.
inline bool verify_extremal(const Behavior& b) {
  const Scenario& s = b.scenario();
  const std::uint64_t d = s.dimension();
  const std::uint64_t block = s.joint_output_count();
  std::vector<std::vector<std::pair<std::uint32_t, int>>> rows;
  for (std::uint64_t x = 0; x < s.joint_input_count(); ++x) {
    std::vector<std::pair<std::uint32_t, int>> row;
    for (std::uint64_t a = 0; a < block; ++a) row.emplace_back(std::uint32_t(x * block + a), 1);
    rows.push_back(std::move(row));
  }
  for (auto& eq : ns_equality_rows(s)) rows.push_back(std::move(eq));
  for (std::uint64_t i = 0; i < d; ++i)
    if (b[i] == 0) rows.push_back({{std::uint32_t(i), 1}});
  RationalMatrix m(rows.size(), d);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [idx, sign] : rows[r]) m.at(r, idx) = sign;
  return rank_destructive(m) == d;
}

inline bool verify_extremal(const BoxRecord& box) { return verify_extremal(box.behavior); }

// Named behavior generators.

// p(a1 a2 a3 | x) = 1/4 when a1+a2+a3 = x1 x2 x3 (mod 2), else 0.
inline Behavior make_gyni_box() {
  const Scenario s = Scenario::uniform(3, 2, 2);
  RationalVector v(s.dimension(), Rational(0));
  const Rational quarter = make_rational(1, 4);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        for (int a1 = 0; a1 < 2; ++a1)
          for (int a2 = 0; a2 < 2; ++a2)
            for (int a3 = 0; a3 < 2; ++a3)
              if ((a1 ^ a2 ^ a3) == (x1 & x2 & x3))
                v[s.index(std::vector<int>{x1, x2, x3}, std::vector<int>{a1, a2, a3})] = quarter;
  return Behavior(s, std::move(v));
}

// p(a b | x y) = 1/2 when a+b = xy (mod 2).
inline Behavior make_pr_box() {
  const Scenario s = Scenario::uniform(2, 2, 2);
  RationalVector v(s.dimension(), Rational(0));
  const Rational half = make_rational(1, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) v[s.index(std::vector<int>{x, y}, std::vector<int>{a, b})] = half;
  return Behavior(s, std::move(v));
}

// Three PR boxes pairwise distributed among three parties with four outputs
// each; output components encoded first-factor-fastest. Maximal violator of
// the composed CHSH expression.
inline Behavior make_pr_product_box() {
  const Scenario s = Scenario::uniform(3, 2, 4);
  RationalVector v(s.dimension(), Rational(0));
  const Rational eighth = make_rational(1, 8);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        for (int a1 = 0; a1 < 2; ++a1)
          for (int a1p = 0; a1p < 2; ++a1p)
            for (int a2 = 0; a2 < 2; ++a2)
              for (int a2p = 0; a2p < 2; ++a2p)
                for (int a3 = 0; a3 < 2; ++a3)
                  for (int a3p = 0; a3p < 2; ++a3p) {
                    if ((a1 ^ a2) != (x1 & x2)) continue;  // PR on (A,B)
                    if ((a1p ^ a3) != (x1 & x3)) continue; // PR on (A',C)
                    if ((a2p ^ a3p) != (x2 & x3)) continue; // PR on (B',C')
                    const std::vector<int> x{x1, x2, x3};
                    const std::vector<int> a{a1 + 2 * a1p, a2 + 2 * a2p, a3 + 2 * a3p};
                    v[s.index(x, a)] = eighth;
                  }
  return Behavior(s, std::move(v));
}

// Local deterministic box: per party, a response table mapping each input to
// an output.
inline Behavior make_deterministic_box(const Scenario& s,
                                       const std::vector<std::vector<int>>& tables) {
  const int n = s.num_parties();
  if (int(tables.size()) != n)
    throw std::invalid_argument("deterministic box: one response table per party");
  for (int i = 0; i < n; ++i) {
    if (int(tables[std::size_t(i)].size()) != s.num_inputs(i))
      throw std::invalid_argument("deterministic box: table size must match input count");
    for (int a : tables[std::size_t(i)])
      if (a < 0 || a >= s.num_outputs(i))
        throw std::invalid_argument("deterministic box: output out of range");
  }
  RationalVector v(s.dimension(), Rational(0));
  std::vector<int> x(std::size_t(n)), a(std::size_t(n));
  for (std::uint64_t xf = 0; xf < s.joint_input_count(); ++xf) {
    s.unflatten_input(xf, x);
    for (int i = 0; i < n; ++i) a[std::size_t(i)] = tables[std::size_t(i)][std::size_t(x[std::size_t(i)])];
    v[s.index(x, a)] = 1;
  }
  return Behavior(s, std::move(v));
}

// The seven nonsignaling-interesting classes of the tripartite binary
// scenario, in hierarchy order (levels 0,1,2,2,2,3,3).
inline std::vector<IoBdag> noise_table_classes() {
  return {IoBdag({{0}, {1}, {2}}),       IoBdag({{0}, {0, 1}, {2}}),
          IoBdag({{0, 1}, {0, 1}, {2}}), IoBdag({{0}, {0, 1}, {0, 2}}),
          IoBdag({{0}, {0, 1}, {1, 2}}), IoBdag({{0, 1}, {0, 1}, {0, 2}}),
          IoBdag({{0, 2}, {0, 1}, {1, 2}})};
}

struct NoiseTable {
  std::vector<int> box_ids;
  std::vector<IoBdag> classes;
  std::vector<std::vector<Rational>> values; // [box][class]

  std::string to_csv() const {
    std::ostringstream os;
    os << "box";
    for (const IoBdag& io : classes) os << ",\"" << to_string(io) << "\"";
    os << "\n";
    for (std::size_t r = 0; r < box_ids.size(); ++r) {
      os << box_ids[r];
      for (const Rational& v : values[r]) os << "," << to_string(v);
      os << "\n";
    }
    return os.str();
  }
};

// The critical-noise grid: one exact LP per (box, class) cell. Cells are
// independent jobs; the assembly is deterministic regardless of the thread
// count.
inline NoiseTable reproduce_noise_table(const std::vector<BoxRecord>& boxes,
                                        const std::vector<IoBdag>& classes,
                                        unsigned jobs = 1,
                                        const MembershipOptions& options = {}) {
  NoiseTable table;
  table.classes = classes;
  for (const BoxRecord& b : boxes) table.box_ids.push_back(b.id);
  table.values.assign(boxes.size(), std::vector<Rational>(classes.size()));
  const std::size_t cells = boxes.size() * classes.size();
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= cells) return;
      const std::size_t r = cell / classes.size();
      const std::size_t c = cell % classes.size();
      table.values[r][c] = critical_noise(boxes[r].behavior, classes[c], options);
    }
  };
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  return table;
}

struct NoiseTableMismatch {
  int box_id = 0;
  std::string class_name;
  std::string expected;
  std::string computed;
};

// Exact string comparison against a reference CSV of the same shape
// (header "box,..." then one row per box id).
inline std::vector<NoiseTableMismatch> compare_noise_table(const NoiseTable& table,
                                                           const std::string& reference_csv) {
  std::vector<NoiseTableMismatch> mismatches;
  std::istringstream in(reference_csv);
  std::string line;
  if (!std::getline(in, line)) throw parse_error("noise reference: empty file");
  std::vector<std::vector<std::string>> ref_rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != table.classes.size() + 1)
      throw parse_error("noise reference: row '" + line + "' has wrong arity");
    ref_rows.push_back(std::move(fields));
  }
  if (ref_rows.size() != table.box_ids.size())
    throw parse_error("noise reference: row count mismatch");
  for (std::size_t r = 0; r < ref_rows.size(); ++r) {
    if (std::to_string(table.box_ids[r]) != ref_rows[r][0])
      throw parse_error("noise reference: box id mismatch at row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < table.classes.size(); ++c) {
      // Normalize the reference entry through exact parsing, then compare
      // reduced strings.
      const std::string expected = to_string(parse_rational(ref_rows[r][c + 1]));
      const std::string computed = to_string(table.values[r][c]);
      if (expected != computed)
        mismatches.push_back({table.box_ids[r], to_string(table.classes[c]), expected, computed});
    }
  }
  return mismatches;
}

} // namespace causalbell
