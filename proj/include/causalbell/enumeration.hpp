#pragma once

#include "causalbell/dag.hpp"
#include "causalbell/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace causalbell {

struct ClassInfo {
  IoBdag representative; // equals its own canonical_form
  int level = 0;
  int orbit = 0;
  bool chain_boring = false;
};

// All IO BDAG classes for N parties up to party permutation, sorted by
// (level, representative). Exhaustive generation over the 2^{N(N-1)} in-set
// assignments with canonical-form deduplication; N is capped at 6.
inline std::vector<ClassInfo> enumerate_classes(int parties) {
  if (parties < 2) throw std::invalid_argument("enumerate_classes: need at least two parties");
  if (parties > 6)
    throw guard_error("enumerate_classes: refusing more than six parties "
                      "(2^{N(N-1)} assignments)");
  const int n = parties;

  // Assignments as per-party bit masks over the party set; bit i of mask[i] is
  // forced. Permutations act by relabeling both positions and bits.
  std::vector<std::vector<int>> perms;
  {
    std::vector<int> p(std::size_t(n));
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  const auto permute_mask = [n](std::uint32_t mask, const std::vector<int>& p) {
    std::uint32_t out = 0;
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) out |= 1u << p[std::size_t(j)];
    return out;
  };

  using Assignment = std::vector<std::uint32_t>;
  const auto canonical = [&](const Assignment& a) {
    Assignment best = a;
    Assignment img(a.size());
    for (const auto& p : perms) {
      for (int i = 0; i < n; ++i)
        img[std::size_t(p[std::size_t(i)])] = permute_mask(a[std::size_t(i)], p);
      if (img < best) best = img;
    }
    return best;
  };

  // The free bits per party are everyone else's inputs.
  const std::uint64_t per_party = 1ull << (n - 1);
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= per_party;

  std::set<Assignment> seen;
  Assignment a(std::size_t(n));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    for (int i = 0; i < n; ++i) {
      const std::uint32_t free_bits = std::uint32_t(rest % per_party);
      rest /= per_party;
      // Spread the free bits over positions != i.
      std::uint32_t mask = 1u << i;
      int b = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (free_bits & (1u << b)) mask |= 1u << j;
        ++b;
      }
      a[std::size_t(i)] = mask;
    }
    seen.insert(canonical(a));
  }

  std::vector<ClassInfo> out;
  out.reserve(seen.size());
  for (const Assignment& masks : seen) {
    std::vector<std::vector<int>> sets(std::size_t(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (masks[std::size_t(i)] & (1u << j)) sets[std::size_t(i)].push_back(j);
    ClassInfo info{IoBdag(std::move(sets)), 0, 0, false};
    info.level = info.representative.level();
    info.orbit = orbit_size(info.representative);
    info.chain_boring = is_chain_boring(info.representative);
    out.push_back(std::move(info));
  }
  std::sort(out.begin(), out.end(), [](const ClassInfo& x, const ClassInfo& y) {
    if (x.level != y.level) return x.level < y.level;
    return x.representative < y.representative;
  });
  return out;
}

inline std::vector<int> level_histogram(const std::vector<ClassInfo>& classes) {
  int max_level = 0;
  for (const auto& c : classes) max_level = std::max(max_level, c.level);
  std::vector<int> hist(std::size_t(max_level) + 1, 0);
  for (const auto& c : classes) ++hist[std::size_t(c.level)];
  return hist;
}

// Directed edges (i, j) between class indices: class j's in-sets pointwise
// contain class i's, after some relabeling of j's parties. Optionally reduced
// to the transitive reduct.
inline std::vector<std::pair<int, int>> hierarchy_edges(const std::vector<ClassInfo>& classes,
                                                        bool transitive_reduct = false) {
  const int m = int(classes.size());
  auto contains = [](const IoBdag& big, const IoBdag& small) {
    for (int i = 0; i < big.num_parties(); ++i) {
      const auto& b = big.in_set(i);
      for (int v : small.in_set(i))
        if (!std::binary_search(b.begin(), b.end(), v)) return false;
    }
    return true;
  };
  std::vector<std::vector<char>> edge(std::size_t(m), std::vector<char>(std::size_t(m), 0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      if (classes[std::size_t(j)].level <= classes[std::size_t(i)].level) continue;
      bool found = false;
      detail::for_each_permutation(classes[std::size_t(j)].representative.num_parties(),
                                   [&](const std::vector<int>& perm) {
                                     if (found) return;
                                     if (contains(classes[std::size_t(j)].representative.permuted(perm),
                                                  classes[std::size_t(i)].representative))
                                       found = true;
                                   });
      if (found) edge[std::size_t(i)][std::size_t(j)] = 1;
    }
  if (transitive_reduct) {
    // The containment relation is transitive, so two-step paths in the full
    // relation witness every redundant edge.
    const auto closed = edge;
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        if (!closed[std::size_t(i)][std::size_t(k)]) continue;
        for (int j = 0; j < m; ++j)
          if (closed[std::size_t(k)][std::size_t(j)]) edge[std::size_t(i)][std::size_t(j)] = 0;
      }
  }
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (edge[std::size_t(i)][std::size_t(j)]) out.emplace_back(i, j);
  return out;
}

inline std::string classes_to_csv(const std::vector<ClassInfo>& classes) {
  std::ostringstream os;
  os << "level,representative,orbit_size,chain_boring\n";
  for (const auto& c : classes)
    os << c.level << ",\"" << to_string(c.representative) << "\"," << c.orbit << ","
       << (c.chain_boring ? "yes" : "no") << "\n";
  return os.str();
}

inline std::string classes_to_text(const std::vector<ClassInfo>& classes) {
  std::ostringstream os;
  for (const auto& c : classes)
    os << "level " << c.level << "  " << to_string(c.representative) << "  orbit "
       << c.orbit << (c.chain_boring ? "  boring (chain witness)" : "") << "\n";
  return os.str();
}

} // namespace causalbell
