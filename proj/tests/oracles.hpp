#pragma once

// Brute-force reference computations used by the unit and acceptance
// suites. Written straight from the formulas, sharing no code with the
// library beyond its public data types.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Ranking = std::vector<std::pair<std::string, double>>;

inline Ranking sort_canonical(Ranking r) {
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return r;
}

// For every document in any list: look up its rank in each list by linear
// scan, then add 1/(k + rank) from the best rank to the worst.
inline Ranking rrf(const std::vector<std::vector<std::string>>& lists, double k, std::size_t n) {
  std::set<std::string> docs;
  for (const auto& l : lists) docs.insert(l.begin(), l.end());
  Ranking out;
  for (const auto& d : docs) {
    std::vector<std::size_t> ranks;
    for (const auto& l : lists) {
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i] == d) ranks.push_back(i + 1);
      }
    }
    std::sort(ranks.begin(), ranks.end());
    double s = 0;
    for (auto r : ranks) s += 1.0 / (k + static_cast<double>(r));
    out.emplace_back(d, s);
  }
  out = sort_canonical(out);
  if (out.size() > n) out.resize(n);
  return out;
}

// Row sums of a preference matrix, entries added in ascending order.
inline Ranking pairwise_row_sums(const std::vector<std::string>& ids,
                                 const std::vector<std::vector<double>>& p) {
  Ranking out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::multiset<double> row;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (i != j) row.insert(p[i][j]);
    }
    double s = 0;
    for (double v : row) s += v;
    out.emplace_back(ids[i], s);
  }
  return sort_canonical(out);
}

// Average linkage recomputed from member lists at every step: all cluster
// pairs are scanned, the best pair (lowest indices on ties) is merged while
// its mean member similarity is at least the threshold.
inline std::vector<std::vector<std::size_t>> agglomerative(
    const std::vector<std::vector<double>>& sim, double threshold, std::size_t min_size = 1) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < sim.size(); ++i) groups.push_back({i});
  auto avg = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double s = 0;
    for (auto x : a)
      for (auto y : b) s += sim[x][y];
    return s / static_cast<double>(a.size() * b.size());
  };
  auto merge = [&](std::size_t a, std::size_t b) {
    auto lo = std::min(a, b), hi = std::max(a, b);
    groups[lo].insert(groups[lo].end(), groups[hi].begin(), groups[hi].end());
    std::sort(groups[lo].begin(), groups[lo].end());
    groups.erase(groups.begin() + static_cast<long>(hi));
  };
  for (;;) {
    if (groups.size() < 2) break;
    double best = -1e300;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < groups.size(); ++a)
      for (std::size_t b = a + 1; b < groups.size(); ++b)
        if (avg(groups[a], groups[b]) > best) {
          best = avg(groups[a], groups[b]);
          ba = a;
          bb = b;
        }
    if (best < threshold) break;
    merge(ba, bb);
  }
  for (;;) {
    if (groups.size() < 2) break;
    std::size_t small = groups.size();
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (groups[i].size() < min_size && (small == groups.size() || groups[i].size() < groups[small].size()))
        small = i;
    if (small == groups.size()) break;
    double best = -1e300;
    std::size_t near = 0;
    for (std::size_t j = 0; j < groups.size(); ++j)
      if (j != small && avg(groups[small], groups[j]) > best) {
        best = avg(groups[small], groups[j]);
        near = j;
      }
    merge(small, near);
  }
  return groups;
}

inline double recall(const std::vector<std::string>& run, const std::set<std::string>& relevant,
                     std::size_t k) {
  std::size_t hits = 0;
  for (const auto& r : relevant) {
    for (std::size_t i = 0; i < run.size() && i < k; ++i) {
      if (run[i] == r) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

inline double v_strict(const std::vector<bool>& vital, const std::vector<bool>& supported) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < vital.size(); ++i) {
    if (vital[i]) {
      den += 1;
      num += supported[i] ? 1 : 0;
    }
  }
  return num / den;
}

}  // namespace oracle
