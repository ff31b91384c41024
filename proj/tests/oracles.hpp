#pragma once

// Test-only reference computations. Nothing here calls into the library's
// Lorenz, linear-programming or conversion code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

/// Lorenz function by exhaustion: L[w](s) is the largest value at s of the
/// cumulative (sum g, sum w) polyline over every ordering of the levels.
template <class T>
T lorenz_by_permutations(const std::vector<T>& w, const std::vector<T>& g, const T& s) {
  std::vector<std::size_t> perm(w.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  bool first = true;
  T best(0);
  do {
    T cs(0), ct(0), value(0);
    bool placed = false;
    for (std::size_t k = 0; k < perm.size() && !placed; ++k) {
      const T ns = cs + g[perm[k]];
      const T nt = ct + w[perm[k]];
      if (s <= ns) {
        value = ct + (nt - ct) * (s - cs) / (ns - cs);
        placed = true;
      }
      cs = ns;
      ct = nt;
    }
    if (!placed) value = ct;
    if (first || value > best) best = value;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Every subset sum of g over nonempty proper subsets, by brute force over
/// permutations and prefix lengths.
template <class T>
std::vector<T> prefix_sums_over_permutations(const std::vector<T>& g) {
  std::vector<std::size_t> perm(g.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<T> out;
  do {
    T acc(0);
    for (std::size_t k = 0; k + 1 < perm.size(); ++k) {
      acc += g[perm[k]];
      out.push_back(acc);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(out.begin(), out.end());
  return out;
}

/// Shannon-style free energy with natural logs, 0 ln 0 = 0.
inline double free_energy(const std::vector<double>& u, const std::vector<double>& energies, double beta) {
  double f = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] > 0) f += u[i] * (energies[i] + std::log(u[i]) / beta);
  return f;
}

}  // namespace oracle
