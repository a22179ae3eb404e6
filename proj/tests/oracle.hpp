#pragma once

// Brute-force reference computations written directly from the definitions,
// sharing nothing with the library beyond plain data. Paths are lists of
// (time, state) pairs; a time-0 entry holds the initial state.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

struct Path {
  int initial;
  std::vector<std::pair<double, int>> jumps;
  double w;

  int at(double t) const {
    int s = initial;
    for (auto [u, k] : jumps) {
      if (u <= t) s = k;
    }
    return s;
  }
  int before(double t) const {
    int s = initial;
    for (auto [u, k] : jumps) {
      if (u < t) s = k;
    }
    return s;
  }
};

/// The illness-death reference law: 1 -> 2 at t=1 or t=2 w.p. 1/2 each time,
/// 2 -> 3 at t=3 w.p. 0.8 after entry at 1 and 0.2 after entry at 2.
inline std::vector<Path> idn() {
  return {
      {1, {{1, 2}, {3, 3}}, 0.5 * 0.8},
      {1, {{1, 2}}, 0.5 * 0.2},
      {1, {{2, 2}, {3, 3}}, 0.25 * 0.2},
      {1, {{2, 2}}, 0.25 * 0.8},
      {1, {}, 0.25},
  };
}

inline double prob(const std::vector<Path>& ps, const std::function<bool(const Path&)>& event) {
  double p = 0.0;
  for (const auto& x : ps) {
    if (event(x)) p += x.w;
  }
  return p;
}

inline double occupation(const std::vector<Path>& ps, int j, double t) {
  return prob(ps, [&](const Path& x) { return x.at(t) == j; });
}

inline double occupation_before(const std::vector<Path>& ps, int j, double t) {
  return prob(ps, [&](const Path& x) { return x.before(t) == j; });
}

/// P(U(t) = k | U(s) = j) for the half-open interval (s, t].
inline double transition(const std::vector<Path>& ps, int j, int k, double s, double t) {
  const double den = occupation(ps, j, s);
  if (den == 0.0) return j == k ? 1.0 : 0.0;
  return prob(ps, [&](const Path& x) { return x.at(s) == j && x.at(t) == k; }) / den;
}

/// Expected number of direct j -> k jumps at time u.
inline double jumps_at(const std::vector<Path>& ps, int j, int k, double u) {
  double e = 0.0;
  for (const auto& x : ps) {
    if (x.before(u) == j && x.at(u) == k) e += x.w;
  }
  return e;
}

/// Hazard atom of j -> k at u.
inline double hazard_atom(const std::vector<Path>& ps, int j, int k, double u) {
  const double den = occupation_before(ps, j, u);
  return den == 0.0 ? 0.0 : jumps_at(ps, j, k, u) / den;
}

using Mat = std::vector<std::vector<double>>;

inline Mat multiply(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

/// Ordered product of (1 + dLambda(u)) over the atoms u in `times`.
inline Mat hazard_product(const std::vector<Path>& ps, int d, const std::vector<double>& times) {
  Mat acc(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i) acc[i][i] = 1.0;
  for (double u : times) {
    Mat f(d, std::vector<double>(d, 0.0));
    for (int j = 1; j <= d; ++j) {
      double exit = 0.0;
      for (int k = 1; k <= d; ++k) {
        if (k == j) continue;
        f[j - 1][k - 1] = hazard_atom(ps, j, k, u);
        exit += f[j - 1][k - 1];
      }
      f[j - 1][j - 1] = 1.0 - exit;
    }
    acc = multiply(acc, f);
  }
  return acc;
}

}  // namespace oracle
