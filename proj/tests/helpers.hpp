#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "curvlab/sampling.hpp"
#include "curvlab/tensor.hpp"

namespace testutil {

inline double rel_diff(const curvlab::CurvTensor& a, const curvlab::CurvTensor& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

inline std::vector<double> gaussian_table(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> t(static_cast<std::size_t>(n) * n * n * n);
  for (auto& x : t) x = g(rng);
  return t;
}

inline double comp(const std::vector<double>& t, int n, int i, int j, int k, int l) {
  return t[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
}

// Q by direct index summation over the full component table.
inline std::vector<double> brute_force_q(const std::vector<double>& r, int n) {
  std::vector<double> q(r.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int p = 0; p < n; ++p)
            for (int w = 0; w < n; ++w) {
              s += comp(r, n, i, j, p, w) * comp(r, n, k, l, p, w);
              s += 2.0 * (comp(r, n, i, p, k, w) * comp(r, n, j, p, l, w) -
                          comp(r, n, i, p, l, w) * comp(r, n, j, p, k, w));
            }
          q[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = s;
        }
  return q;
}

}  // namespace testutil
