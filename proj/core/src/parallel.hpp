// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qdc::detail {

/// Calls fn(i) for every i in [0, n) on `workers` threads. Worker w takes the indices
/// congruent to w, so fn must write only to slot i. Rethrows the exception of the
/// lowest failing index.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = static_cast<std::size_t>(std::clamp(workers, 1, 256));
  if (w == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(w, n); ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Pairwise summation over a fixed split, so the result depends only on the values.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

struct MeanStats {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and sample standard deviation / sqrt(n).
inline MeanStats mean_stats(const std::vector<double>& v) {
  MeanStats s;
  const std::size_t n = v.size();
  if (n == 0) return s;
  s.mean = pairwise_sum(v.data(), n) / static_cast<double>(n);
  if (n < 2) return s;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - s.mean) * (v[i] - s.mean);
  const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  s.std_error = std::sqrt(var / static_cast<double>(n));
  return s;
}

}  // namespace qdc::detail
