#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace rcgan {

/// Worker-count setting shared by the Monte Carlo routines. Results never
/// depend on `threads`: work is partitioned by index and reduced in a fixed
/// order.
struct Exec {
  unsigned threads = 1;  // 0 selects std::thread::hardware_concurrency()
};

/// Runs body(begin, end) over disjoint chunks of [0, n).
void parallel_for(std::size_t n, const Exec& exec,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of `values`.
double pairwise_sum(std::span<const double> values);

struct SampleSummary {
  double mean = 0.0;
  double std_dev = 0.0;    // with Bessel correction
  double std_error = 0.0;  // std_dev / sqrt(n)
  std::size_t n = 0;
};

SampleSummary summarize(std::span<const double> values);

}  // namespace rcgan
