#include "rcgan/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace rcgan {

void parallel_for(std::size_t n, const Exec& exec,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  unsigned workers = exec.threads == 0 ? std::thread::hardware_concurrency()
                                       : exec.threads;
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    body(0, n);
    return;
  }
  const std::size_t w = std::min<std::size_t>(workers, n);
  const std::size_t chunk = (n + w - 1) / w;
  std::vector<std::jthread> pool;
  pool.reserve(w);
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary out;
  out.n = values.size();
  if (out.n == 0) return out;
  // Offsets from the first value keep the mean of identical values exact.
  const double anchor = values.front();
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(),
                 [&](double v) { return v - anchor; });
  out.mean = anchor + pairwise_sum(sq) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  std::transform(values.begin(), values.end(), sq.begin(), [&](double v) {
    const double d = v - out.mean;
    return d * d;
  });
  out.std_dev = std::sqrt(pairwise_sum(sq) / static_cast<double>(out.n - 1));
  out.std_error = out.std_dev / std::sqrt(static_cast<double>(out.n));
  return out;
}

}  // namespace rcgan
