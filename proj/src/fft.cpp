#include "rcgan/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace rcgan {
namespace {

using cd = std::complex<double>;

/// exp(sign 2πi k/n), reducing k first so large products stay accurate.
cd twiddle(std::size_t k, std::size_t n, double sign) {
  const double angle = sign * 2.0 * std::numbers::pi *
                       static_cast<double>(k % n) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

void radix2(ComplexVector& a, bool inverse) {
  const std::size_t n = static_cast<std::size_t>(a.size());
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cd w = twiddle(k, len, sign);
        const cd u = a[start + k];
        const cd v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

ComplexVector direct_dft(const ComplexVector& x, bool inverse) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  const double sign = inverse ? 1.0 : -1.0;
  ComplexVector out(x.size());
  for (std::size_t k = 0; k < n; ++k) {
    cd acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += x[m] * twiddle(k * m, n, sign);
    out[k] = acc;
  }
  if (n > 0) out /= std::sqrt(static_cast<double>(n));
  return out;
}

void unitary_dft_inplace(ComplexVector& x, bool inverse) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  if (n <= 1) return;
  if (is_power_of_two(n)) {
    radix2(x, inverse);
    x /= std::sqrt(static_cast<double>(n));
  } else {
    x = direct_dft(x, inverse);
  }
}

void unitary_dft2_inplace(ComplexVector& x, std::size_t h, std::size_t w,
                          bool inverse) {
  if (static_cast<std::size_t>(x.size()) != h * w) {
    throw std::invalid_argument("unitary_dft2: size does not match shape");
  }
  ComplexVector line(static_cast<Eigen::Index>(w));
  for (std::size_t r = 0; r < h; ++r) {
    line = x.segment(static_cast<Eigen::Index>(r * w), static_cast<Eigen::Index>(w));
    unitary_dft_inplace(line, inverse);
    x.segment(static_cast<Eigen::Index>(r * w), static_cast<Eigen::Index>(w)) = line;
  }
  line.resize(static_cast<Eigen::Index>(h));
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t r = 0; r < h; ++r) line[r] = x[r * w + c];
    unitary_dft_inplace(line, inverse);
    for (std::size_t r = 0; r < h; ++r) x[r * w + c] = line[r];
  }
}

}  // namespace rcgan
