#pragma once

#include <Eigen/Core>
#include <cstddef>

namespace rcgan {

/// Complex image or signal, flattened row-major for 2D shapes.
using ComplexVector = Eigen::VectorXcd;

/// Unitary DFT, X[k] = N^{-1/2} Σ_n x[n] exp(-2πi kn/N). Power-of-two
/// lengths use an iterative radix-2 FFT; other lengths are evaluated directly.
void unitary_dft_inplace(ComplexVector& x, bool inverse);

/// Separable 2D unitary DFT of a row-major h x w array.
void unitary_dft2_inplace(ComplexVector& x, std::size_t h, std::size_t w,
                          bool inverse);

/// Direct O(N²) evaluation, always available.
ComplexVector direct_dft(const ComplexVector& x, bool inverse);

bool is_power_of_two(std::size_t n);

}  // namespace rcgan
