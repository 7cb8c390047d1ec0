#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "rcgan/fft.hpp"

namespace rcgan {

/// Noiseless linear forward model y = A x. Implementations are immutable and
/// safe to share across threads. Every method throws std::invalid_argument on
/// a dimension mismatch.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;

  virtual ComplexVector apply(const ComplexVector& x) const = 0;
  /// A⁺ y.
  virtual ComplexVector pinv_apply(const ComplexVector& y) const = 0;
  /// (I - A⁺A) x.
  virtual ComplexVector nullspace_project(const ComplexVector& x) const = 0;

 protected:
  void check_input(const ComplexVector& x) const;
  void check_output(const ComplexVector& y) const;
};

/// Row selector keeping `kept` entries of an N-vector (inpainting).
/// A⁺ zero-fills the discarded entries.
class MaskOperator final : public LinearOperator {
 public:
  MaskOperator(std::size_t ambient_dim, std::vector<std::size_t> kept);

  std::size_t input_dim() const override { return n_; }
  std::size_t output_dim() const override { return kept_.size(); }
  const std::vector<std::size_t>& kept() const { return kept_; }

  ComplexVector apply(const ComplexVector& x) const override;
  ComplexVector pinv_apply(const ComplexVector& y) const override;
  ComplexVector nullspace_project(const ComplexVector& x) const override;

 private:
  std::size_t n_;
  std::vector<std::size_t> kept_;
};

/// A = Fᴴ Mᵀ M F on an h x w grid (h = 1 for 1D), F the unitary DFT and M a
/// selector of `kept` flattened frequencies. A is an orthogonal projector,
/// so A⁺ = A and the nullspace projector is I - A.
class FourierSubsampler final : public LinearOperator {
 public:
  FourierSubsampler(std::size_t h, std::size_t w, std::vector<std::size_t> kept);
  static FourierSubsampler one_dimensional(std::size_t n,
                                           std::vector<std::size_t> kept) {
    return FourierSubsampler(1, n, std::move(kept));
  }

  std::size_t input_dim() const override { return h_ * w_; }
  std::size_t output_dim() const override { return h_ * w_; }
  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }
  const std::vector<std::size_t>& kept() const { return kept_; }

  ComplexVector apply(const ComplexVector& x) const override;
  ComplexVector pinv_apply(const ComplexVector& y) const override;
  ComplexVector nullspace_project(const ComplexVector& x) const override;

  /// M F x: the kept k-space samples.
  ComplexVector measure(const ComplexVector& x) const;

 private:
  std::size_t h_, w_;
  std::vector<std::size_t> kept_;
};

/// I_C ⊗ A: the same operator applied to each of C stacked coil images.
class BlockDiagonal final : public LinearOperator {
 public:
  BlockDiagonal(std::shared_ptr<const LinearOperator> block, std::size_t coils);

  std::size_t input_dim() const override { return coils_ * block_->input_dim(); }
  std::size_t output_dim() const override { return coils_ * block_->output_dim(); }
  std::size_t coils() const { return coils_; }

  ComplexVector apply(const ComplexVector& x) const override;
  ComplexVector pinv_apply(const ComplexVector& y) const override;
  ComplexVector nullspace_project(const ComplexVector& x) const override;

 private:
  template <class Fn>
  ComplexVector blockwise(const ComplexVector& v, std::size_t in, std::size_t out,
                          Fn&& fn) const;

  std::shared_ptr<const LinearOperator> block_;
  std::size_t coils_;
};

/// x̂ = (I - A⁺A) x_raw + A⁺ y: keeps the nullspace part of the raw output
/// and replaces the rest with what the measurement dictates. No denoising is
/// attempted, so noisy y is reproduced exactly.
ComplexVector data_consistency(const LinearOperator& A, const ComplexVector& x_raw,
                               const ComplexVector& y);

}  // namespace rcgan
