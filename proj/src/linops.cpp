#include "rcgan/linops.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rcgan {
namespace {

void validate_indices(const std::vector<std::size_t>& idx, std::size_t n,
                      const char* who) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= n) {
      throw std::invalid_argument(std::string(who) + ": index " +
                                  std::to_string(idx[i]) + " out of range");
    }
    if (i > 0 && idx[i] <= idx[i - 1]) {
      throw std::invalid_argument(std::string(who) +
                                  ": indices must be strictly increasing");
    }
  }
}

void require_size(const ComplexVector& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw std::invalid_argument(std::string("dimension mismatch: ") + what +
                                " has length " + std::to_string(v.size()) +
                                ", expected " + std::to_string(n));
  }
}

}  // namespace

void LinearOperator::check_input(const ComplexVector& x) const {
  require_size(x, input_dim(), "input");
}

void LinearOperator::check_output(const ComplexVector& y) const {
  require_size(y, output_dim(), "measurement");
}

MaskOperator::MaskOperator(std::size_t ambient_dim, std::vector<std::size_t> kept)
    : n_(ambient_dim), kept_(std::move(kept)) {
  if (n_ == 0) throw std::invalid_argument("MaskOperator: ambient dimension is 0");
  validate_indices(kept_, n_, "MaskOperator");
}

ComplexVector MaskOperator::apply(const ComplexVector& x) const {
  check_input(x);
  ComplexVector y(static_cast<Eigen::Index>(kept_.size()));
  for (std::size_t i = 0; i < kept_.size(); ++i) y[i] = x[kept_[i]];
  return y;
}

ComplexVector MaskOperator::pinv_apply(const ComplexVector& y) const {
  check_output(y);
  ComplexVector x = ComplexVector::Zero(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < kept_.size(); ++i) x[kept_[i]] = y[i];
  return x;
}

ComplexVector MaskOperator::nullspace_project(const ComplexVector& x) const {
  check_input(x);
  ComplexVector out = x;
  for (std::size_t k : kept_) out[k] = 0.0;
  return out;
}

FourierSubsampler::FourierSubsampler(std::size_t h, std::size_t w,
                                     std::vector<std::size_t> kept)
    : h_(h), w_(w), kept_(std::move(kept)) {
  if (h_ == 0 || w_ == 0) throw std::invalid_argument("FourierSubsampler: empty shape");
  validate_indices(kept_, h_ * w_, "FourierSubsampler");
}

ComplexVector FourierSubsampler::measure(const ComplexVector& x) const {
  check_input(x);
  ComplexVector k = x;
  unitary_dft2_inplace(k, h_, w_, false);
  ComplexVector y(static_cast<Eigen::Index>(kept_.size()));
  for (std::size_t i = 0; i < kept_.size(); ++i) y[i] = k[kept_[i]];
  return y;
}

ComplexVector FourierSubsampler::apply(const ComplexVector& x) const {
  const ComplexVector samples = measure(x);
  ComplexVector k = ComplexVector::Zero(x.size());
  for (std::size_t i = 0; i < kept_.size(); ++i) k[kept_[i]] = samples[i];
  unitary_dft2_inplace(k, h_, w_, true);
  return k;
}

ComplexVector FourierSubsampler::pinv_apply(const ComplexVector& y) const {
  check_output(y);
  return apply(y);
}

ComplexVector FourierSubsampler::nullspace_project(const ComplexVector& x) const {
  return x - apply(x);
}

BlockDiagonal::BlockDiagonal(std::shared_ptr<const LinearOperator> block,
                             std::size_t coils)
    : block_(std::move(block)), coils_(coils) {
  if (!block_) throw std::invalid_argument("BlockDiagonal: null block operator");
  if (coils_ == 0) throw std::invalid_argument("BlockDiagonal: coil count is 0");
}

template <class Fn>
ComplexVector BlockDiagonal::blockwise(const ComplexVector& v, std::size_t in,
                                       std::size_t out, Fn&& fn) const {
  ComplexVector result(static_cast<Eigen::Index>(coils_ * out));
  for (std::size_t c = 0; c < coils_; ++c) {
    const ComplexVector part =
        v.segment(static_cast<Eigen::Index>(c * in), static_cast<Eigen::Index>(in));
    result.segment(static_cast<Eigen::Index>(c * out),
                   static_cast<Eigen::Index>(out)) = fn(part);
  }
  return result;
}

ComplexVector BlockDiagonal::apply(const ComplexVector& x) const {
  check_input(x);
  return blockwise(x, block_->input_dim(), block_->output_dim(),
                   [&](const ComplexVector& p) { return block_->apply(p); });
}

ComplexVector BlockDiagonal::pinv_apply(const ComplexVector& y) const {
  check_output(y);
  return blockwise(y, block_->output_dim(), block_->input_dim(),
                   [&](const ComplexVector& p) { return block_->pinv_apply(p); });
}

ComplexVector BlockDiagonal::nullspace_project(const ComplexVector& x) const {
  check_input(x);
  return blockwise(x, block_->input_dim(), block_->input_dim(),
                   [&](const ComplexVector& p) { return block_->nullspace_project(p); });
}

ComplexVector data_consistency(const LinearOperator& A, const ComplexVector& x_raw,
                               const ComplexVector& y) {
  return A.nullspace_project(x_raw) + A.pinv_apply(y);
}

}  // namespace rcgan
