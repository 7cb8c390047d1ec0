#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rcgan/linops.hpp"

namespace rcgan {

/// Sampling mask file. Pixel masks start with `N=<dim>`, Fourier masks with
/// `DIMS=<h>x<w>`; the remaining lines hold one kept index each, strictly
/// increasing.
struct MaskSpec {
  enum class Kind { pixel, fourier };

  Kind kind = Kind::pixel;
  std::size_t n = 0;  // pixel masks
  std::size_t h = 0, w = 0;  // Fourier masks
  std::vector<std::size_t> kept;

  std::size_t ambient_dim() const { return kind == Kind::pixel ? n : h * w; }
  std::unique_ptr<LinearOperator> make_operator() const;
};

MaskSpec read_mask(std::istream& in);
MaskSpec read_mask_file(const std::string& path);
void write_mask(std::ostream& out, const MaskSpec& mask);

}  // namespace rcgan
