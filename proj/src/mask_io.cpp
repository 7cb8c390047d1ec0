#include "rcgan/mask_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace rcgan {
namespace {

std::string trimmed(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_size(const std::string& text, const std::string& context) {
  std::size_t v = 0;
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(text.data(), last, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error("mask: malformed " + context + " '" + text + "'");
  }
  return v;
}

}  // namespace

std::unique_ptr<LinearOperator> MaskSpec::make_operator() const {
  if (kind == Kind::pixel) return std::make_unique<MaskOperator>(n, kept);
  return std::make_unique<FourierSubsampler>(h, w, kept);
}

MaskSpec read_mask(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("mask: empty file");
  line = trimmed(line);
  MaskSpec mask;
  if (line.rfind("N=", 0) == 0) {
    mask.kind = MaskSpec::Kind::pixel;
    mask.n = parse_size(line.substr(2), "dimension");
  } else if (line.rfind("DIMS=", 0) == 0) {
    mask.kind = MaskSpec::Kind::fourier;
    const std::string dims = line.substr(5);
    const auto x = dims.find('x');
    if (x == std::string::npos) throw std::runtime_error("mask: DIMS must be <h>x<w>");
    mask.h = parse_size(dims.substr(0, x), "height");
    mask.w = parse_size(dims.substr(x + 1), "width");
  } else {
    throw std::runtime_error("mask: first line must be N=<dim> or DIMS=<h>x<w>");
  }
  if (mask.ambient_dim() == 0) throw std::runtime_error("mask: zero dimension");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trimmed(line);
    if (line.empty()) continue;
    const std::size_t idx = parse_size(line, "index on line " + std::to_string(line_no));
    if (idx >= mask.ambient_dim()) {
      throw std::runtime_error("mask: index out of range on line " +
                               std::to_string(line_no));
    }
    if (!mask.kept.empty() && idx <= mask.kept.back()) {
      throw std::runtime_error("mask: indices must be sorted and unique (line " +
                               std::to_string(line_no) + ")");
    }
    mask.kept.push_back(idx);
  }
  return mask;
}

MaskSpec read_mask_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mask file '" + path + "'");
  return read_mask(in);
}

void write_mask(std::ostream& out, const MaskSpec& mask) {
  if (mask.kind == MaskSpec::Kind::pixel) {
    out << "N=" << mask.n << '\n';
  } else {
    out << "DIMS=" << mask.h << 'x' << mask.w << '\n';
  }
  for (std::size_t k : mask.kept) out << k << '\n';
}

}  // namespace rcgan
