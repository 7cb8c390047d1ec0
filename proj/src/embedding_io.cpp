#include "rcgan/embedding_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcgan/format.hpp"

namespace rcgan {
namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'B', '1'};
constexpr std::uint8_t kDtypeF64 = 1;

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw std::runtime_error("EMB1: truncated file");
    }
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text) {
  std::size_t b = text.find_first_not_of(" \t\r");
  std::size_t e = text.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw std::runtime_error("CSV: empty cell");
  double v = 0.0;
  const char* first = text.data() + b;
  const char* last = text.data() + e + 1;
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error("CSV: malformed number '" + text + "'");
  }
  return v;
}

}  // namespace

void write_emb1(std::ostream& out, const Eigen::MatrixXd& M) {
  if (M.rows() > std::numeric_limits<std::uint32_t>::max() ||
      M.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("EMB1: matrix too large");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le(out, static_cast<std::uint64_t>(M.rows()), 4);
  put_le(out, static_cast<std::uint64_t>(M.cols()), 4);
  put_le(out, kDtypeF64, 1);
  put_le(out, 0, 3);
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      put_le(out, std::bit_cast<std::uint64_t>(M(r, c)), 8);
    }
  }
}

Eigen::MatrixXd read_emb1(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("EMB1: bad magic bytes");
  const auto rows = static_cast<Eigen::Index>(get_le(in, 4));
  const auto cols = static_cast<Eigen::Index>(get_le(in, 4));
  if (get_le(in, 1) != kDtypeF64) {
    throw std::runtime_error("EMB1: unsupported dtype tag");
  }
  if (get_le(in, 3) != 0) throw std::runtime_error("EMB1: reserved bytes not zero");
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      M(r, c) = std::bit_cast<double>(get_le(in, 8));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("EMB1: trailing bytes after payload");
  }
  return M;
}

void write_embedding_csv(std::ostream& out, const Eigen::MatrixXd& M) {
  for (Eigen::Index c = 0; c < M.cols(); ++c) {
    out << (c ? "," : "") << "col" << c;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      out << (c ? "," : "") << format_double(M(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_embedding_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != "col" + std::to_string(c)) {
      throw std::runtime_error("CSV: header must be col0,col1,...");
    }
  }
  const auto cols = static_cast<Eigen::Index>(header.size());
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<Eigen::Index>(cells.size()) != cols) {
      throw std::runtime_error("CSV: row " + std::to_string(rows + 1) +
                               " has the wrong number of cells");
    }
    for (const auto& cell : cells) values.push_back(parse_double(cell));
    ++rows;
  }
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = values[r * cols + c];
  }
  return M;
}

Eigen::MatrixXd read_embedding_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embedding file '" + path + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  const bool binary = in.gcount() == 4 && magic == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_emb1(in) : read_embedding_csv(in);
}

void write_embedding_file(const std::string& path, const Eigen::MatrixXd& M) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write embedding file '" + path + "'");
  write_emb1(out, M);
}

}  // namespace rcgan
