#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace rcgan {

/// Binary embedding layout: "EMB1", u32 rows, u32 cols, u8 dtype (1 = f64),
/// three zero bytes, then the row-major payload. All integers and floats are
/// little-endian.
void write_emb1(std::ostream& out, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_emb1(std::istream& in);

/// CSV with a `col0,col1,...` header line and one row per line.
void write_embedding_csv(std::ostream& out, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_embedding_csv(std::istream& in);

/// Reads either format, chosen by the leading magic bytes.
Eigen::MatrixXd read_embedding_file(const std::string& path);
void write_embedding_file(const std::string& path, const Eigen::MatrixXd& M);

}  // namespace rcgan
