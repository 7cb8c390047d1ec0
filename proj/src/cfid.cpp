#include "rcgan/cfid.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rcgan {
namespace {

constexpr double kNegEigTol = 1e-8;
constexpr double kPinvCutoff = 1e-10;
constexpr double kSymTol = 1e-12;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

void require_symmetric(const Eigen::MatrixXd& M, double tol, const char* what) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  }
  if (M.size() == 0) return;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
  }
}

/// sqrtm with negativity tolerance relative to max(λ_max, reference).
Eigen::MatrixXd sqrtm_psd_scaled(const Eigen::MatrixXd& M, double reference) {
  require_symmetric(M, 1e-8, "sqrtm_psd");
  if (M.size() == 0) return M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrized(M));
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("sqrtm_psd: eigendecomposition failed");
  }
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double floor = -kNegEigTol * std::max(lambda.maxCoeff(), reference);
  if (lambda.minCoeff() < floor) {
    throw std::domain_error("sqrtm_psd: matrix has a negative eigenvalue " +
                            std::to_string(lambda.minCoeff()));
  }
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& U = eig.eigenvectors();
  return symmetrized(U * lambda.asDiagonal() * U.transpose());
}

double cov_distance_scaled(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           double reference) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("covariance distance: shape mismatch");
  }
  const Eigen::MatrixXd root_a = sqrtm_psd_scaled(A, reference);
  const Eigen::MatrixXd inner = symmetrized(root_a * B * root_a);
  const double ref_inner = reference * reference;
  return A.trace() + B.trace() - 2.0 * sqrtm_psd_scaled(inner, ref_inner).trace();
}

double clamp_part(double v, double scale, const char* what) {
  if (v >= 0.0) return v;
  if (v >= -kNegEigTol * (1.0 + scale)) return 0.0;
  throw std::domain_error(std::string(what) + " is negative beyond tolerance: " +
                          std::to_string(v));
}

Eigen::MatrixXd centered(const Eigen::MatrixXd& M, const Eigen::VectorXd& mu) {
  return M.rowwise() - mu.transpose();
}

}  // namespace

void EmbeddingSet::validate() const {
  if (P == 0) throw std::invalid_argument("EmbeddingSet: P must be >= 1");
  if (X.rows() == 0) throw std::invalid_argument("EmbeddingSet: no rows");
  if (X.rows() != Y.rows() || X.rows() != Xhat.rows()) {
    throw std::invalid_argument("EmbeddingSet: X, Y, Xhat row counts differ");
  }
  if (X.cols() != Xhat.cols()) {
    throw std::invalid_argument("EmbeddingSet: X and Xhat widths differ");
  }
  if (X.cols() == 0 || Y.cols() == 0) {
    throw std::invalid_argument("EmbeddingSet: zero-width embeddings");
  }
  if (static_cast<std::size_t>(X.rows()) % P != 0) {
    throw std::invalid_argument("EmbeddingSet: row count is not a multiple of P");
  }
  if (!X.allFinite() || !Y.allFinite() || !Xhat.allFinite()) {
    throw std::invalid_argument("EmbeddingSet: non-finite entries");
  }
}

bool EmbeddingSet::rank_warning() const {
  return X.rows() < X.cols() + Y.cols() + 2;
}

JointGaussianStats compute_stats(const EmbeddingSet& E) {
  E.validate();
  const double n = static_cast<double>(E.X.rows());
  JointGaussianStats J;
  J.mu_x = E.X.colwise().mean().transpose();
  J.mu_y = E.Y.colwise().mean().transpose();
  J.mu_xhat = E.Xhat.colwise().mean().transpose();
  const Eigen::MatrixXd Xz = centered(E.X, J.mu_x);
  const Eigen::MatrixXd Yz = centered(E.Y, J.mu_y);
  const Eigen::MatrixXd Hz = centered(E.Xhat, J.mu_xhat);
  J.S_xx = symmetrized(Xz.transpose() * Xz / n);
  J.S_yy = symmetrized(Yz.transpose() * Yz / n);
  J.S_xhatxhat = symmetrized(Hz.transpose() * Hz / n);
  J.S_xy = Xz.transpose() * Yz / n;
  J.S_xhaty = Hz.transpose() * Yz / n;
  return J;
}

Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& M) {
  require_symmetric(M, 1e-8, "pinv_psd");
  if (M.size() == 0) return M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrized(M));
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("pinv_psd: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cutoff = kPinvCutoff * lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > cutoff) inv[i] = 1.0 / lambda[i];
  }
  const Eigen::MatrixXd& U = eig.eigenvectors();
  return symmetrized(U * inv.asDiagonal() * U.transpose());
}

ConditionalStats conditional_stats(const JointGaussianStats& J) {
  const Eigen::Index d = J.mu_x.size();
  const Eigen::Index dy = J.mu_y.size();
  if (J.mu_xhat.size() != d || J.S_xx.rows() != d || J.S_xhatxhat.rows() != d ||
      J.S_yy.rows() != dy || J.S_xy.rows() != d || J.S_xy.cols() != dy ||
      J.S_xhaty.rows() != d || J.S_xhaty.cols() != dy) {
    throw std::invalid_argument("conditional_stats: inconsistent shapes");
  }
  require_symmetric(J.S_xx, kSymTol, "conditional_stats S_xx");
  require_symmetric(J.S_yy, kSymTol, "conditional_stats S_yy");
  require_symmetric(J.S_xhatxhat, kSymTol, "conditional_stats S_xhatxhat");

  const Eigen::MatrixXd Syy_pinv = pinv_psd(J.S_yy);
  ConditionalStats C;
  C.S_xx_given_y = symmetrized(J.S_xx - J.S_xy * Syy_pinv * J.S_xy.transpose());
  C.S_xhatxhat_given_y = symmetrized(J.S_xhatxhat - J.S_xhaty * Syy_pinv *
                                                        J.S_xhaty.transpose());
  const Eigen::MatrixXd D = J.S_xy - J.S_xhaty;
  C.mean_gap_term =
      (J.mu_x - J.mu_xhat).squaredNorm() + (D * Syy_pinv * D.transpose()).trace();
  return C;
}

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& M) {
  return sqrtm_psd_scaled(M, 0.0);
}

double gaussian_cov_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return cov_distance_scaled(A, B, 0.0);
}

CfidParts cfid_decompose(const JointGaussianStats& J) {
  const ConditionalStats C = conditional_stats(J);
  // Conditional covariances can be rounding-level; judge negativity against
  // the unconditional scale.
  const double reference =
      std::max(J.S_xx.cwiseAbs().maxCoeff(), J.S_xhatxhat.cwiseAbs().maxCoeff());
  const double scale = J.S_xx.trace() + J.S_xhatxhat.trace() +
                       J.mu_x.squaredNorm() + J.mu_xhat.squaredNorm();
  CfidParts parts;
  parts.mean_part = clamp_part(C.mean_gap_term, scale, "CFID mean part");
  parts.cov_part = clamp_part(
      cov_distance_scaled(C.S_xx_given_y, C.S_xhatxhat_given_y, reference),
      scale, "CFID covariance part");
  return parts;
}

CfidParts cfid_decompose(const EmbeddingSet& E) {
  return cfid_decompose(compute_stats(E));
}

double cfid(const JointGaussianStats& J) { return cfid_decompose(J).total(); }

double cfid(const EmbeddingSet& E) { return cfid_decompose(E).total(); }

double fid(const Eigen::VectorXd& mu_x, const Eigen::MatrixXd& S_xx,
           const Eigen::VectorXd& mu_xhat, const Eigen::MatrixXd& S_xhatxhat) {
  if (mu_x.size() != mu_xhat.size() || S_xx.rows() != mu_x.size() ||
      S_xhatxhat.rows() != mu_x.size()) {
    throw std::invalid_argument("fid: shape mismatch");
  }
  const double reference =
      std::max(S_xx.cwiseAbs().maxCoeff(), S_xhatxhat.cwiseAbs().maxCoeff());
  const double scale = S_xx.trace() + S_xhatxhat.trace() + mu_x.squaredNorm() +
                       mu_xhat.squaredNorm();
  const double value = (mu_x - mu_xhat).squaredNorm() +
                       cov_distance_scaled(S_xx, S_xhatxhat, reference);
  return clamp_part(value, scale, "FID");
}

double fid(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Xhat) {
  if (X.cols() != Xhat.cols()) {
    throw std::invalid_argument("fid: column counts differ");
  }
  if (X.rows() == 0 || Xhat.rows() == 0 || !X.allFinite() || !Xhat.allFinite()) {
    throw std::invalid_argument("fid: empty or non-finite input");
  }
  const Eigen::VectorXd mu_x = X.colwise().mean().transpose();
  const Eigen::VectorXd mu_h = Xhat.colwise().mean().transpose();
  const Eigen::MatrixXd Xz = centered(X, mu_x);
  const Eigen::MatrixXd Hz = centered(Xhat, mu_h);
  return fid(mu_x, symmetrized(Xz.transpose() * Xz / static_cast<double>(X.rows())),
             mu_h,
             symmetrized(Hz.transpose() * Hz / static_cast<double>(Xhat.rows())));
}

}  // namespace rcgan
