#pragma once

#include <Eigen/Core>
#include <cstddef>

namespace rcgan {

/// Paired embeddings with Pn rows. Row t*P + i holds the truth and measurement
/// embeddings of item t (repeated P times) next to the i-th generated sample.
struct EmbeddingSet {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  Eigen::MatrixXd Xhat;
  std::size_t P = 1;

  /// Throws on mismatched shapes, non-finite entries, or a row count that is
  /// not a multiple of P.
  void validate() const;
  /// Fewer rows than d + d_y + 2 leaves the sample covariances rank deficient.
  bool rank_warning() const;
};

/// Sample means and population (1/(Pn)) covariances.
struct JointGaussianStats {
  Eigen::VectorXd mu_x, mu_y, mu_xhat;
  Eigen::MatrixXd S_xx, S_yy, S_xhatxhat;
  Eigen::MatrixXd S_xy, S_xhaty;  // d x d_y
};

struct ConditionalStats {
  Eigen::MatrixXd S_xx_given_y;
  Eigen::MatrixXd S_xhatxhat_given_y;
  /// E_y ||mu_{x|y} - mu_{x̂|y}||² evaluated as
  /// ||mu_x - mu_xhat||² + tr[(S_xy - S_xhaty) S_yy⁺ (S_xy - S_xhaty)ᵀ].
  double mean_gap_term = 0.0;
};

JointGaussianStats compute_stats(const EmbeddingSet& E);

/// Schur complements with S_yy⁺ from pinv_psd. Throws if an auto-covariance
/// is asymmetric beyond 1e-12 relative.
ConditionalStats conditional_stats(const JointGaussianStats& J);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-8 λ_max, 0) are clamped to zero; anything more negative throws
/// std::domain_error.
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& M);

/// Pseudo-inverse of a symmetric PSD matrix: eigenvalues at or below
/// 1e-10 λ_max are treated as zero.
Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& M);

/// tr[A + B - 2 (A^{1/2} B A^{1/2})^{1/2}], the covariance part of the
/// Gaussian W2².
double gaussian_cov_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct CfidParts {
  double mean_part = 0.0;
  double cov_part = 0.0;
  double total() const { return mean_part + cov_part; }
};

/// Both parts are clamped to zero when negative by no more than
/// 1e-8 (1 + scale); larger negatives throw std::domain_error.
CfidParts cfid_decompose(const EmbeddingSet& E);
CfidParts cfid_decompose(const JointGaussianStats& J);

double cfid(const EmbeddingSet& E);
double cfid(const JointGaussianStats& J);

/// Unconditional Fréchet distance between the row distributions of X and Xhat.
double fid(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Xhat);
double fid(const Eigen::VectorXd& mu_x, const Eigen::MatrixXd& S_xx,
           const Eigen::VectorXd& mu_xhat, const Eigen::MatrixXd& S_xhatxhat);

}  // namespace rcgan
