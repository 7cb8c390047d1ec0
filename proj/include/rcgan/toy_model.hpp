#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "rcgan/rng.hpp"

namespace rcgan {

/// Per-dimension Gaussian posterior N(mu0, sigma0²) for one measurement y.
struct PosteriorContext {
  Eigen::VectorXd mu0;
  Eigen::VectorXd sigma0;
};

/// Diagonal Gaussian stand-in for p(x|y) over one or more measurements.
class ToyPosterior {
 public:
  explicit ToyPosterior(std::vector<PosteriorContext> contexts);

  /// Single-context, single-dimension posterior.
  static ToyPosterior scalar(double mu0, double sigma0);

  std::size_t num_contexts() const { return contexts_.size(); }
  Eigen::Index dim() const { return contexts_.front().mu0.size(); }
  const PosteriorContext& context(std::size_t index) const;

 private:
  std::vector<PosteriorContext> contexts_;
};

/// theta = (mu, sigma) of the affine toy generator G(z, y) = mu + sigma * z.
/// sigma == 0 is mode collapse.
struct GeneratorParams {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;

  GeneratorParams() = default;
  GeneratorParams(Eigen::VectorXd mu_, Eigen::VectorXd sigma_);
  static GeneratorParams scalar(double mu, double sigma);

  Eigen::Index dim() const { return mu.size(); }
};

enum class SampleOrigin { posterior, generator };

struct SampleBatch {
  Eigen::MatrixXd values;  // one draw per row
  SampleOrigin origin = SampleOrigin::posterior;
  SeededStream stream;

  Eigen::Index rows() const { return values.rows(); }
};

/// Draws n rows x | y ~ N(mu0, sigma0²). Row r uses counter lane r of
/// `stream`, so the batch is reproducible and can be filled in any order.
SampleBatch sample_posterior(const ToyPosterior& post, std::size_t context,
                             std::size_t n, const SeededStream& stream);

/// Draws n rows mu + sigma * z with z ~ N(0, I).
SampleBatch sample_generator(const GeneratorParams& params, std::size_t n,
                             const SeededStream& stream);

/// Random posterior for property sweeps: mu0 uniform on [-mu_abs_max,
/// mu_abs_max], sigma0 log-uniform on [sigma_lo, sigma_hi].
PosteriorContext random_context(const SeededStream& stream, Eigen::Index dim,
                                double mu_abs_max = 10.0, double sigma_lo = 0.1,
                                double sigma_hi = 10.0);

/// Elementwise mean of the first P rows.
Eigen::VectorXd p_sample_average(const SampleBatch& batch, std::size_t P);
Eigen::VectorXd p_sample_average(const Eigen::MatrixXd& rows, std::size_t P);

}  // namespace rcgan
