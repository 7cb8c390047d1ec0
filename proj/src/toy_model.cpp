#include "rcgan/toy_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcgan {
namespace {

void fill_gaussian_rows(Eigen::MatrixXd& out, const Eigen::VectorXd& mean,
                        const Eigen::VectorXd& scale,
                        const SeededStream& stream) {
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    CounterRng rng(stream, static_cast<std::uint64_t>(r));
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(r, j) = mean[j] + scale[j] * rng.gaussian();
    }
  }
}

}  // namespace

ToyPosterior::ToyPosterior(std::vector<PosteriorContext> contexts)
    : contexts_(std::move(contexts)) {
  if (contexts_.empty()) {
    throw std::invalid_argument("ToyPosterior: at least one context required");
  }
  const Eigen::Index n = contexts_.front().mu0.size();
  if (n < 1) throw std::invalid_argument("ToyPosterior: dimension must be >= 1");
  for (const auto& c : contexts_) {
    if (c.mu0.size() != n || c.sigma0.size() != n) {
      throw std::invalid_argument("ToyPosterior: contexts differ in dimension");
    }
    if (!c.mu0.allFinite() || !c.sigma0.allFinite() ||
        (c.sigma0.array() <= 0.0).any()) {
      throw std::invalid_argument(
          "ToyPosterior: sigma0 must be finite and > 0, mu0 finite");
    }
  }
}

ToyPosterior ToyPosterior::scalar(double mu0, double sigma0) {
  return ToyPosterior({PosteriorContext{Eigen::VectorXd::Constant(1, mu0),
                                        Eigen::VectorXd::Constant(1, sigma0)}});
}

const PosteriorContext& ToyPosterior::context(std::size_t index) const {
  if (index >= contexts_.size()) {
    throw std::out_of_range("ToyPosterior: context index " +
                            std::to_string(index) + " out of range");
  }
  return contexts_[index];
}

GeneratorParams::GeneratorParams(Eigen::VectorXd mu_, Eigen::VectorXd sigma_)
    : mu(std::move(mu_)), sigma(std::move(sigma_)) {
  if (mu.size() != sigma.size() || mu.size() < 1) {
    throw std::invalid_argument("GeneratorParams: mu/sigma size mismatch");
  }
  if (!mu.allFinite() || !sigma.allFinite() || (sigma.array() < 0.0).any()) {
    throw std::invalid_argument("GeneratorParams: sigma must be finite and >= 0");
  }
}

GeneratorParams GeneratorParams::scalar(double mu, double sigma) {
  return {Eigen::VectorXd::Constant(1, mu), Eigen::VectorXd::Constant(1, sigma)};
}

SampleBatch sample_posterior(const ToyPosterior& post, std::size_t context,
                             std::size_t n, const SeededStream& stream) {
  const auto& ctx = post.context(context);
  if (n == 0) throw std::invalid_argument("sample_posterior: n must be >= 1");
  SampleBatch batch;
  batch.origin = SampleOrigin::posterior;
  batch.stream = stream;
  batch.values.resize(static_cast<Eigen::Index>(n), ctx.mu0.size());
  fill_gaussian_rows(batch.values, ctx.mu0, ctx.sigma0, stream);
  return batch;
}

SampleBatch sample_generator(const GeneratorParams& params, std::size_t n,
                             const SeededStream& stream) {
  if (n == 0) throw std::invalid_argument("sample_generator: n must be >= 1");
  SampleBatch batch;
  batch.origin = SampleOrigin::generator;
  batch.stream = stream;
  batch.values.resize(static_cast<Eigen::Index>(n), params.dim());
  fill_gaussian_rows(batch.values, params.mu, params.sigma, stream);
  return batch;
}

PosteriorContext random_context(const SeededStream& stream, Eigen::Index dim,
                                double mu_abs_max, double sigma_lo,
                                double sigma_hi) {
  if (dim < 1) throw std::invalid_argument("random_context: dim must be >= 1");
  if (!(sigma_lo > 0.0 && sigma_lo <= sigma_hi) || !(mu_abs_max >= 0.0)) {
    throw std::invalid_argument("random_context: bad ranges");
  }
  CounterRng rng(stream, 0);
  PosteriorContext ctx{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
  const double log_lo = std::log(sigma_lo);
  const double log_span = std::log(sigma_hi) - log_lo;
  for (Eigen::Index j = 0; j < dim; ++j) {
    ctx.mu0[j] = mu_abs_max * (2.0 * rng.uniform() - 1.0);
    ctx.sigma0[j] = std::exp(log_lo + log_span * rng.uniform());
  }
  return ctx;
}

Eigen::VectorXd p_sample_average(const Eigen::MatrixXd& rows, std::size_t P) {
  if (P == 0) throw std::invalid_argument("p_sample_average: P must be >= 1");
  if (static_cast<Eigen::Index>(P) > rows.rows()) {
    throw std::invalid_argument("p_sample_average: P exceeds row count");
  }
  // Averaging offsets from the first row keeps identical rows exact.
  const Eigen::RowVectorXd anchor = rows.row(0);
  Eigen::RowVectorXd offset = Eigen::RowVectorXd::Zero(rows.cols());
  for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(P); ++i) {
    offset += rows.row(i) - anchor;
  }
  return (anchor + offset / static_cast<double>(P)).transpose();
}

Eigen::VectorXd p_sample_average(const SampleBatch& batch, std::size_t P) {
  return p_sample_average(batch.values, P);
}

}  // namespace rcgan
