#pragma once

#include <cstddef>
#include <string>

#include "rcgan/parallel.hpp"
#include "rcgan/toy_model.hpp"

namespace rcgan {

/// Monte Carlo estimate of an expected loss. std_error is the empirical SD of
/// the per-replicate loss values divided by sqrt(n_outer).
struct LossEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_outer = 0;
  std::size_t P = 0;
};

enum class RegularizerType {
  l1_sd,   // supervised l1 minus beta_sd times the SD reward
  l2,      // supervised l2 on the P-sample average
  l2_var,  // l2 plus the 1/P-weighted variance reward
};

struct RegularizerKind {
  RegularizerType type = RegularizerType::l1_sd;
  std::size_t P = 2;
  double beta_sd = 0.0;  // used by l1_sd only

  void validate() const;
};

const char* to_string(RegularizerType type);
RegularizerType regularizer_type_from_string(const std::string& name);

/// sqrt(pi P / (2 (P - 1))): scales the mean absolute deviation from the
/// P-sample average into an unbiased Gaussian SD estimate.
double gamma_p(std::size_t P);

/// Nominal SD-reward weight sqrt(2 / (pi P (P + 1))).
double beta_sd_nominal(std::size_t P);

// Monte Carlo estimators. Each outer replicate r draws from counter lane r of
// `stream`: one fresh posterior draw x followed by P fresh generator draws.

LossEstimate mc_l1p(const GeneratorParams& params, const ToyPosterior& post,
                    std::size_t context, std::size_t P, std::size_t n_outer,
                    const SeededStream& stream, const Exec& exec = {});

LossEstimate mc_lsdp(const GeneratorParams& params, std::size_t P,
                     std::size_t n_outer, const SeededStream& stream,
                     const Exec& exec = {});

LossEstimate mc_l2p(const GeneratorParams& params, const ToyPosterior& post,
                    std::size_t context, std::size_t P, std::size_t n_outer,
                    const SeededStream& stream, const Exec& exec = {});

LossEstimate mc_lvarp(const GeneratorParams& params, std::size_t P,
                      std::size_t n_outer, const SeededStream& stream,
                      const Exec& exec = {});

// Closed forms for the Gaussian toy model, summed over dimensions.

/// E|x - x̂_(P)|₁ - beta_sd * sigma via the folded-normal mean of
/// x - x̂_(P) ~ N(mu0 - mu, sigma0² + sigma²/P).
double closed_form_j(const GeneratorParams& params, const ToyPosterior& post,
                     std::size_t context, std::size_t P, double beta_sd);

struct ParamGradient {
  Eigen::VectorXd grad_mu;
  Eigen::VectorXd grad_sigma;
};

/// Exact gradient of closed_form_j. With d = mu - mu0 and
/// s² = sigma0² + sigma²/P:
///   dJ/dmu    = erf(d / (sqrt(2) s))
///   dJ/dsigma = sqrt(2/pi) exp(-d² / (2 s²)) sigma / (P s) - beta_sd
/// At sigma = 0 this is the right-sided derivative.
ParamGradient closed_form_j_grad(const GeneratorParams& params,
                                 const ToyPosterior& post, std::size_t context,
                                 std::size_t P, double beta_sd);

/// ||mu - mu0||² + sum(sigma²)/P + sum(sigma0²).
double closed_form_l2p(const GeneratorParams& params, const ToyPosterior& post,
                       std::size_t context, std::size_t P);

/// closed_form_l2p minus the variance reward: ||mu - mu0||² + sum(sigma0²).
/// Does not depend on sigma.
double closed_form_l2varp(const GeneratorParams& params,
                          const ToyPosterior& post, std::size_t context,
                          std::size_t P);

/// Closed-form objective of any regularizer kind and its gradient.
double closed_form_objective(const RegularizerKind& kind,
                             const GeneratorParams& params,
                             const ToyPosterior& post, std::size_t context);
ParamGradient closed_form_objective_grad(const RegularizerKind& kind,
                                         const GeneratorParams& params,
                                         const ToyPosterior& post,
                                         std::size_t context);

/// beta_adv * l_adv + l1 - beta_sd * lsd. The adversarial term is supplied by
/// the caller.
double assemble_generator_loss(double beta_adv, double l_adv, double l1,
                               double beta_sd, double lsd);

}  // namespace rcgan
