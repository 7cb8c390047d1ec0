#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rcgan/regularizers.hpp"

namespace rcgan {

/// Toy conditional generator: one (mu, sigma) per measurement context.
struct ConditionalGenerator {
  std::vector<GeneratorParams> per_context;

  /// Samples the true posterior of every context.
  static ConditionalGenerator true_posterior(const ToyPosterior& post);
  /// Collapsed generator that always outputs the posterior mean.
  static ConditionalGenerator collapsed_at_mean(const ToyPosterior& post);

  const GeneratorParams& at(std::size_t context) const;
};

struct ValidationItem {
  Eigen::VectorXd x;
  std::size_t context = 0;
};

struct ValidationSet {
  std::vector<ValidationItem> items;

  /// V items x_v drawn from the posterior, cycling through the contexts.
  static ValidationSet draw(const ToyPosterior& post, std::size_t V,
                            const SeededStream& stream);
};

/// Validation estimate of E_P = E||x̂_(P) - x||²: value averaged over the V
/// items, std_error from the per-item spread. n_outer holds V.
LossEstimate e_hat(const ConditionalGenerator& gen, const ValidationSet& val,
                   std::size_t P, const SeededStream& stream,
                   const Exec& exec = {});

/// Ê_1 / Ê_P on shared validation items and codes: Ê_1 uses the first of the
/// P codes per item, as in the β_SD feedback estimators. std_error is the
/// delta-method standard error from the per-item pairs.
struct RatioEstimate {
  double e1 = 0.0;
  double ep = 0.0;
  double ratio = 0.0;
  double std_error = 0.0;
  std::size_t V = 0;
  std::size_t P = 0;
};

RatioEstimate e_ratio(const ConditionalGenerator& gen, const ValidationSet& val,
                      std::size_t P, const SeededStream& stream,
                      const Exec& exec = {});

/// [x]_dB = 10 log10(x).
double to_db(double x);

/// [2P / (P + 1)]_dB, the E_1/E_P ratio of true-posterior samples.
double target_ratio_db(std::size_t P);

struct AutotuneState {
  double beta_sd = 0.0;
  double mu_sd = 0.1;
  std::size_t p_val = 8;
  std::size_t p_train = 2;
  std::size_t epoch = 0;

  /// beta_sd = beta_sd_nominal(p_train), epoch 0.
  static AutotuneState initial(std::size_t p_train, std::size_t p_val,
                               double mu_sd = 0.1);
};

/// One feedback step:
///   beta' = beta - mu_sd ([e1/eP]_dB - [2 P_val/(P_val+1)]_dB) beta_N(P_train)
/// beta is not clamped at zero.
AutotuneState update_beta(const AutotuneState& state, double e1_hat,
                          double ep_hat);

/// Stand-in for GAN training: maps beta_sd to the generated SD vector (the
/// generated mean is taken to be mu0).
using Plant = std::function<Eigen::VectorXd(double beta_sd)>;

/// sigma(beta) = sigma0 * beta / (c * beta_N(p_train)); reaches sigma0 at
/// beta = c * beta_N.
Plant linear_plant(const ToyPosterior& post, std::size_t context,
                   std::size_t p_train, double c = 1.0);

enum class RatioObservation {
  closed_form,  // (Σσ0² + Σσ²) / (Σσ0² + Σσ²/P_val) at mu = mu0
  monte_carlo,  // e_ratio over V fresh validation items and codes per epoch
};

struct AutotuneSettings {
  std::size_t p_train = 2;
  std::size_t p_val = 8;
  std::size_t epochs = 200;
  std::size_t V = 1000;  // monte_carlo observation only
  double mu_sd = 0.1;
  double tolerance_db = 0.1;
  RatioObservation observation = RatioObservation::closed_form;
  /// Reuse epoch 0's validation items and codes every epoch instead of
  /// drawing fresh ones (variance reduction).
  bool frozen_codes = false;
};

struct AutotuneTraceRow {
  std::size_t epoch = 0;
  double beta_sd = 0.0;
  double ratio_db = 0.0;
  double target_db = 0.0;
};

struct AutotuneResult {
  std::vector<AutotuneTraceRow> trace;
  bool converged = false;
  std::size_t converged_epoch = 0;
  double final_beta = 0.0;
};

/// Closed-form E_1/E_P ratio for a generator with mean mu0 and SD sigma.
double closed_form_ratio(const Eigen::VectorXd& sigma0,
                         const Eigen::VectorXd& sigma, std::size_t P);

/// Runs the β_SD feedback loop against `plant`, starting from
/// beta_N(p_train). Stops at the first epoch whose observed ratio is within
/// tolerance_db of the target; otherwise runs all epochs and reports
/// converged = false. Throws if the plant's ratio response is not
/// nondecreasing over a probe sweep of beta.
AutotuneResult simulate_autotune(const Plant& plant, const ToyPosterior& post,
                                 std::size_t context,
                                 const AutotuneSettings& settings,
                                 const SeededStream& stream,
                                 const Exec& exec = {});

/// CSV `epoch,beta_sd,ratio_db,target_db`.
void write_autotune_csv(std::ostream& out, const AutotuneResult& result);

/// (P, [2P/(P+1)]_dB) for P = 1..P_max.
std::vector<std::pair<std::size_t, double>> psnr_gain_curve(std::size_t P_max);

/// Average per-pixel SD over the first P rows:
///   sqrt( (1/(N P)) Σ_i ||x̂_(P) - x̂_i||² ).
double apsd(const SampleBatch& samples, std::size_t P);
double apsd(const Eigen::MatrixXd& rows, std::size_t P);

}  // namespace rcgan
