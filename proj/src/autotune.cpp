#include "rcgan/autotune.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rcgan/format.hpp"

namespace rcgan {
namespace {

/// Squared error of x̂_1 and of x̂_(P) against x_v for validation item v.
std::pair<double, double> item_errors(const ConditionalGenerator& gen,
                                      const ValidationItem& item, std::size_t P,
                                      const SeededStream& stream,
                                      std::size_t v, Eigen::MatrixXd& rows) {
  const GeneratorParams& g = gen.at(item.context);
  if (g.dim() != item.x.size()) {
    throw std::invalid_argument("e_hat: generator/validation dimension mismatch");
  }
  CounterRng rng(stream, v);
  rows.resize(static_cast<Eigen::Index>(P), g.dim());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      rows(i, j) = g.mu[j] + g.sigma[j] * rng.gaussian();
    }
  }
  const double e1 = (rows.row(0).transpose() - item.x).squaredNorm();
  const double ep = (p_sample_average(rows, P) - item.x).squaredNorm();
  return {e1, ep};
}

void require_nonempty(const ValidationSet& val, const char* who) {
  if (val.items.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty validation set");
  }
}

}  // namespace

ConditionalGenerator ConditionalGenerator::true_posterior(
    const ToyPosterior& post) {
  ConditionalGenerator gen;
  for (std::size_t c = 0; c < post.num_contexts(); ++c) {
    gen.per_context.emplace_back(post.context(c).mu0, post.context(c).sigma0);
  }
  return gen;
}

ConditionalGenerator ConditionalGenerator::collapsed_at_mean(
    const ToyPosterior& post) {
  ConditionalGenerator gen;
  for (std::size_t c = 0; c < post.num_contexts(); ++c) {
    gen.per_context.emplace_back(post.context(c).mu0,
                                 Eigen::VectorXd::Zero(post.dim()));
  }
  return gen;
}

const GeneratorParams& ConditionalGenerator::at(std::size_t context) const {
  if (context >= per_context.size()) {
    throw std::out_of_range("ConditionalGenerator: context index out of range");
  }
  return per_context[context];
}

ValidationSet ValidationSet::draw(const ToyPosterior& post, std::size_t V,
                                  const SeededStream& stream) {
  if (V == 0) throw std::invalid_argument("ValidationSet: V must be >= 1");
  ValidationSet val;
  val.items.reserve(V);
  for (std::size_t v = 0; v < V; ++v) {
    const std::size_t c = v % post.num_contexts();
    const auto& ctx = post.context(c);
    CounterRng rng(stream, v);
    Eigen::VectorXd x(ctx.mu0.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      x[j] = ctx.mu0[j] + ctx.sigma0[j] * rng.gaussian();
    }
    val.items.push_back({std::move(x), c});
  }
  return val;
}

LossEstimate e_hat(const ConditionalGenerator& gen, const ValidationSet& val,
                   std::size_t P, const SeededStream& stream, const Exec& exec) {
  require_nonempty(val, "e_hat");
  if (P < 1) throw std::invalid_argument("e_hat: P must be >= 1");
  std::vector<double> errs(val.items.size());
  parallel_for(errs.size(), exec, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd rows;
    for (std::size_t v = begin; v < end; ++v) {
      errs[v] = item_errors(gen, val.items[v], P, stream, v, rows).second;
    }
  });
  const SampleSummary s = summarize(errs);
  return {s.mean, s.std_error, errs.size(), P};
}

RatioEstimate e_ratio(const ConditionalGenerator& gen, const ValidationSet& val,
                      std::size_t P, const SeededStream& stream,
                      const Exec& exec) {
  require_nonempty(val, "e_ratio");
  if (P < 1) throw std::invalid_argument("e_ratio: P must be >= 1");
  const std::size_t V = val.items.size();
  std::vector<double> e1(V), ep(V);
  parallel_for(V, exec, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd rows;
    for (std::size_t v = begin; v < end; ++v) {
      std::tie(e1[v], ep[v]) = item_errors(gen, val.items[v], P, stream, v, rows);
    }
  });
  RatioEstimate out;
  out.V = V;
  out.P = P;
  out.e1 = summarize(e1).mean;
  out.ep = summarize(ep).mean;
  if (!(out.ep > 0.0)) {
    throw std::domain_error("e_ratio: E_P estimate is zero");
  }
  out.ratio = out.e1 / out.ep;
  std::vector<double> influence(V);
  for (std::size_t v = 0; v < V; ++v) {
    influence[v] = (e1[v] - out.ratio * ep[v]) / out.ep;
  }
  out.std_error = summarize(influence).std_error;
  return out;
}

double to_db(double x) { return 10.0 * std::log10(x); }

double target_ratio_db(std::size_t P) {
  if (P < 1) throw std::invalid_argument("target_ratio_db: P must be >= 1");
  const double p = static_cast<double>(P);
  return to_db(2.0 * p / (p + 1.0));
}

AutotuneState AutotuneState::initial(std::size_t p_train, std::size_t p_val,
                                     double mu_sd) {
  if (p_val < 2) throw std::invalid_argument("AutotuneState: p_val must be >= 2");
  return {beta_sd_nominal(p_train), mu_sd, p_val, p_train, 0};
}

AutotuneState update_beta(const AutotuneState& state, double e1_hat,
                          double ep_hat) {
  if (!(e1_hat > 0.0) || !(ep_hat > 0.0)) {
    throw std::invalid_argument("update_beta: error estimates must be > 0");
  }
  AutotuneState next = state;
  const double error_db = to_db(e1_hat / ep_hat) - target_ratio_db(state.p_val);
  next.beta_sd =
      state.beta_sd - state.mu_sd * error_db * beta_sd_nominal(state.p_train);
  next.epoch = state.epoch + 1;
  return next;
}

Plant linear_plant(const ToyPosterior& post, std::size_t context,
                   std::size_t p_train, double c) {
  const Eigen::VectorXd sigma0 = post.context(context).sigma0;
  const double scale = 1.0 / (c * beta_sd_nominal(p_train));
  return [sigma0, scale](double beta) -> Eigen::VectorXd {
    return sigma0 * (beta * scale);
  };
}

double closed_form_ratio(const Eigen::VectorXd& sigma0,
                         const Eigen::VectorXd& sigma, std::size_t P) {
  if (P < 1) throw std::invalid_argument("closed_form_ratio: P must be >= 1");
  const double s0 = sigma0.squaredNorm();
  const double s = sigma.squaredNorm();
  return (s0 + s) / (s0 + s / static_cast<double>(P));
}

AutotuneResult simulate_autotune(const Plant& plant, const ToyPosterior& post,
                                 std::size_t context,
                                 const AutotuneSettings& settings,
                                 const SeededStream& stream, const Exec& exec) {
  const auto& ctx = post.context(context);
  const double target = target_ratio_db(settings.p_val);
  const double beta_n = beta_sd_nominal(settings.p_train);

  auto plant_sigma = [&](double beta) {
    Eigen::VectorXd sigma = plant(beta);
    if (sigma.size() != ctx.sigma0.size() || !sigma.allFinite()) {
      throw std::invalid_argument("simulate_autotune: plant output has wrong size");
    }
    // A plant may leave the feasible region for negative beta.
    return sigma.cwiseAbs().eval();
  };

  // Probe sweep: the controller relies on a nondecreasing ratio response.
  double previous = -1e300;
  for (int k = 0; k <= 40; ++k) {
    const double beta = 4.0 * beta_n * k / 40.0;
    const double r = to_db(closed_form_ratio(ctx.sigma0, plant_sigma(beta),
                                             settings.p_val));
    if (r < previous - 1e-9) {
      throw std::invalid_argument(
          "simulate_autotune: plant ratio response is not monotone in beta");
    }
    previous = r;
  }

  const ToyPosterior single({ctx});
  AutotuneState state =
      AutotuneState::initial(settings.p_train, settings.p_val, settings.mu_sd);
  AutotuneResult result;
  for (std::size_t epoch = 0; epoch < settings.epochs; ++epoch) {
    const Eigen::VectorXd sigma = plant_sigma(state.beta_sd);
    double e1 = 0.0;
    double ep = 0.0;
    if (settings.observation == RatioObservation::closed_form) {
      e1 = closed_form_ratio(ctx.sigma0, sigma, settings.p_val);
      ep = 1.0;
    } else {
      ConditionalGenerator gen{{GeneratorParams(ctx.mu0, sigma)}};
      const std::uint64_t round = settings.frozen_codes ? 0 : epoch;
      const ValidationSet val =
          ValidationSet::draw(single, settings.V, stream.with_replicate(2 * round));
      const RatioEstimate est = e_ratio(gen, val, settings.p_val,
                                        stream.with_replicate(2 * round + 1), exec);
      e1 = est.e1;
      ep = est.ep;
    }
    const double observed = to_db(e1 / ep);
    result.trace.push_back({epoch, state.beta_sd, observed, target});
    if (std::abs(observed - target) <= settings.tolerance_db) {
      result.converged = true;
      result.converged_epoch = epoch;
      break;
    }
    state = update_beta(state, e1, ep);
  }
  result.final_beta = result.trace.empty() ? state.beta_sd
                                           : result.trace.back().beta_sd;
  return result;
}

void write_autotune_csv(std::ostream& out, const AutotuneResult& result) {
  out << "epoch,beta_sd,ratio_db,target_db\n";
  for (const auto& row : result.trace) {
    out << row.epoch << ',' << format_double(row.beta_sd) << ','
        << format_double(row.ratio_db) << ',' << format_double(row.target_db)
        << '\n';
  }
}

std::vector<std::pair<std::size_t, double>> psnr_gain_curve(std::size_t P_max) {
  if (P_max < 1) throw std::invalid_argument("psnr_gain_curve: P_max must be >= 1");
  std::vector<std::pair<std::size_t, double>> curve;
  curve.reserve(P_max);
  for (std::size_t P = 1; P <= P_max; ++P) {
    curve.emplace_back(P, target_ratio_db(P));
  }
  return curve;
}

double apsd(const Eigen::MatrixXd& rows, std::size_t P) {
  if (P < 2) throw std::invalid_argument("apsd: P must be >= 2");
  if (static_cast<Eigen::Index>(P) > rows.rows()) {
    throw std::invalid_argument("apsd: fewer than P samples");
  }
  const Eigen::VectorXd avg = p_sample_average(rows, P);
  const auto first = rows.topRows(static_cast<Eigen::Index>(P));
  const double ss = (first.rowwise() - avg.transpose()).squaredNorm();
  return std::sqrt(ss / (static_cast<double>(rows.cols()) * static_cast<double>(P)));
}

double apsd(const SampleBatch& samples, std::size_t P) {
  return apsd(samples.values, P);
}

}  // namespace rcgan
