#include "rcgan/regularizers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rcgan {
namespace {

constexpr double kPi = std::numbers::pi;

void require_p(std::size_t P, const char* who) {
  if (P < 2) throw std::invalid_argument(std::string(who) + ": P must be >= 2");
}

void require_outer(std::size_t n_outer, const char* who) {
  if (n_outer < 2) {
    throw std::invalid_argument(std::string(who) + ": n_outer must be >= 2");
  }
}

void require_same_dim(const GeneratorParams& params, const PosteriorContext& c,
                      const char* who) {
  if (params.dim() != c.mu0.size()) {
    throw std::invalid_argument(std::string(who) +
                                ": generator and posterior dimensions differ");
  }
}

/// Per-replicate scratch: x (N), x̂ rows (P x N), their average (N).
struct Scratch {
  Eigen::VectorXd x;
  Eigen::MatrixXd xhat;
  Eigen::VectorXd avg;

  Scratch(Eigen::Index P, Eigen::Index N) : x(N), xhat(P, N), avg(N) {}

  void draw_generated(CounterRng& rng, const GeneratorParams& g) {
    for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
      for (Eigen::Index j = 0; j < xhat.cols(); ++j) {
        xhat(i, j) = g.mu[j] + g.sigma[j] * rng.gaussian();
      }
    }
    avg = p_sample_average(xhat, static_cast<std::size_t>(xhat.rows()));
  }
};

template <typename Replicate>
LossEstimate run_replicates(std::size_t n_outer, std::size_t P,
                            Eigen::Index N, const Exec& exec,
                            const Replicate& replicate) {
  std::vector<double> losses(n_outer);
  parallel_for(n_outer, exec, [&](std::size_t begin, std::size_t end) {
    Scratch scratch(static_cast<Eigen::Index>(P), N);
    for (std::size_t r = begin; r < end; ++r) losses[r] = replicate(r, scratch);
  });
  const SampleSummary s = summarize(losses);
  return {s.mean, s.std_error, n_outer, P};
}

double folded_normal_term(double d, double s) {
  return std::sqrt(2.0 / kPi) * s * std::exp(-d * d / (2.0 * s * s)) +
         d * std::erf(d / (std::numbers::sqrt2 * s));
}

}  // namespace

void RegularizerKind::validate() const {
  require_p(P, "RegularizerKind");
  if (!(beta_sd >= 0.0) || !std::isfinite(beta_sd)) {
    throw std::invalid_argument("RegularizerKind: beta_sd must be finite and >= 0");
  }
}

const char* to_string(RegularizerType type) {
  switch (type) {
    case RegularizerType::l1_sd: return "l1sd";
    case RegularizerType::l2: return "l2";
    case RegularizerType::l2_var: return "l2var";
  }
  return "?";
}

RegularizerType regularizer_type_from_string(const std::string& name) {
  if (name == "l1sd") return RegularizerType::l1_sd;
  if (name == "l2") return RegularizerType::l2;
  if (name == "l2var") return RegularizerType::l2_var;
  throw std::invalid_argument("unknown regularizer kind '" + name +
                              "' (expected l1sd, l2 or l2var)");
}

double gamma_p(std::size_t P) {
  require_p(P, "gamma_p");
  const double p = static_cast<double>(P);
  return std::sqrt(kPi * p / (2.0 * (p - 1.0)));
}

double beta_sd_nominal(std::size_t P) {
  require_p(P, "beta_sd_nominal");
  const double p = static_cast<double>(P);
  return std::sqrt(2.0 / (kPi * p * (p + 1.0)));
}

LossEstimate mc_l1p(const GeneratorParams& params, const ToyPosterior& post,
                    std::size_t context, std::size_t P, std::size_t n_outer,
                    const SeededStream& stream, const Exec& exec) {
  const auto& ctx = post.context(context);
  require_p(P, "mc_l1p");
  require_outer(n_outer, "mc_l1p");
  require_same_dim(params, ctx, "mc_l1p");
  return run_replicates(n_outer, P, params.dim(), exec,
                        [&](std::size_t r, Scratch& s) {
                          CounterRng rng(stream, r);
                          for (Eigen::Index j = 0; j < s.x.size(); ++j) {
                            s.x[j] = ctx.mu0[j] + ctx.sigma0[j] * rng.gaussian();
                          }
                          s.draw_generated(rng, params);
                          return (s.x - s.avg).cwiseAbs().sum();
                        });
}

LossEstimate mc_lsdp(const GeneratorParams& params, std::size_t P,
                     std::size_t n_outer, const SeededStream& stream,
                     const Exec& exec) {
  require_p(P, "mc_lsdp");
  require_outer(n_outer, "mc_lsdp");
  const double p = static_cast<double>(P);
  const double coeff = std::sqrt(kPi / (2.0 * p * (p - 1.0)));
  return run_replicates(n_outer, P, params.dim(), exec,
                        [&](std::size_t r, Scratch& s) {
                          CounterRng rng(stream, r);
                          s.draw_generated(rng, params);
                          const double dev =
                              (s.xhat.rowwise() - s.avg.transpose())
                                  .cwiseAbs()
                                  .sum();
                          return coeff * dev;
                        });
}

LossEstimate mc_l2p(const GeneratorParams& params, const ToyPosterior& post,
                    std::size_t context, std::size_t P, std::size_t n_outer,
                    const SeededStream& stream, const Exec& exec) {
  const auto& ctx = post.context(context);
  require_p(P, "mc_l2p");
  require_outer(n_outer, "mc_l2p");
  require_same_dim(params, ctx, "mc_l2p");
  return run_replicates(n_outer, P, params.dim(), exec,
                        [&](std::size_t r, Scratch& s) {
                          CounterRng rng(stream, r);
                          for (Eigen::Index j = 0; j < s.x.size(); ++j) {
                            s.x[j] = ctx.mu0[j] + ctx.sigma0[j] * rng.gaussian();
                          }
                          s.draw_generated(rng, params);
                          return (s.x - s.avg).squaredNorm();
                        });
}

LossEstimate mc_lvarp(const GeneratorParams& params, std::size_t P,
                      std::size_t n_outer, const SeededStream& stream,
                      const Exec& exec) {
  require_p(P, "mc_lvarp");
  require_outer(n_outer, "mc_lvarp");
  const double scale = 1.0 / (static_cast<double>(P) - 1.0);
  return run_replicates(n_outer, P, params.dim(), exec,
                        [&](std::size_t r, Scratch& s) {
                          CounterRng rng(stream, r);
                          s.draw_generated(rng, params);
                          return scale * (s.xhat.rowwise() - s.avg.transpose())
                                             .squaredNorm();
                        });
}

double closed_form_j(const GeneratorParams& params, const ToyPosterior& post,
                     std::size_t context, std::size_t P, double beta_sd) {
  const auto& ctx = post.context(context);
  require_p(P, "closed_form_j");
  require_same_dim(params, ctx, "closed_form_j");
  const double p = static_cast<double>(P);
  double total = 0.0;
  for (Eigen::Index j = 0; j < params.dim(); ++j) {
    const double sigma = params.sigma[j];
    const double s = std::sqrt(ctx.sigma0[j] * ctx.sigma0[j] + sigma * sigma / p);
    total += folded_normal_term(params.mu[j] - ctx.mu0[j], s) - beta_sd * sigma;
  }
  return total;
}

ParamGradient closed_form_j_grad(const GeneratorParams& params,
                                 const ToyPosterior& post, std::size_t context,
                                 std::size_t P, double beta_sd) {
  const auto& ctx = post.context(context);
  require_p(P, "closed_form_j_grad");
  require_same_dim(params, ctx, "closed_form_j_grad");
  const double p = static_cast<double>(P);
  ParamGradient g{Eigen::VectorXd(params.dim()), Eigen::VectorXd(params.dim())};
  for (Eigen::Index j = 0; j < params.dim(); ++j) {
    const double sigma = params.sigma[j];
    const double d = params.mu[j] - ctx.mu0[j];
    const double s = std::sqrt(ctx.sigma0[j] * ctx.sigma0[j] + sigma * sigma / p);
    g.grad_mu[j] = std::erf(d / (std::numbers::sqrt2 * s));
    g.grad_sigma[j] = std::sqrt(2.0 / kPi) * std::exp(-d * d / (2.0 * s * s)) *
                          sigma / (p * s) -
                      beta_sd;
  }
  return g;
}

double closed_form_l2p(const GeneratorParams& params, const ToyPosterior& post,
                       std::size_t context, std::size_t P) {
  const auto& ctx = post.context(context);
  if (P < 1) throw std::invalid_argument("closed_form_l2p: P must be >= 1");
  require_same_dim(params, ctx, "closed_form_l2p");
  return (params.mu - ctx.mu0).squaredNorm() +
         params.sigma.squaredNorm() / static_cast<double>(P) +
         ctx.sigma0.squaredNorm();
}

double closed_form_l2varp(const GeneratorParams& params,
                          const ToyPosterior& post, std::size_t context,
                          std::size_t P) {
  const auto& ctx = post.context(context);
  if (P < 1) throw std::invalid_argument("closed_form_l2varp: P must be >= 1");
  require_same_dim(params, ctx, "closed_form_l2varp");
  // The variance reward cancels sum(sigma²)/P exactly, so it is not formed.
  return (params.mu - ctx.mu0).squaredNorm() + ctx.sigma0.squaredNorm();
}

double closed_form_objective(const RegularizerKind& kind,
                             const GeneratorParams& params,
                             const ToyPosterior& post, std::size_t context) {
  kind.validate();
  switch (kind.type) {
    case RegularizerType::l1_sd:
      return closed_form_j(params, post, context, kind.P, kind.beta_sd);
    case RegularizerType::l2:
      return closed_form_l2p(params, post, context, kind.P);
    case RegularizerType::l2_var:
      return closed_form_l2varp(params, post, context, kind.P);
  }
  throw std::logic_error("closed_form_objective: bad kind");
}

ParamGradient closed_form_objective_grad(const RegularizerKind& kind,
                                         const GeneratorParams& params,
                                         const ToyPosterior& post,
                                         std::size_t context) {
  kind.validate();
  const auto& ctx = post.context(context);
  require_same_dim(params, ctx, "closed_form_objective_grad");
  switch (kind.type) {
    case RegularizerType::l1_sd:
      return closed_form_j_grad(params, post, context, kind.P, kind.beta_sd);
    case RegularizerType::l2:
      return {2.0 * (params.mu - ctx.mu0),
              2.0 * params.sigma / static_cast<double>(kind.P)};
    case RegularizerType::l2_var:
      return {2.0 * (params.mu - ctx.mu0),
              Eigen::VectorXd::Zero(params.dim())};
  }
  throw std::logic_error("closed_form_objective_grad: bad kind");
}

double assemble_generator_loss(double beta_adv, double l_adv, double l1,
                               double beta_sd, double lsd) {
  return beta_adv * l_adv + l1 - beta_sd * lsd;
}

}  // namespace rcgan
