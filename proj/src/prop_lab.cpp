#include "rcgan/prop_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "rcgan/format.hpp"

namespace rcgan {
namespace {

/// Inf-norm of the gradient projected onto the feasible set sigma >= 0.
double projected_grad_norm(const ParamGradient& g, const GeneratorParams& t) {
  double norm = g.grad_mu.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < t.sigma.size(); ++j) {
    const double gs = (t.sigma[j] <= 0.0 && g.grad_sigma[j] > 0.0)
                          ? 0.0
                          : g.grad_sigma[j];
    norm = std::max(norm, std::abs(gs));
  }
  return norm;
}

/// Point on the projected steepest-descent path theta(t) = proj(theta + t d).
struct PathPoint {
  GeneratorParams theta;
  double f = 0.0;
  ParamGradient g;
  double slope = 0.0;  // d/dt f(theta(t))
  bool projected = false;
};

}  // namespace

OptimizationReport minimize_regularizer(const RegularizerKind& kind,
                                        const ToyPosterior& post,
                                        std::size_t context,
                                        const GeneratorParams& init,
                                        const OptimizerSettings& settings) {
  kind.validate();
  const auto& ctx = post.context(context);
  if (init.dim() != ctx.mu0.size()) {
    throw std::invalid_argument("minimize_regularizer: init dimension mismatch");
  }
  if ((init.sigma.array() <= 0.0).any()) {
    throw std::invalid_argument("minimize_regularizer: init sigma must be > 0");
  }

  auto objective = [&](const GeneratorParams& t) {
    return closed_form_objective(kind, t, post, context);
  };
  auto gradient = [&](const GeneratorParams& t) {
    return closed_form_objective_grad(kind, t, post, context);
  };

  OptimizationReport rep;
  rep.kind = kind;
  GeneratorParams theta = init;
  double f = objective(theta);
  ParamGradient g = gradient(theta);
  double step = settings.initial_step;
  const std::size_t stride = std::max<std::size_t>(1, settings.trace_stride);
  rep.trace.push_back({theta, f});
  bool traced_last = true;

  std::size_t it = 0;
  for (; it < settings.max_iterations; ++it) {
    rep.grad_norm = projected_grad_norm(g, theta);
    if (rep.grad_norm <= settings.grad_tolerance) {
      rep.converged = true;
      break;
    }

    // Descent direction with the blocked sigma components removed.
    ParamGradient d{-g.grad_mu, -g.grad_sigma};
    for (Eigen::Index j = 0; j < theta.sigma.size(); ++j) {
      if (theta.sigma[j] <= 0.0 && d.grad_sigma[j] < 0.0) d.grad_sigma[j] = 0.0;
    }
    const double slope0 = -(d.grad_mu.squaredNorm() + d.grad_sigma.squaredNorm());
    const double noise =
        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));

    auto evaluate = [&](double t) {
      PathPoint p;
      p.theta.mu = theta.mu + t * d.grad_mu;
      p.theta.sigma = theta.sigma + t * d.grad_sigma;
      Eigen::VectorXd ds = d.grad_sigma;
      for (Eigen::Index j = 0; j < ds.size(); ++j) {
        if (p.theta.sigma[j] < 0.0) {
          p.theta.sigma[j] = 0.0;
          ds[j] = 0.0;
          p.projected = true;
        }
      }
      p.f = objective(p.theta);
      p.g = gradient(p.theta);
      p.slope = p.g.grad_mu.dot(d.grad_mu) + p.g.grad_sigma.dot(ds);
      return p;
    };

    // Bracket a step meeting sufficient decrease (with rounding slack) and the
    // strong curvature condition. The slope stays accurate after differences
    // in f have sunk below rounding.
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double t = step;
    std::optional<std::pair<double, PathPoint>> best;
    for (std::size_t k = 0; k < settings.max_line_search; ++k) {
      PathPoint p = evaluate(t);
      const bool decrease = p.f <= f + settings.armijo_c1 * t * slope0 + noise;
      if (!decrease || p.slope > settings.wolfe_c2 * -slope0) {
        hi = t;
      } else if (p.slope < settings.wolfe_c2 * slope0) {
        lo = t;
        best = {t, std::move(p)};
      } else {
        best = {t, std::move(p)};
        break;
      }
      t = std::isinf(hi) ? 2.0 * t : 0.5 * (lo + hi);
    }
    if (!best) break;

    step = best->first;
    PathPoint& next = best->second;
    if (next.projected) rep.last_projection_iteration = static_cast<long>(it);
    theta = std::move(next.theta);
    f = next.f;
    g = std::move(next.g);
    traced_last = (it + 1) % stride == 0;
    if (traced_last) rep.trace.push_back({theta, f});
  }
  if (!rep.converged) rep.grad_norm = projected_grad_norm(g, theta);

  // Flat-direction check: dJ/dsigma identically ~0 across a sigma sweep.
  const double sigma_hi =
      10.0 * std::max({1.0, ctx.sigma0.maxCoeff(), init.sigma.maxCoeff()});
  bool flat = true;
  for (int k = 0; k <= 40 && flat; ++k) {
    GeneratorParams probe(theta.mu, Eigen::VectorXd::Constant(
                                        theta.dim(), sigma_hi * k / 40.0));
    flat = gradient(probe).grad_sigma.cwiseAbs().maxCoeff() <= 1e-10;
  }
  rep.sigma_indeterminate = flat;
  if (flat) theta.sigma = init.sigma;

  rep.iterations = it;
  rep.theta_star = theta;
  rep.objective_star = objective(theta);
  if (!traced_last || flat) rep.trace.push_back({theta, rep.objective_star});
  return rep;
}

RecoveryError recovery_error(const GeneratorParams& theta,
                             const PosteriorContext& truth) {
  if (theta.dim() != truth.mu0.size()) {
    throw std::invalid_argument("recovery_error: dimension mismatch");
  }
  RecoveryError e;
  for (Eigen::Index j = 0; j < theta.dim(); ++j) {
    const double s0 = truth.sigma0[j];
    e.mu = std::max(e.mu, std::abs(theta.mu[j] - truth.mu0[j]) /
                              std::max(std::abs(truth.mu0[j]), s0));
    e.sigma = std::max(e.sigma, std::abs(theta.sigma[j] - s0) / s0);
    e.sigma_ratio = std::max(e.sigma_ratio, theta.sigma[j] / s0);
  }
  return e;
}

bool ContourGrid::argmin_cell_contains(double mu, double sigma) const {
  auto half = [](const Eigen::VectorXd& axis) {
    return 0.5 * (axis[axis.size() - 1] - axis[0]) /
           static_cast<double>(axis.size() - 1);
  };
  const double slack = 1.0 + 1e-9;
  return std::abs(mu - argmin_mu()) <= half(mu_axis) * slack &&
         std::abs(sigma - argmin_sigma()) <= half(sigma_axis) * slack;
}

ContourGrid contour_grid(const RegularizerKind& kind, const ToyPosterior& post,
                         std::size_t context, AxisRange mu_range,
                         AxisRange sigma_range, std::size_t resolution,
                         Eigen::Index dim) {
  kind.validate();
  const auto& ctx = post.context(context);
  if (dim < 0 || dim >= ctx.mu0.size()) {
    throw std::out_of_range("contour_grid: dimension index out of range");
  }
  if (!(mu_range.lo < mu_range.hi) || !(sigma_range.lo < sigma_range.hi)) {
    throw std::invalid_argument("contour_grid: empty axis range");
  }
  if (sigma_range.lo < 0.0) {
    throw std::invalid_argument("contour_grid: sigma range must be >= 0");
  }
  if (resolution < 16) {
    throw std::invalid_argument("contour_grid: resolution must be >= 16");
  }
  const double mu0 = ctx.mu0[dim];
  const double sigma0 = ctx.sigma0[dim];
  if (mu0 < mu_range.lo || mu0 > mu_range.hi || sigma0 < sigma_range.lo ||
      sigma0 > sigma_range.hi) {
    throw std::invalid_argument(
        "contour_grid: ranges must contain the true (mu0, sigma0)");
  }

  const auto n = static_cast<Eigen::Index>(resolution);
  ContourGrid grid;
  grid.kind = kind;
  grid.mu0 = mu0;
  grid.sigma0 = sigma0;
  grid.mu_axis = Eigen::VectorXd::LinSpaced(n, mu_range.lo, mu_range.hi);
  grid.sigma_axis = Eigen::VectorXd::LinSpaced(n, sigma_range.lo, sigma_range.hi);
  grid.values.resize(n, n);

  const ToyPosterior scalar = ToyPosterior::scalar(mu0, sigma0);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = closed_form_objective(
          kind, GeneratorParams::scalar(grid.mu_axis[j], grid.sigma_axis[i]),
          scalar, 0);
      grid.values(i, j) = v;
      if (v < best) {
        best = v;
        grid.argmin_row = i;
        grid.argmin_col = j;
      }
    }
  }
  return grid;
}

void write_contour_csv(std::ostream& out, const ContourGrid& grid) {
  out << "# kind=" << to_string(grid.kind.type)
      << " mu0=" << format_double(grid.mu0)
      << " sigma0=" << format_double(grid.sigma0) << " P=" << grid.kind.P
      << " beta_sd=" << format_double(grid.kind.beta_sd) << '\n';
  out << "sigma\\mu";
  for (Eigen::Index j = 0; j < grid.mu_axis.size(); ++j) {
    out << ',' << format_double(grid.mu_axis[j]);
  }
  out << '\n';
  for (Eigen::Index i = 0; i < grid.sigma_axis.size(); ++i) {
    out << format_double(grid.sigma_axis[i]);
    for (Eigen::Index j = 0; j < grid.mu_axis.size(); ++j) {
      out << ',' << format_double(grid.values(i, j));
    }
    out << '\n';
  }
}

std::vector<std::pair<std::size_t, double>> steepness_probe(
    const ToyPosterior& post, std::size_t context,
    const std::vector<std::size_t>& P_list) {
  const auto& ctx = post.context(context);
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(P_list.size());
  for (std::size_t P : P_list) {
    const double beta = beta_sd_nominal(P);
    const double h = 1e-3 * ctx.sigma0.minCoeff();
    auto at = [&](double offset) {
      return closed_form_j(
          GeneratorParams(ctx.mu0, ctx.sigma0.array() + offset), post, context,
          P, beta);
    };
    out.emplace_back(P, (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h));
  }
  return out;
}

}  // namespace rcgan
