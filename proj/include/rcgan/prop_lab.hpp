#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rcgan/regularizers.hpp"

namespace rcgan {

struct OptimizerSettings {
  std::size_t max_iterations = 100000;
  double grad_tolerance = 1e-9;  // on the projected gradient (inf-norm)
  double initial_step = 1.0;
  double armijo_c1 = 1e-4;
  double wolfe_c2 = 0.1;  // strong curvature condition on the path slope
  std::size_t max_line_search = 60;
  std::size_t trace_stride = 1;
};

struct TracePoint {
  GeneratorParams theta;
  double objective = 0.0;
};

struct OptimizationReport {
  RegularizerKind kind;
  GeneratorParams theta_star;
  double objective_star = 0.0;
  double grad_norm = 0.0;  // projected gradient inf-norm at theta_star
  std::size_t iterations = 0;
  bool converged = false;
  /// True when dJ/dsigma vanishes across the probed sigma range, so sigma* is
  /// not identified by the objective. theta_star.sigma is then the initial
  /// sigma and carries no information.
  bool sigma_indeterminate = false;
  /// Iteration index of the last step where sigma >= 0 had to be enforced by
  /// projection, or -1 if it never activated.
  long last_projection_iteration = -1;
  std::vector<TracePoint> trace;
};

/// Projected gradient descent on the closed-form objective of `kind`. The
/// line search expands or bisects the step until the strong Wolfe conditions
/// hold along the projected path; sigma is kept nonnegative by projection.
/// Never throws on non-convergence; check `converged`.
OptimizationReport minimize_regularizer(const RegularizerKind& kind,
                                        const ToyPosterior& post,
                                        std::size_t context,
                                        const GeneratorParams& init,
                                        const OptimizerSettings& settings = {});

/// Worst-case recovery error against the true posterior parameters:
/// |mu* - mu0| / max(|mu0|, sigma0) and |sigma* - sigma0| / sigma0 over all
/// dimensions. The mean error is scaled by sigma0 when mu0 is near zero.
struct RecoveryError {
  double mu = 0.0;
  double sigma = 0.0;
  double sigma_ratio = 0.0;  // max sigma* / sigma0, the collapse measure
};

RecoveryError recovery_error(const GeneratorParams& theta,
                             const PosteriorContext& truth);

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Closed-form objective over a (mu, sigma) grid for a scalar posterior
/// component. values(i, j) is the objective at (mu_axis[j], sigma_axis[i]).
struct ContourGrid {
  Eigen::VectorXd mu_axis;
  Eigen::VectorXd sigma_axis;
  Eigen::MatrixXd values;
  RegularizerKind kind;
  double mu0 = 0.0;
  double sigma0 = 0.0;
  Eigen::Index argmin_row = 0;  // sigma index
  Eigen::Index argmin_col = 0;  // mu index

  double argmin_mu() const { return mu_axis[argmin_col]; }
  double argmin_sigma() const { return sigma_axis[argmin_row]; }
  /// Whether (mu, sigma) lies in the cell of half-spacing around the argmin
  /// node.
  bool argmin_cell_contains(double mu, double sigma) const;
};

/// `dim` selects the posterior component when the context is multivariate.
ContourGrid contour_grid(const RegularizerKind& kind, const ToyPosterior& post,
                         std::size_t context, AxisRange mu_range,
                         AxisRange sigma_range, std::size_t resolution = 201,
                         Eigen::Index dim = 0);

/// CSV: a `# kind=... mu0=... sigma0=... P=... beta_sd=...` line, a
/// `sigma\mu,<mu values>` header, then one row per sigma value.
void write_contour_csv(std::ostream& out, const ContourGrid& grid);

/// Second difference of J along sigma at (mu0, sigma0) with
/// beta_sd = beta_sd_nominal(P), one entry per P.
std::vector<std::pair<std::size_t, double>> steepness_probe(
    const ToyPosterior& post, std::size_t context,
    const std::vector<std::size_t>& P_list);

}  // namespace rcgan
