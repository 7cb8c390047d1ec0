#include "rcgan/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcgan/format.hpp"

namespace rcgan {
namespace {

double checked(const Classifier& c, const Eigen::VectorXd& x) {
  const double v = c(x);
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error("classifier '" + c.descriptor +
                            "' returned a value outside [0, 1]: " + format_double(v));
  }
  return v;
}

void require_coord(const Eigen::VectorXd& x, Eigen::Index coord) {
  if (coord < 0 || coord >= x.size()) {
    throw std::out_of_range("classifier coordinate out of range");
  }
}

}  // namespace

Classifier threshold_classifier(Eigen::Index coord, double threshold) {
  return {[coord, threshold](const Eigen::VectorXd& x) {
            require_coord(x, coord);
            return x[coord] > threshold ? 1.0 : 0.0;
          },
          "threshold(x[" + std::to_string(coord) + "] > " +
              format_double(threshold) + ")"};
}

Classifier logistic_classifier(Eigen::Index coord, double center, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("logistic_classifier: scale must be > 0");
  return {[coord, center, scale](const Eigen::VectorXd& x) {
            require_coord(x, coord);
            return 1.0 / (1.0 + std::exp(-(x[coord] - center) / scale));
          },
          "logistic(x[" + std::to_string(coord) + "], center=" +
              format_double(center) + ", scale=" + format_double(scale) + ")"};
}

DetectionEstimate detection_estimate(const Classifier& c, const Eigen::MatrixXd& rows,
                                     const Exec& exec) {
  if (rows.rows() < 1) throw std::invalid_argument("detection: no samples");
  if (!c.fn) throw std::invalid_argument("detection: empty classifier");
  std::vector<double> values(static_cast<std::size_t>(rows.rows()));
  parallel_for(values.size(), exec, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd x;
    for (std::size_t r = begin; r < end; ++r) {
      x = rows.row(static_cast<Eigen::Index>(r)).transpose();
      values[r] = checked(c, x);
    }
  });
  const SampleSummary s = summarize(values);
  return {std::clamp(s.mean, 0.0, 1.0), s.std_error, s.n};
}

double detection_probability(const Classifier& c, const SampleBatch& samples,
                             const Exec& exec) {
  return detection_estimate(c, samples.values, exec).probability;
}

PlugInGap plug_in_gap(const Classifier& c, const SampleBatch& samples,
                      const Exec& exec) {
  if (samples.rows() < 2) throw std::invalid_argument("plug_in_gap: need >= 2 samples");
  PlugInGap out;
  out.avg_of_c = detection_estimate(c, samples.values, exec).probability;
  out.c_of_avg = checked(
      c, p_sample_average(samples.values, static_cast<std::size_t>(samples.rows())));
  return out;
}

std::vector<double> normalize_attribute_probabilities(std::vector<double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::domain_error("attribute probability outside [0, 1]");
    }
    total += p;
  }
  if (!(total > 0.0)) throw std::domain_error("attribute probabilities sum to zero");
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace rcgan
