#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "rcgan/parallel.hpp"
#include "rcgan/toy_model.hpp"

namespace rcgan {

/// Calibrated event classifier c(x) = Pr{z = 1 | x}; must return values in [0, 1].
struct Classifier {
  std::function<double(const Eigen::VectorXd&)> fn;
  std::string descriptor;

  double operator()(const Eigen::VectorXd& x) const { return fn(x); }
};

/// 1[x[coord] > threshold].
Classifier threshold_classifier(Eigen::Index coord, double threshold);
/// 1 / (1 + exp(-(x[coord] - center) / scale)).
Classifier logistic_classifier(Eigen::Index coord, double center, double scale);

struct DetectionEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean of c over the rows, with its standard error. Throws
/// std::domain_error if c leaves [0, 1] on any row.
DetectionEstimate detection_estimate(const Classifier& c, const Eigen::MatrixXd& rows,
                                     const Exec& exec = {});
double detection_probability(const Classifier& c, const SampleBatch& samples,
                             const Exec& exec = {});

struct PlugInGap {
  double avg_of_c = 0.0;  // (1/P) Σ c(x̂_i)
  double c_of_avg = 0.0;  // c(x̂_(P))
  double gap() const { return avg_of_c - c_of_avg; }
};

/// Both estimates over all P rows; needs P >= 2.
PlugInGap plug_in_gap(const Classifier& c, const SampleBatch& samples,
                      const Exec& exec = {});

/// Rescales K per-attribute probabilities to sum to one.
std::vector<double> normalize_attribute_probabilities(std::vector<double> probs);

}  // namespace rcgan
