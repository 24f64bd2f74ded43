#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace pechaos {

/// Running exponent with a 95% batch-means confidence interval.
struct LyapunovEstimate {
  std::string estimator;
  double lambda = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double T_total = 0.0;
  double renorm_interval = 0.0;
  int n_batches = 0;
  bool ci_resolved = true;
};

/// Student-t 97.5% quantile, good to ~1e-3 for df >= 5.
double t_quantile_975(int df);

/// Batch-means machinery: feed per-block averages, read off mean and CI.
class BatchMeans {
 public:
  void add(double block_value) { blocks_.push_back(block_value); }
  int n() const { return static_cast<int>(blocks_.size()); }
  double mean() const;
  double half_width_95() const;
  const std::vector<double>& blocks() const { return blocks_; }

 private:
  std::vector<double> blocks_;
};

LyapunovEstimate make_estimate(const std::string& name, const BatchMeans& bm, double T_total,
                               double renorm_interval, double max_ci_width = 0.0);

/// Least-squares slope of log(y) against t, with the regression standard
/// error of the slope. Used to fit exponential growth rates.
struct RateFit {
  double rate = 0.0;
  double stderr_rate = 0.0;
  double intercept = 0.0;
};
RateFit fit_exponential_rate(const std::vector<std::pair<double, double>>& curve);

}  // namespace pechaos
