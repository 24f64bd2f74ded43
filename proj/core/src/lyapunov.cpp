#include "pechaos/lyapunov.hpp"

#include <stdexcept>

namespace pechaos {

double t_quantile_975(int df) {
  static const std::pair<int, double> anchors[] = {
      {5, 2.571}, {6, 2.447}, {8, 2.306}, {10, 2.228}, {12, 2.179}, {15, 2.131},
      {20, 2.086}, {25, 2.060}, {30, 2.042}, {40, 2.021}, {60, 2.000}, {120, 1.980}};
  if (df <= 5) return 2.571;
  for (std::size_t i = 1; i < std::size(anchors); ++i) {
    if (df <= anchors[i].first) {
      const auto [d0, t0] = anchors[i - 1];
      const auto [d1, t1] = anchors[i];
      const double w = static_cast<double>(df - d0) / (d1 - d0);
      return t0 + w * (t1 - t0);
    }
  }
  return 1.96;
}

double BatchMeans::mean() const {
  if (blocks_.empty()) return 0.0;
  double s = 0.0;
  for (double b : blocks_) s += b;
  return s / blocks_.size();
}

double BatchMeans::half_width_95() const {
  const int n = static_cast<int>(blocks_.size());
  if (n < 2) return std::numeric_limits<double>::infinity();
  const double m = mean();
  double ss = 0.0;
  for (double b : blocks_) ss += (b - m) * (b - m);
  const double se = std::sqrt(ss / (n - 1) / n);
  return t_quantile_975(n - 1) * se;
}

LyapunovEstimate make_estimate(const std::string& name, const BatchMeans& bm, double T_total,
                               double renorm_interval, double max_ci_width) {
  LyapunovEstimate e;
  e.estimator = name;
  e.lambda = bm.mean();
  const double hw = bm.half_width_95();
  e.ci_low = e.lambda - hw;
  e.ci_high = e.lambda + hw;
  e.T_total = T_total;
  e.renorm_interval = renorm_interval;
  e.n_batches = bm.n();
  e.ci_resolved = max_ci_width <= 0.0 || 2.0 * hw <= max_ci_width;
  return e;
}

RateFit fit_exponential_rate(const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 3) throw std::invalid_argument("fit_exponential_rate: need >= 3 points");
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t n = 0;
  for (const auto& [t, y] : curve) {
    if (!(y > 0.0)) continue;
    const double ly = std::log(y);
    st += t;
    sy += ly;
    stt += t * t;
    sty += t * ly;
    ++n;
  }
  if (n < 3) throw std::invalid_argument("fit_exponential_rate: need >= 3 positive points");
  const double denom = n * stt - st * st;
  RateFit f;
  f.rate = (n * sty - st * sy) / denom;
  f.intercept = (sy - f.rate * st) / n;
  double ss = 0.0;
  for (const auto& [t, y] : curve) {
    if (!(y > 0.0)) continue;
    const double r = std::log(y) - (f.intercept + f.rate * t);
    ss += r * r;
  }
  const double sigma2 = ss / (n - 2);
  f.stderr_rate = std::sqrt(sigma2 * n / denom);
  return f;
}

}  // namespace pechaos
