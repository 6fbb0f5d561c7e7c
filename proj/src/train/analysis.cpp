#include "hsrnet/train/analysis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hsrnet/errors.hpp"

namespace hsrnet::train {

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 1.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  if (sxx <= 0.0) throw InvalidArgument("least squares: x values are all equal");
  fit.slope = sxy / sxx;
  const double scale = std::max(1.0, std::abs(my));
  if (syy > 1e-24 * scale * scale * n) fit.r2 = (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace

RateFit convergence_fit(std::span<const double> err2) {
  if (err2.size() < 10) throw InvalidArgument("convergence_fit: need at least 10 values");
  std::vector<double> t(err2.size()), logs(err2.size());
  for (std::size_t k = 0; k < err2.size(); ++k) {
    if (!(err2[k] > 0.0) || !std::isfinite(err2[k]))
      throw InvalidArgument("convergence_fit: non-positive error at t = " + std::to_string(k));
    t[k] = static_cast<double>(k);
    logs[k] = std::log(err2[k]);
  }
  const auto fit = least_squares(t, logs);
  return {std::exp(fit.slope), fit.r2, fit.slope};
}

SparsityAudit sparsity_audit(const TrainTrace& trace, std::size_t m, double b, double constant) {
  SparsityAudit audit;
  audit.bound = constant * static_cast<double>(m) * std::exp(-b * b / 2.0);
  for (const auto& rec : trace.records) {
    if (rec.k_max > audit.max_k || (audit.max_k == 0 && rec.t == 0)) {
      audit.max_k = rec.k_max;
      audit.at_t = rec.t;
      audit.at_sample = rec.k_argmax;
    }
  }
  audit.ok = static_cast<double>(audit.max_k) <= audit.bound;
  return audit;
}

double displacement_bound(double lambda, std::size_t m, std::size_t n, double err0_norm) {
  if (!(lambda > 0.0)) throw InvalidArgument("displacement_bound: lambda must be positive");
  return 4.0 * std::sqrt(static_cast<double>(n)) * err0_norm /
         (lambda * std::sqrt(static_cast<double>(m)));
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("loglog_slope: need two or more paired values");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return least_squares(lx, ly).slope;
}

}  // namespace hsrnet::train
