#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace roughwave {

// Least-squares fit of log(y) against log(x), skipping non-finite or
// non-positive entries. slope == +inf signals an identically-zero input
// (the additive-germ sentinel).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // log of the constant
  double constant = 0.0;
  double max_residual = 0.0;
  std::size_t points = 0;
  std::vector<double> residuals;

  bool infinite() const { return std::isinf(slope); }
};

inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  LogLogFit out;
  std::vector<double> lx, ly;
  bool any_positive = false;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(y[i])) continue;
    if (y[i] > 0.0) any_positive = true;
    if (y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (!any_positive || lx.size() < 2) {
    out.slope = std::numeric_limits<double>::infinity();
    out.constant = 0.0;
    return out;
  }
  const std::size_t n = lx.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += lx[i]; my += ly[i]; }
  mx /= double(n); my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) {
    out.slope = std::numeric_limits<double>::infinity();
    return out;
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.constant = std::exp(out.intercept);
  out.points = n;
  out.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.residuals[i] = ly[i] - (out.intercept + out.slope * lx[i]);
    out.max_residual = std::max(out.max_residual, std::abs(out.residuals[i]));
  }
  return out;
}

}  // namespace roughwave
