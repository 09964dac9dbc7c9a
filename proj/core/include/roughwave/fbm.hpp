#pragma once

#include "roughwave/grid.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace roughwave {

struct HurstParams {
  double H = 0.5;
  int dims = 1;  // noise dimension d2

  bool rough() const { return H <= 0.5; }
  void validate() const;  // 1/3 < H < 1, dims >= 1
};

/// Volterra kernel K_H(t,s) of the representation B^H_t = int_0^t K_H(t,s) dW_s,
/// normalised so that int_0^t K_H(t,r)^2 dr = t^{2H}. Requires 0 < s < t.
/// K == 1 identically when H = 1/2.
double volterra_kernel(double H, double t, double s);

/// Normalisation constant c_H (calibrated numerically at t = 1).
double kernel_constant(double H);

/// rho^2_H(s,t) = int_s^t K_H(t,r)^2 dr, the conditional variance of the
/// update process. Requires 0 <= s < t.
double rho_squared(double H, double s, double t);

/// Cell-averaged sampler weights w(i,j) = sqrt(mean_{cell_j} K_H(t_i,.)^2),
/// j < i, chosen so single-time marginal variances are exact. Cached per
/// (H, grid); the reference stays valid for the process lifetime.
const Mat& volterra_cell_weights(double H, const TimeGrid& grid);

struct FbmSample {
  HurstParams params;
  SamplePath B;
  std::optional<SamplePath> W;  // driving Brownian path (Volterra sampler only)
  std::uint64_t seed = 0;
};

/// Exact Gaussian vector via dense Cholesky of the covariance
/// E[B^i_s B^j_t] = delta_ij/2 (s^2H + t^2H - |t-s|^2H). O(n^2) memory,
/// capped at n <= 2^13.
FbmSample sample_fbm_cholesky(const HurstParams& params, const TimeGrid& grid,
                              std::uint64_t seed);

/// Volterra sampler B_t = sum_j w(t, cell_j) dW_j on a uniform grid; stores W.
FbmSample sample_fbm_volterra(const HurstParams& params, const TimeGrid& grid,
                              std::uint64_t seed);

/// Exact sampler with O(n) memory (Durbin-Levinson recursion on the
/// stationary increment sequence); uniform grids. Used at resolutions where
/// the dense covariance would not fit.
FbmSample sample_fbm_hosking(const HurstParams& params, const TimeGrid& grid,
                             std::uint64_t seed);

/// B restricted to t >= t_anchor split as B = Y + Btilde: Y collects the
/// Brownian cells before the anchor (history), Btilde the cells after
/// (update). Both live on the suffix grid; Btilde(anchor) = 0.
struct HistoryUpdateSplit {
  std::size_t anchor = 0;
  double anchor_time = 0.0;
  SamplePath Y;
  SamplePath Btilde;
};

HistoryUpdateSplit decompose_history_update(const FbmSample& sample, std::size_t anchor_index);

/// m i.i.d. fresh copies of the update process (fresh future dW, same kernel
/// weights); the conditional law of B given F_s is Y + fresh Btilde.
std::vector<SamplePath> resample_update(const FbmSample& sample, std::size_t anchor_index,
                                        std::size_t m, std::uint64_t seed);

/// ||Y^{H,s}_{u,t}||_{L^p} against the bound (t-s)^H - (u-s)^H. The L^p norm
/// is exact (the increment is a centred Gaussian whose variance is a kernel
/// quadrature); mc > 0 adds a Monte Carlo cross-check.
struct YMomentReport {
  double lhs = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  double variance = 0.0;
  double mc_estimate = 0.0;
};

YMomentReport y_moment_check(double H, double s, double u, double t, double p,
                             std::size_t mc = 0, std::uint64_t seed = 1);

}  // namespace roughwave
