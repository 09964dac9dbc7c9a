#pragma once

#include "roughwave/fbm.hpp"
#include "roughwave/grid.hpp"

#include <iosfwd>
#include <vector>

namespace roughwave {

/// Path plus second-order iterated integrals. Only the per-cell matrices
/// G_{t_i,t_{i+1}} are stored; spans are composed through Chen's relation on
/// demand (O(j-i) per evaluation, O(n) memory).
struct RoughPath {
  SamplePath base;
  double alpha = 0.5;
  std::vector<Mat> cells;

  int dim() const { return base.dim(); }
  std::size_t n_cells() const { return cells.size(); }
  /// G_{t_i,t_j} for i <= j, composed by Chen.
  Mat second(std::size_t i, std::size_t j) const;
};

/// Exact iterated integrals of the piecewise-linear interpolant:
/// per-cell G = dg (x) dg / 2.
RoughPath lift_piecewise_linear(const SamplePath& path, double alpha = 0.5);

/// G_{s,t} - G_{s,u} - G_{u,t} - g_{s,u} (x) g_{u,t}; zero for any lift this
/// module produces.
Mat chen_defect(const RoughPath& rp, std::size_t i, std::size_t u, std::size_t j);

/// Sym(G_{s,t}) - g_{s,t} (x) g_{s,t} / 2; zero for geometric lifts.
Mat geometric_defect(const RoughPath& rp, std::size_t i, std::size_t j);

/// Second-level lift of the update process from the lift of B:
///   Btilde2_{u,t} = B2_{u,t} - int Y (x) dB - int B (x) dY + int Y (x) dY,
/// with the Y-integrals evaluated by trapezoidal sums (Y is smooth past the
/// anchor). Trapezoids keep the weak-geometricity identity exact.
RoughPath lift_update_process(const RoughPath& rpB, const HistoryUpdateSplit& split);

/// ||(g,G)||_alpha: max over dyadic pairs of |g_{s,t}|/(t-s)^alpha and
/// |G_{s,t}|/(t-s)^{2 alpha}.
double rough_path_norm(const RoughPath& rp, double alpha);

/// alpha-rough-path distance over shared dyadic pairs (first level at
/// exponent alpha, second at 2 alpha).
double rough_path_distance(const RoughPath& a, const RoughPath& b, double alpha);

/// All dyadic-span second levels via the doubling recursion: out[k][i] is
/// the span-2^k matrix at offset i. O(n log n).
std::vector<std::vector<Mat>> dyadic_second_levels(const RoughPath& rp);

/// Path restricted to every stride-th grid point.
SamplePath subsample(const SamplePath& path, std::size_t stride);

/// CSV rows (i, j, flattened G_{t_i,t_j}) over dyadic pairs, for
/// cross-implementation diffing.
void write_lift_csv(const RoughPath& rp, std::ostream& os);

}  // namespace roughwave
