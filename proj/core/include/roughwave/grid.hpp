#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace roughwave {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Partition 0 = t_0 < t_1 < ... < t_n = T. Points are stored explicitly
/// even for uniform grids; sewing on non-uniform partitions needs them.
struct TimeGrid {
  std::vector<double> points;
  bool uniform = false;

  std::size_t size() const { return points.size(); }
  std::size_t cells() const { return points.empty() ? 0 : points.size() - 1; }
  double horizon() const { return points.back(); }
  double operator[](std::size_t i) const { return points[i]; }
  double mesh() const;
  bool same_as(const TimeGrid& other, double tol = 1e-12) const;
};

TimeGrid make_uniform_grid(double T, std::size_t n);
TimeGrid grid_from_points(std::vector<double> pts);
/// Sub-grid points[from..n]; times keep their absolute values.
TimeGrid suffix_grid(const TimeGrid& g, std::size_t from);

/// Discrete vector-valued path: one row of `values` per grid point.
struct SamplePath {
  TimeGrid grid;
  Mat values;  // (n+1) x dim

  int dim() const { return int(values.cols()); }
  std::size_t size() const { return grid.size(); }
  Vec value(std::size_t i) const;
  Vec increment(std::size_t i, std::size_t j) const;
  void validate() const;  // size match + finiteness

  static SamplePath zeros(TimeGrid g, int dim);
};

/// Two-parameter field A_{t_i,t_j} on grid index pairs i <= j (a germ).
/// Evaluations must be pure; A_{t_i,t_i} = 0 is required of well-formed germs.
struct TwoParamField {
  int dim = 1;
  std::function<Vec(std::size_t, std::size_t)> eval;

  Vec operator()(std::size_t i, std::size_t j) const { return eval(i, j); }
};

/// delta A_{s,u,t} = A_{s,t} - A_{s,u} - A_{u,t} for grid indices i <= u <= j.
Vec delta(const TwoParamField& A, std::size_t i, std::size_t u, std::size_t j);

/// Additive germ A_{s,t} = g_t - g_s of a path (delta kills it).
TwoParamField increment_germ(const SamplePath& g);

/// Dyadic-span index pairs: spans of 2^k cells at every offset, O(n log n).
std::vector<std::pair<std::size_t, std::size_t>> dyadic_pairs(std::size_t n_cells);

/// sup |f_{s,t}| / (t-s)^alpha over the sampled pair set. All pairs when
/// pair_budget >= (n+1)^2, dyadic spans otherwise. Returns 0 for constant
/// paths; requires 0 < alpha <= 1.
double holder_seminorm(const SamplePath& path, double alpha, std::size_t pair_budget = 0);

/// Regularity diagnostic: slope of log(median |f_{t+L}-f_t|) against log L
/// over dyadic lags 2^k, k in [2, log2(n)-4]. Throws on degenerate input.
double estimate_holder_exponent(const SamplePath& path);

/// CSV with header `t,x0,...,x{d-1}`, 17 significant digits.
void write_csv(const SamplePath& path, std::ostream& os);
void write_csv_file(const SamplePath& path, const std::string& filename);
SamplePath read_csv(std::istream& is);
SamplePath read_csv_file(const std::string& filename);

}  // namespace roughwave
