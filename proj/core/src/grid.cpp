#include "roughwave/grid.hpp"

#include "roughwave/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roughwave {

double TimeGrid::mesh() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    m = std::max(m, points[i + 1] - points[i]);
  return m;
}

bool TimeGrid::same_as(const TimeGrid& other, double tol) const {
  if (points.size() != other.points.size()) return false;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (std::abs(points[i] - other.points[i]) > tol) return false;
  return true;
}

TimeGrid make_uniform_grid(double T, std::size_t n) {
  if (!(T > 0.0)) throw std::invalid_argument("make_uniform_grid: horizon must be > 0");
  if (n == 0) throw std::invalid_argument("make_uniform_grid: need at least one cell");
  TimeGrid g;
  g.uniform = true;
  g.points.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g.points[i] = T * double(i) / double(n);
  g.points[0] = 0.0;
  g.points[n] = T;
  return g;
}

TimeGrid grid_from_points(std::vector<double> pts) {
  if (pts.size() < 2) throw std::invalid_argument("grid_from_points: need at least two points");
  if (pts.front() != 0.0) throw std::invalid_argument("grid_from_points: t_0 must be 0");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i] < pts[i + 1]))
      throw std::invalid_argument("grid_from_points: points must be strictly increasing");
  TimeGrid g;
  g.points = std::move(pts);
  const double dt = g.points[1] - g.points[0];
  g.uniform = true;
  for (std::size_t i = 0; i + 1 < g.points.size(); ++i) {
    if (std::abs((g.points[i + 1] - g.points[i]) - dt) > 1e-12 * std::max(1.0, dt)) {
      g.uniform = false;
      break;
    }
  }
  return g;
}

TimeGrid suffix_grid(const TimeGrid& g, std::size_t from) {
  if (from + 1 >= g.points.size())
    throw std::invalid_argument("suffix_grid: anchor out of range");
  TimeGrid out;
  out.points.assign(g.points.begin() + std::ptrdiff_t(from), g.points.end());
  out.uniform = g.uniform;
  return out;
}

Vec SamplePath::value(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("SamplePath::value: index out of range");
  return values.row(Eigen::Index(i)).transpose();
}

Vec SamplePath::increment(std::size_t i, std::size_t j) const {
  if (i > j) throw std::invalid_argument("SamplePath::increment: need i <= j");
  if (j >= size()) throw std::out_of_range("SamplePath::increment: index out of range");
  return (values.row(Eigen::Index(j)) - values.row(Eigen::Index(i))).transpose();
}

void SamplePath::validate() const {
  if (std::size_t(values.rows()) != grid.size())
    throw std::invalid_argument("SamplePath: values/grid length mismatch");
  if (!values.allFinite())
    throw std::invalid_argument("SamplePath: non-finite entries");
}

SamplePath SamplePath::zeros(TimeGrid g, int dim) {
  SamplePath p;
  p.values = Mat::Zero(Eigen::Index(g.size()), dim);
  p.grid = std::move(g);
  return p;
}

Vec delta(const TwoParamField& A, std::size_t i, std::size_t u, std::size_t j) {
  if (!(i <= u && u <= j)) throw std::invalid_argument("delta: need i <= u <= j");
  return A(i, j) - A(i, u) - A(u, j);
}

TwoParamField increment_germ(const SamplePath& g) {
  TwoParamField A;
  A.dim = g.dim();
  A.eval = [g](std::size_t i, std::size_t j) { return g.increment(i, j); };
  return A;
}

std::vector<std::pair<std::size_t, std::size_t>> dyadic_pairs(std::size_t n_cells) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t span = 1; span <= n_cells; span *= 2)
    for (std::size_t i = 0; i + span <= n_cells; ++i) out.emplace_back(i, i + span);
  return out;
}

double holder_seminorm(const SamplePath& path, double alpha, std::size_t pair_budget) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("holder_seminorm: need 0 < alpha <= 1");
  const std::size_t n = path.grid.cells();
  double sup = 0.0;
  auto ratio = [&](std::size_t i, std::size_t j) {
    const double dt = path.grid[j] - path.grid[i];
    const double num = path.increment(i, j).norm();
    return num / std::pow(dt, alpha);
  };
  const std::size_t all = (n + 1) * (n + 1);
  if (pair_budget >= all) {
    for (std::size_t i = 0; i < n + 1; ++i)
      for (std::size_t j = i + 1; j < n + 1; ++j) sup = std::max(sup, ratio(i, j));
  } else {
    for (auto [i, j] : dyadic_pairs(n)) sup = std::max(sup, ratio(i, j));
  }
  return sup;
}

double estimate_holder_exponent(const SamplePath& path) {
  const std::size_t n = path.grid.cells();
  if (n < 64) throw std::invalid_argument("estimate_holder_exponent: need >= 64 cells");
  int kmax = 0;
  while ((std::size_t(1) << (kmax + 1)) <= n) ++kmax;  // kmax = floor(log2 n)
  std::vector<double> lags, meds;
  for (int k = 2; k <= kmax - 4; ++k) {
    const std::size_t lag = std::size_t(1) << k;
    std::vector<double> mags;
    mags.reserve(n + 1 - lag);
    for (std::size_t i = 0; i + lag <= n; ++i)
      mags.push_back(path.increment(i, i + lag).norm());
    std::nth_element(mags.begin(), mags.begin() + std::ptrdiff_t(mags.size() / 2), mags.end());
    const double med = mags[mags.size() / 2];
    lags.push_back(path.grid[lag] - path.grid[0]);
    meds.push_back(med);
  }
  bool degenerate = true;
  for (double m : meds)
    if (m > 0.0) degenerate = false;
  if (degenerate || lags.size() < 2)
    throw std::runtime_error("estimate_holder_exponent: degenerate path");
  const LogLogFit fit = fit_loglog(lags, meds);
  if (!std::isfinite(fit.slope))
    throw std::runtime_error("estimate_holder_exponent: estimation failure");
  return fit.slope;
}

void write_csv(const SamplePath& path, std::ostream& os) {
  os << "t";
  for (int d = 0; d < path.dim(); ++d) os << ",x" << d;
  os << "\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < path.size(); ++i) {
    os << path.grid[i];
    for (int d = 0; d < path.dim(); ++d) os << "," << path.values(Eigen::Index(i), d);
    os << "\n";
  }
}

void write_csv_file(const SamplePath& path, const std::string& filename) {
  std::ofstream os(filename);
  if (!os) throw std::runtime_error("write_csv_file: cannot open " + filename);
  write_csv(path, os);
}

SamplePath read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty input");
  int dim = -1;  // count columns from header
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) ++dim;
  }
  if (dim < 1) throw std::runtime_error("read_csv: header must be t,x0,...");
  std::vector<double> times;
  std::vector<double> flat;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int col = 0;
    while (std::getline(ss, tok, ',')) {
      const double v = std::stod(tok);
      if (col == 0)
        times.push_back(v);
      else
        flat.push_back(v);
      ++col;
    }
    if (col != dim + 1) throw std::runtime_error("read_csv: ragged row");
  }
  SamplePath p;
  p.grid = grid_from_points(times);
  p.values = Mat(Eigen::Index(times.size()), dim);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (int d = 0; d < dim; ++d) p.values(Eigen::Index(i), d) = flat[i * std::size_t(dim) + std::size_t(d)];
  return p;
}

SamplePath read_csv_file(const std::string& filename) {
  std::ifstream is(filename);
  if (!is) throw std::runtime_error("read_csv_file: cannot open " + filename);
  return read_csv(is);
}

}  // namespace roughwave
