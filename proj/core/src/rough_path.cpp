#include "roughwave/rough_path.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace roughwave {

Mat RoughPath::second(std::size_t i, std::size_t j) const {
  if (i > j) throw std::invalid_argument("RoughPath::second: need i <= j");
  if (j > n_cells()) throw std::out_of_range("RoughPath::second: index out of range");
  const int d = dim();
  Mat acc = Mat::Zero(d, d);
  if (i == j) return acc;
  Vec from_i = Vec::Zero(d);  // g_{t_i, t_k}
  for (std::size_t k = i; k < j; ++k) {
    const Vec dg = base.increment(k, k + 1);
    acc += cells[k] + from_i * dg.transpose();
    from_i += dg;
  }
  return acc;
}

RoughPath lift_piecewise_linear(const SamplePath& path, double alpha) {
  RoughPath rp;
  rp.base = path;
  rp.alpha = alpha;
  const std::size_t n = path.grid.cells();
  rp.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec dg = path.increment(i, i + 1);
    rp.cells[i] = 0.5 * dg * dg.transpose();
  }
  return rp;
}

Mat chen_defect(const RoughPath& rp, std::size_t i, std::size_t u, std::size_t j) {
  if (!(i <= u && u <= j)) throw std::invalid_argument("chen_defect: need i <= u <= j");
  return rp.second(i, j) - rp.second(i, u) - rp.second(u, j) -
         rp.base.increment(i, u) * rp.base.increment(u, j).transpose();
}

Mat geometric_defect(const RoughPath& rp, std::size_t i, std::size_t j) {
  const Mat G = rp.second(i, j);
  const Vec dg = rp.base.increment(i, j);
  return 0.5 * (G + G.transpose()) - 0.5 * dg * dg.transpose();
}

RoughPath lift_update_process(const RoughPath& rpB, const HistoryUpdateSplit& split) {
  const std::size_t anchor = split.anchor;
  const TimeGrid tail = suffix_grid(rpB.base.grid, anchor);
  if (!tail.same_as(split.Y.grid))
    throw std::invalid_argument("lift_update_process: split and lift grids disagree");
  const std::size_t m = tail.cells();
  RoughPath out;
  out.alpha = rpB.alpha;
  out.base = split.Btilde;
  out.cells.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vec dB = rpB.base.increment(anchor + k, anchor + k + 1);
    const Vec dY = split.Y.increment(k, k + 1);
    out.cells[k] = rpB.cells[anchor + k] - 0.5 * dY * dB.transpose() -
                   0.5 * dB * dY.transpose() + 0.5 * dY * dY.transpose();
  }
  return out;
}

std::vector<std::vector<Mat>> dyadic_second_levels(const RoughPath& rp) {
  const std::size_t n = rp.n_cells();
  std::vector<std::vector<Mat>> levels;
  levels.push_back(rp.cells);
  for (std::size_t span = 1; 2 * span <= n; span *= 2) {
    const auto& prev = levels.back();
    std::vector<Mat> next;
    next.reserve(n - 2 * span + 1);
    for (std::size_t i = 0; i + 2 * span <= n; ++i) {
      next.push_back(prev[i] + prev[i + span] +
                     rp.base.increment(i, i + span) *
                         rp.base.increment(i + span, i + 2 * span).transpose());
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

double rough_path_norm(const RoughPath& rp, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5))
    throw std::invalid_argument("rough_path_norm: need 0 < alpha <= 1/2");
  const auto levels = dyadic_second_levels(rp);
  double sup = 0.0;
  std::size_t span = 1;
  for (const auto& level : levels) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      const double dt = rp.base.grid[i + span] - rp.base.grid[i];
      sup = std::max(sup, rp.base.increment(i, i + span).norm() / std::pow(dt, alpha));
      sup = std::max(sup, level[i].norm() / std::pow(dt, 2.0 * alpha));
    }
    span *= 2;
  }
  return sup;
}

double rough_path_distance(const RoughPath& a, const RoughPath& b, double alpha) {
  if (!a.base.grid.same_as(b.base.grid))
    throw std::invalid_argument("rough_path_distance: grids disagree");
  const auto la = dyadic_second_levels(a);
  const auto lb = dyadic_second_levels(b);
  double sup = 0.0;
  std::size_t span = 1;
  for (std::size_t k = 0; k < la.size(); ++k) {
    for (std::size_t i = 0; i < la[k].size(); ++i) {
      const double dt = a.base.grid[i + span] - a.base.grid[i];
      const double d1 = (a.base.increment(i, i + span) - b.base.increment(i, i + span)).norm();
      const double d2 = (la[k][i] - lb[k][i]).norm();
      sup = std::max(sup, d1 / std::pow(dt, alpha));
      sup = std::max(sup, d2 / std::pow(dt, 2.0 * alpha));
    }
    span *= 2;
  }
  return sup;
}

SamplePath subsample(const SamplePath& path, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("subsample: stride must be positive");
  const std::size_t n = path.grid.cells();
  if (n % stride != 0) throw std::invalid_argument("subsample: stride must divide cell count");
  SamplePath out;
  std::vector<double> pts;
  pts.reserve(n / stride + 1);
  out.values = Mat(Eigen::Index(n / stride + 1), path.dim());
  for (std::size_t i = 0, k = 0; i <= n; i += stride, ++k) {
    pts.push_back(path.grid[i]);
    out.values.row(Eigen::Index(k)) = path.values.row(Eigen::Index(i));
  }
  out.grid = grid_from_points(std::move(pts));
  return out;
}

void write_lift_csv(const RoughPath& rp, std::ostream& os) {
  const int d = rp.dim();
  os << "i,j";
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) os << ",G" << r << c;
  os << "\n";
  os << std::setprecision(17);
  const auto levels = dyadic_second_levels(rp);
  std::size_t span = 1;
  for (const auto& level : levels) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      os << i << "," << (i + span);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) os << "," << level[i](r, c);
      os << "\n";
    }
    span *= 2;
  }
}

}  // namespace roughwave
