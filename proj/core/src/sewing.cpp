#include "roughwave/sewing.hpp"

#include "roughwave/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughwave {

namespace {

std::size_t ladder_cap(std::size_t n_cells) {
  std::size_t d = 0;
  while ((std::size_t(1) << (d + 1)) <= n_cells) ++d;
  return d;
}

std::vector<std::size_t> level_indices(std::size_t n_cells, std::size_t level) {
  const std::size_t pieces = std::size_t(1) << level;
  std::vector<std::size_t> idx(pieces + 1);
  for (std::size_t k = 0; k <= pieces; ++k)
    idx[k] = std::size_t(std::llround(double(k) * double(n_cells) / double(pieces)));
  return idx;
}

}  // namespace

SewingReport sew(const TwoParamField& germ, const TimeGrid& grid, std::size_t ladder_depth,
                 bool fit_defect, std::size_t triple_budget) {
  const std::size_t n = grid.cells();
  const std::size_t depth = std::min(ladder_depth, ladder_cap(n));
  SewingReport rep;
  rep.depth = depth;

  std::vector<Mat> sums;  // per level: (pieces+1) x dim partial sums
  sums.reserve(depth + 1);
  for (std::size_t level = 0; level <= depth; ++level) {
    const auto idx = level_indices(n, level);
    Mat S = Mat::Zero(Eigen::Index(idx.size()), germ.dim);
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      Vec a = Vec::Zero(germ.dim);
      if (idx[k] < idx[k + 1]) a = germ(idx[k], idx[k + 1]);
      S.row(Eigen::Index(k + 1)) = S.row(Eigen::Index(k)) + a.transpose();
    }
    rep.level_endpoints.push_back(S.row(S.rows() - 1).transpose());
    if (level > 0) {
      double gap = 0.0;
      const Mat& prev = sums.back();
      for (Eigen::Index k = 0; k < prev.rows(); ++k)
        gap = std::max(gap, (S.row(2 * k) - prev.row(k)).norm());
      rep.gaps.push_back(gap);
    }
    sums.push_back(std::move(S));
  }

  if (rep.gaps.size() >= 2) {
    const double a = rep.gaps[rep.gaps.size() - 2];
    const double b = rep.gaps.back();
    rep.gap_ratio = a > 0.0 ? b / a : 0.0;
    if (rep.gap_ratio > 0.9) rep.divergence_warning = true;
  }

  // geometric-tail correction from the last three levels
  const auto idx_deep = level_indices(n, depth);
  Mat limit = sums.back();
  if (depth >= 2 && !rep.divergence_warning) {
    const Mat& S2 = sums[depth];
    const Mat& S1 = sums[depth - 1];
    const Mat& S0 = sums[depth - 2];
    double num = 0.0, den = 0.0;
    for (Eigen::Index k = 0; k < S0.rows(); ++k) {
      num += (S2.row(4 * k) - S1.row(2 * k)).norm();
      den += (S1.row(2 * k) - S0.row(k)).norm();
    }
    const double r = den > 0.0 ? num / den : 0.0;
    if (r > 0.0 && r < 0.95) {
      const double amp = r / (1.0 - r);
      Mat corr = Mat::Zero(S1.rows(), S1.cols());
      for (Eigen::Index k = 0; k < S1.rows(); ++k)
        corr.row(k) = amp * (S2.row(2 * k) - S1.row(k));
      for (Eigen::Index k = 0; k < S1.rows(); ++k) limit.row(2 * k) += corr.row(k);
      for (Eigen::Index k = 0; k + 1 < S1.rows(); ++k)
        limit.row(2 * k + 1) += 0.5 * (corr.row(k) + corr.row(k + 1));
    }
  }

  std::vector<double> pts(idx_deep.size());
  for (std::size_t k = 0; k < idx_deep.size(); ++k) pts[k] = grid[idx_deep[k]];
  rep.limit.grid = grid_from_points(std::move(pts));
  rep.limit.values = std::move(limit);

  if (fit_defect) rep.defect_fit = germ_rate(germ, grid, triple_budget).fit;
  return rep;
}

RateFit germ_rate(const TwoParamField& germ, const TimeGrid& grid, std::size_t triple_budget) {
  const std::size_t n = grid.cells();
  RateFit out;
  double scale = 0.0;
  for (std::size_t span = 2; span <= n; span *= 2) {
    double level_max = 0.0;
    const std::size_t count = std::min<std::size_t>(std::max<std::size_t>(triple_budget, 1),
                                                    n - span + 1);
    const double step = double(n - span) / double(std::max<std::size_t>(count - 1, 1));
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t i = std::size_t(std::llround(double(c) * step));
      const std::size_t j = i + span;
      const std::size_t u = i + span / 2;  // midpoint keeps min{u-s,t-u} >= span/3
      level_max = std::max(level_max, delta(germ, i, u, j).norm());
      scale = std::max(scale, germ(i, j).norm());
    }
    out.spans.push_back(grid[span] - grid[0]);
    out.maxima.push_back(level_max);
  }
  const double zero_tol = 1e-13 * std::max(1.0, scale);
  bool all_zero = true;
  for (double m : out.maxima)
    if (m > zero_tol) all_zero = false;
  if (all_zero) {
    out.exponent = std::numeric_limits<double>::infinity();
    out.constant = 0.0;
    out.fit.slope = out.exponent;
    return out;
  }
  // drop the two coarsest and two finest levels when enough remain
  std::vector<double> xs = out.spans, ys = out.maxima;
  std::size_t drop = 2;
  while (drop > 0 && xs.size() < 2 * drop + 3) --drop;
  if (drop > 0) {
    xs.erase(xs.begin(), xs.begin() + std::ptrdiff_t(drop));
    ys.erase(ys.begin(), ys.begin() + std::ptrdiff_t(drop));
    xs.erase(xs.end() - std::ptrdiff_t(drop), xs.end());
    ys.erase(ys.end() - std::ptrdiff_t(drop), ys.end());
  }
  out.fit = fit_loglog(xs, ys);
  out.exponent = out.fit.slope;
  out.constant = out.fit.constant;
  return out;
}

MomentRateReport stochastic_germ_moments(const StochasticGermFamily& family,
                                         const TimeGrid& grid, double p, std::size_t mc,
                                         std::optional<AnchorRule> conditional,
                                         std::size_t m_resample, std::uint64_t seed) {
  if (mc < 4) throw std::invalid_argument("stochastic_germ_moments: mc too small");
  const std::size_t n = grid.cells();
  MomentRateReport rep;

  struct Level {
    std::size_t s, u, t, v;
    double span;
  };
  std::vector<Level> levels;
  for (std::size_t span = 2; span <= n / 4; span *= 2) {
    Level lv;
    lv.s = 2 * span;  // leaves v = s - span >= span
    lv.t = lv.s + span;
    lv.u = lv.s + span / 2;
    lv.v = conditional && *conditional == AnchorRule::ShiftedSpan ? lv.s - span : lv.s;
    if (lv.t > n) continue;
    lv.span = grid[lv.t] - grid[lv.s];
    levels.push_back(lv);
  }
  if (levels.size() < 3)
    throw std::invalid_argument("stochastic_germ_moments: grid too coarse for a rate fit");

  auto lp_norm = [&](const std::vector<double>& vals, double& se) {
    double mean_p = 0.0;
    for (double v : vals) mean_p += std::pow(std::abs(v), p);
    mean_p /= double(vals.size());
    double var_p = 0.0;
    for (double v : vals) {
      const double d = std::pow(std::abs(v), p) - mean_p;
      var_p += d * d;
    }
    var_p /= double(vals.size()) * double(vals.size() - 1);
    const double lp = std::pow(mean_p, 1.0 / p);
    // delta method for the root
    se = mean_p > 0.0 ? lp / p * std::sqrt(var_p) / mean_p : 0.0;
    return lp;
  };

  for (const auto& lv : levels) {
    std::vector<double> vals;
    vals.reserve(mc);
    for (std::size_t k = 0; k < mc; ++k) {
      const TwoParamField A = family.make(mix_seed(seed, k));
      vals.push_back(delta(A, lv.s, lv.u, lv.t).norm());
    }
    double se = 0.0;
    const double lp = lp_norm(vals, se);
    rep.spans.push_back(lv.span);
    rep.lp.push_back(lp);
    rep.lp_se.push_back(se);
    if (conditional) {
      std::vector<double> cvals;
      cvals.reserve(mc);
      for (std::size_t k = 0; k < mc; ++k) {
        const TwoParamField A =
            family.make_conditional(mix_seed(seed, k), lv.v, m_resample, mix_seed(seed ^ 0x5bf0, k));
        cvals.push_back(delta(A, lv.s, lv.u, lv.t).norm());
      }
      double cse = 0.0;
      const double clp = lp_norm(cvals, cse);
      rep.cond_lp.push_back(clp);
      rep.cond_lp_se.push_back(cse);
    }
  }

  auto build_fit = [&](const std::vector<double>& ys, const std::vector<double>& ses) {
    RateFit rf;
    rf.spans = rep.spans;
    rf.maxima = ys;
    std::vector<double> xs, vals;
    double scale = 0.0;
    for (double y : ys) scale = std::max(scale, y);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (ys[i] <= 1e-13 * std::max(1.0, scale)) continue;  // zero level
      if (ses[i] > 0.3 * ys[i]) {
        rep.dropped_levels.push_back(i);
        continue;
      }
      xs.push_back(rep.spans[i]);
      vals.push_back(ys[i]);
    }
    if (scale <= 1e-13) {
      rf.exponent = std::numeric_limits<double>::infinity();
      rf.fit.slope = rf.exponent;
      return rf;
    }
    if (xs.size() < 3) throw std::runtime_error("stochastic_germ_moments: precision failure");
    rf.fit = fit_loglog(xs, vals);
    rf.exponent = rf.fit.slope;
    rf.constant = rf.fit.constant;
    return rf;
  };

  rep.unconditional = build_fit(rep.lp, rep.lp_se);
  if (conditional) rep.conditional = build_fit(rep.cond_lp, rep.cond_lp_se);
  return rep;
}

}  // namespace roughwave
