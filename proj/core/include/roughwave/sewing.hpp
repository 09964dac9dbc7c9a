#pragma once

#include "roughwave/fit.hpp"
#include "roughwave/grid.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace roughwave {

/// Ladder of dyadic Riemann sums of a germ. `limit` lives on the deepest
/// partition and carries a geometric (Aitken) correction estimated from the
/// last three levels; `gaps` are the sup distances between consecutive
/// levels at shared points.
struct SewingReport {
  SamplePath limit;
  std::vector<Vec> level_endpoints;
  std::vector<double> gaps;
  double gap_ratio = 0.0;  // last over previous
  bool divergence_warning = false;
  std::size_t depth = 0;
  LogLogFit defect_fit;  // filled when requested
};

SewingReport sew(const TwoParamField& germ, const TimeGrid& grid, std::size_t ladder_depth,
                 bool fit_defect = false, std::size_t triple_budget = 64);

/// Fit of max ||delta A|| against span: the sewing hypothesis exponent 1+eps.
/// Additive germs report slope +inf.
struct RateFit {
  double exponent = 0.0;
  double constant = 0.0;
  std::vector<double> spans;
  std::vector<double> maxima;
  LogLogFit fit;
};

RateFit germ_rate(const TwoParamField& germ, const TimeGrid& grid, std::size_t triple_budget);

/// Random germ family. `make` builds the germ for an outer sample;
/// `make_conditional` freezes the history at grid index v and averages the
/// germ over m resampled updates, approximating E[A | F_{t_v}].
struct StochasticGermFamily {
  int dim = 1;
  std::function<TwoParamField(std::uint64_t seed)> make;
  std::function<TwoParamField(std::uint64_t seed, std::size_t v_index, std::size_t m_resample,
                              std::uint64_t resample_seed)>
      make_conditional;
};

enum class AnchorRule { AtS, ShiftedSpan };  // v = s  or  v = s - (t - s)

struct MomentRateReport {
  RateFit unconditional;
  std::optional<RateFit> conditional;
  std::vector<double> spans;
  std::vector<double> lp, lp_se;
  std::vector<double> cond_lp, cond_lp_se;
  std::vector<std::size_t> dropped_levels;
  bool precision_failure = false;
};

/// Monte Carlo L^p rates of delta A over dyadic spans; with an anchor rule,
/// also the rates of the conditional means (history frozen, update
/// resampled). Triples respect min{u-s, t-u} >= (t-s)/3.
MomentRateReport stochastic_germ_moments(const StochasticGermFamily& family,
                                         const TimeGrid& grid, double p, std::size_t mc,
                                         std::optional<AnchorRule> conditional,
                                         std::size_t m_resample, std::uint64_t seed);

}  // namespace roughwave
