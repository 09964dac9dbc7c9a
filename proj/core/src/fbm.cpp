#include "roughwave/fbm.hpp"

#include "roughwave/quadrature.hpp"
#include "roughwave/rng.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace roughwave {

namespace {

constexpr double kHalfTol = 1e-13;

bool is_half(double H) { return std::abs(H - 0.5) < kHalfTol; }

void check_hurst(double H) {
  if (!(H > 1.0 / 3.0 && H < 1.0)) throw std::invalid_argument("Hurst parameter must lie in (1/3, 1)");
}

// (x^e - y^e)/e, stable for small e.
double power_diff(double x, double y, double e) {
  return std::pow(y, e) * std::expm1(e * std::log(x / y)) / e;
}

// One-variable reduction of the kernel's inner integral. With u = s(1+w),
//   H > 1/2: int_s^t (u-s)^{H-3/2} u^{H-1/2} du = s^{2H-1} Phi((t-s)/s),
//   H < 1/2: int_s^t u^{H-3/2} (u-s)^{H-1/2} du = s^{2H-1} Phi((t-s)/s),
// where Phi'(w) = w^a (1+w)^b with (a,b) = (H-3/2, H-1/2) resp.
// (H-1/2, H-3/2). Phi is tabulated on a log grid with analytic derivatives
// (cubic Hermite); series below the table, power-law asymptote above.
struct KernelTable {
  double H = 0.5;
  double a = 0.0, b = 0.0;
  double c = 1.0;  // c_H, set by calibration
  double g0 = 0.0, g1 = 0.0, dg = 0.0;
  std::vector<double> F;

  double integrand_g(double g) const {  // d Phi / d(log w)
    const double w = std::exp(g);
    return std::exp((a + 1.0) * g) * std::pow(1.0 + w, b);
  }

  double series(double x) const {
    // (1+w)^b ~ 1 + b w + b(b-1)/2 w^2
    return std::pow(x, a + 1.0) *
           (1.0 / (a + 1.0) + b * x / (a + 2.0) + 0.5 * b * (b - 1.0) * x * x / (a + 3.0));
  }

  double tail(double X, double x) const {
    // integrand ~ w^{a+b} (1 + b/w + b(b-1)/(2 w^2))
    const double e = a + b + 1.0;  // = 2H - 1
    return power_diff(x, X, e) + b * power_diff(x, X, e - 1.0) +
           0.5 * b * (b - 1.0) * power_diff(x, X, e - 2.0);
  }

  double phi(double x) const {
    const double x_lo = std::exp(g0), x_hi = std::exp(g1);
    if (x <= 0.0) return 0.0;
    if (x <= x_lo) return series(x);
    if (x >= x_hi) return F.back() + tail(x_hi, x);
    const double g = std::log(x);
    const double pos = (g - g0) / dg;
    std::size_t k = std::min(F.size() - 2, std::size_t(pos));
    const double th = pos - double(k);
    const double f0 = F[k], f1 = F[k + 1];
    const double d0 = integrand_g(g0 + double(k) * dg) * dg;
    const double d1 = integrand_g(g0 + double(k + 1) * dg) * dg;
    const double th2 = th * th, th3 = th2 * th;
    return (2 * th3 - 3 * th2 + 1) * f0 + (th3 - 2 * th2 + th) * d0 +
           (-2 * th3 + 3 * th2) * f1 + (th3 - th2) * d1;
  }
};

double kernel_raw(const KernelTable& tab, double t, double s) {
  const double x = (t - s) / s;
  if (tab.H > 0.5) return std::pow(s, tab.H - 0.5) * tab.phi(x);
  return std::pow(t / s, tab.H - 0.5) * std::pow(t - s, tab.H - 0.5) -
         (tab.H - 0.5) * std::pow(s, tab.H - 0.5) * tab.phi(x);
}

std::shared_ptr<const KernelTable> build_table(double H) {
  auto tab = std::make_shared<KernelTable>();
  tab->H = H;
  if (H > 0.5) {
    tab->a = H - 1.5;
    tab->b = H - 0.5;
  } else {
    tab->a = H - 0.5;
    tab->b = H - 1.5;
  }
  tab->g0 = std::log(1e-10);
  tab->g1 = std::log(1e12);
  const std::size_t N = 8192;
  tab->dg = (tab->g1 - tab->g0) / double(N);
  tab->F.resize(N + 1);
  tab->F[0] = tab->series(std::exp(tab->g0));
  const auto& gl = gauss_legendre(8);
  for (std::size_t k = 0; k < N; ++k) {
    const double ga = tab->g0 + double(k) * tab->dg;
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q)
      acc += gl.weights[q] * tab->integrand_g(ga + tab->dg * gl.nodes[q]);
    tab->F[k + 1] = tab->F[k] + acc * tab->dg;
  }
  // calibrate c_H by int_0^1 K(1,r)^2 dr = 1
  boost::math::quadrature::tanh_sinh<double> ts;
  const double I = ts.integrate(
      [&](double r) {
        const double k = kernel_raw(*tab, 1.0, r);
        return k * k;
      },
      0.0, 1.0, 1e-11);
  tab->c = 1.0 / std::sqrt(I);
  return tab;
}

const KernelTable& table_for(double H) {
  static std::map<double, std::shared_ptr<const KernelTable>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(H);
  if (it == cache.end()) {
    check_hurst(H);
    it = cache.emplace(H, build_table(H)).first;
  }
  return *it->second;
}

double kernel_eval(const KernelTable& tab, double t, double s) {
  return tab.c * kernel_raw(tab, t, s);
}

// int_a^b K_H(t,r)^2 dr for one sampler cell. Interior cells are smooth;
// the first cell carries the r -> 0 singularity r^{1-2H}, the cell touching
// r = t the (t-r)^{2H-1} one. Both are removed by power substitutions.
double cell_k2_integral(const KernelTable& tab, double t, double a, double b) {
  const double H = tab.H;
  const bool last = std::abs(b - t) < 1e-15 * std::max(1.0, t);
  const bool first = (a == 0.0);
  if (first && last) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(
        [&](double r) {
          const double k = kernel_eval(tab, t, r);
          return k * k;
        },
        a, b, 1e-10);
  }
  if (last) {
    // r = t - (b-a) v^q, q = 1/(2H): K^2 (t-r)^{1-2H} is tame in v
    const double q = 1.0 / (2.0 * H);
    const auto& gl = gauss_legendre(16);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double v = gl.nodes[i];
      const double tr = (b - a) * std::pow(v, q);  // t - r
      const double r = t - tr;
      if (r <= a) continue;
      const double k = kernel_eval(tab, t, r);
      acc += gl.weights[i] * k * k * std::pow(tr, 1.0 - 2.0 * H);
    }
    return acc * q * std::pow(b - a, 2.0 * H);
  }
  if (first) {
    // r = b v^p, p = 1/(2-2H): K^2 r^{2H-1} is tame in v
    const double p = 1.0 / (2.0 - 2.0 * H);
    const auto& gl = gauss_legendre(16);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double v = gl.nodes[i];
      const double r = b * std::pow(v, p);
      if (r <= 0.0 || r >= t) continue;
      const double k = kernel_eval(tab, t, r);
      acc += gl.weights[i] * k * k * std::pow(r, 2.0 * H - 1.0);
    }
    return acc * p * std::pow(b, 2.0 - 2.0 * H);
  }
  const auto& gl = gauss_legendre(4);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double r = a + (b - a) * gl.nodes[i];
    const double k = kernel_eval(tab, t, r);
    acc += gl.weights[i] * k * k;
  }
  return acc * (b - a);
}

struct WeightKey {
  double H;
  std::size_t n;
  double T;
  bool operator<(const WeightKey& o) const {
    if (H != o.H) return H < o.H;
    if (n != o.n) return n < o.n;
    return T < o.T;
  }
};

Mat build_weights(double H, const TimeGrid& grid) {
  const std::size_t n = grid.cells();
  Mat w = Mat::Zero(Eigen::Index(n + 1), Eigen::Index(n));
  if (is_half(H)) {
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < i; ++j) w(Eigen::Index(i), Eigen::Index(j)) = 1.0;
    return w;
  }
  const KernelTable& tab = table_for(H);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = grid[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double a = grid[j], b = grid[j + 1];
      const double cell = cell_k2_integral(tab, t, a, b);
      w(Eigen::Index(i), Eigen::Index(j)) = std::sqrt(std::max(0.0, cell) / (b - a));
    }
  }
  return w;
}

Mat gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint64_t stream) {
  Rng rng(seed, stream);
  Mat g(Eigen::Index(rows), Eigen::Index(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.gaussian();
  return g;
}

}  // namespace

void HurstParams::validate() const {
  check_hurst(H);
  if (dims < 1) throw std::invalid_argument("HurstParams: dims must be >= 1");
}

double kernel_constant(double H) {
  if (is_half(H)) return 1.0;
  return table_for(H).c;
}

double volterra_kernel(double H, double t, double s) {
  if (!(s > 0.0 && s < t)) throw std::invalid_argument("volterra_kernel: need 0 < s < t");
  if (is_half(H)) return 1.0;
  return kernel_eval(table_for(H), t, s);
}

double rho_squared(double H, double s, double t) {
  if (!(s >= 0.0 && s < t)) throw std::invalid_argument("rho_squared: need 0 <= s < t");
  if (is_half(H)) return t - s;
  const KernelTable& tab = table_for(H);
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(
      [&](double r) {
        if (r <= 0.0 || r >= t) return 0.0;
        const double k = kernel_eval(tab, t, r);
        return k * k;
      },
      s, t, 1e-11);
}

const Mat& volterra_cell_weights(double H, const TimeGrid& grid) {
  static std::map<WeightKey, std::shared_ptr<const Mat>> cache;
  static std::mutex mtx;
  if (!grid.uniform) throw std::invalid_argument("volterra_cell_weights: uniform grid required");
  WeightKey key{H, grid.cells(), grid.horizon()};
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto built = std::make_shared<Mat>(build_weights(H, grid));
  std::lock_guard<std::mutex> lock(mtx);
  auto [it, inserted] = cache.emplace(key, built);
  return *it->second;
}

FbmSample sample_fbm_cholesky(const HurstParams& params, const TimeGrid& grid,
                              std::uint64_t seed) {
  params.validate();
  const std::size_t n = grid.cells();
  if (n > (std::size_t(1) << 13))
    throw std::invalid_argument("sample_fbm_cholesky: n capped at 2^13 (dense covariance)");
  const double H = params.H;
  Mat C(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double s = grid[i + 1], t = grid[j + 1];
      C(Eigen::Index(i), Eigen::Index(j)) =
          0.5 * (std::pow(s, 2 * H) + std::pow(t, 2 * H) - std::pow(std::abs(t - s), 2 * H));
    }
  Eigen::LLT<Mat> llt(C);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * C.trace() / double(n);
    C.diagonal().array() += jitter;
    llt.compute(C);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("sample_fbm_cholesky: covariance not positive definite");
  }
  FbmSample out;
  out.params = params;
  out.seed = seed;
  out.B = SamplePath::zeros(grid, params.dims);
  const Mat L = llt.matrixL();
  for (int d = 0; d < params.dims; ++d) {
    const Mat xi = gaussian_matrix(n, 1, seed, std::uint64_t(d));
    out.B.values.block(1, d, Eigen::Index(n), 1) = L * xi;
  }
  return out;
}

FbmSample sample_fbm_volterra(const HurstParams& params, const TimeGrid& grid,
                              std::uint64_t seed) {
  params.validate();
  if (!grid.uniform) throw std::invalid_argument("sample_fbm_volterra: uniform grid required");
  const std::size_t n = grid.cells();
  const double dt = grid.horizon() / double(n);
  const Mat& w = volterra_cell_weights(params.H, grid);
  FbmSample out;
  out.params = params;
  out.seed = seed;
  out.B = SamplePath::zeros(grid, params.dims);
  out.W = SamplePath::zeros(grid, params.dims);
  const double sdt = std::sqrt(dt);
  for (int d = 0; d < params.dims; ++d) {
    Mat dW = sdt * gaussian_matrix(n, 1, seed, std::uint64_t(d));
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += dW(Eigen::Index(j), 0);
      out.W->values(Eigen::Index(j + 1), d) = acc;
    }
    out.B.values.block(1, d, Eigen::Index(n), 1) = w.bottomRows(Eigen::Index(n)) * dW;
  }
  return out;
}

FbmSample sample_fbm_hosking(const HurstParams& params, const TimeGrid& grid,
                             std::uint64_t seed) {
  params.validate();
  if (!grid.uniform) throw std::invalid_argument("sample_fbm_hosking: uniform grid required");
  const std::size_t n = grid.cells();
  const double H = params.H;
  const double dt = grid.horizon() / double(n);
  const double var0 = std::pow(dt, 2 * H);
  // autocovariance of the stationary increment sequence
  std::vector<double> gamma(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = double(k);
    gamma[k] = 0.5 * var0 *
               (std::pow(kk + 1.0, 2 * H) - 2.0 * std::pow(kk, 2 * H) +
                std::pow(std::abs(kk - 1.0), 2 * H));
  }
  FbmSample out;
  out.params = params;
  out.seed = seed;
  out.B = SamplePath::zeros(grid, params.dims);
  std::vector<double> phi(n, 0.0), phi_prev(n, 0.0), x(n, 0.0);
  for (int d = 0; d < params.dims; ++d) {
    Rng rng(seed, std::uint64_t(d));
    double v = gamma[0];
    x[0] = std::sqrt(v) * rng.gaussian();
    std::fill(phi.begin(), phi.end(), 0.0);
    for (std::size_t k = 1; k < n; ++k) {
      std::swap(phi, phi_prev);
      double num = gamma[k];
      for (std::size_t j = 1; j < k; ++j) num -= phi_prev[j - 1] * gamma[k - j];
      const double refl = num / v;
      phi[k - 1] = refl;
      for (std::size_t j = 1; j < k; ++j)
        phi[j - 1] = phi_prev[j - 1] - refl * phi_prev[k - 1 - j];
      v *= (1.0 - refl * refl);
      if (!(v > 0.0)) throw std::runtime_error("sample_fbm_hosking: recursion lost positivity");
      double mean = 0.0;
      for (std::size_t j = 1; j <= k; ++j) mean += phi[j - 1] * x[k - j];
      x[k] = mean + std::sqrt(v) * rng.gaussian();
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += x[k];
      out.B.values(Eigen::Index(k + 1), d) = acc;
    }
  }
  return out;
}

HistoryUpdateSplit decompose_history_update(const FbmSample& sample, std::size_t anchor_index) {
  if (!sample.W) throw std::invalid_argument("decompose_history_update: need a Volterra sample");
  const TimeGrid& grid = sample.B.grid;
  const std::size_t n = grid.cells();
  if (anchor_index >= n) throw std::invalid_argument("decompose_history_update: anchor out of range");
  const Mat& w = volterra_cell_weights(sample.params.H, grid);
  const int dims = sample.params.dims;

  HistoryUpdateSplit split;
  split.anchor = anchor_index;
  split.anchor_time = grid[anchor_index];
  TimeGrid tail = suffix_grid(grid, anchor_index);
  split.Y = SamplePath::zeros(tail, dims);
  split.Btilde = SamplePath::zeros(tail, dims);
  for (int d = 0; d < dims; ++d) {
    Vec dW(Eigen::Index(n));
    for (std::size_t j = 0; j < n; ++j)
      dW(Eigen::Index(j)) = sample.W->values(Eigen::Index(j + 1), d) -
                            sample.W->values(Eigen::Index(j), d);
    for (std::size_t i = anchor_index; i <= n; ++i) {
      double y = 0.0, u = 0.0;
      for (std::size_t j = 0; j < anchor_index && j < i; ++j)
        y += w(Eigen::Index(i), Eigen::Index(j)) * dW(Eigen::Index(j));
      for (std::size_t j = anchor_index; j < i; ++j)
        u += w(Eigen::Index(i), Eigen::Index(j)) * dW(Eigen::Index(j));
      split.Y.values(Eigen::Index(i - anchor_index), d) = y;
      split.Btilde.values(Eigen::Index(i - anchor_index), d) = u;
    }
  }
  return split;
}

std::vector<SamplePath> resample_update(const FbmSample& sample, std::size_t anchor_index,
                                        std::size_t m, std::uint64_t seed) {
  if (!sample.W) throw std::invalid_argument("resample_update: need a Volterra sample");
  if (m == 0) throw std::invalid_argument("resample_update: m must be positive");
  const TimeGrid& grid = sample.B.grid;
  const std::size_t n = grid.cells();
  if (anchor_index >= n) throw std::invalid_argument("resample_update: anchor out of range");
  const Mat& w = volterra_cell_weights(sample.params.H, grid);
  const int dims = sample.params.dims;
  const double dt = grid.horizon() / double(n);
  const double sdt = std::sqrt(dt);
  const std::size_t tail_cells = n - anchor_index;

  TimeGrid tail = suffix_grid(grid, anchor_index);
  // block of weights acting on post-anchor cells
  const Mat block = w.block(Eigen::Index(anchor_index), Eigen::Index(anchor_index),
                            Eigen::Index(tail_cells + 1), Eigen::Index(tail_cells));
  std::vector<SamplePath> out;
  out.reserve(m);
  for (std::size_t path = 0; path < m; ++path) {
    SamplePath p = SamplePath::zeros(tail, dims);
    for (int d = 0; d < dims; ++d) {
      const Mat dW = sdt * gaussian_matrix(tail_cells, 1,
                                           mix_seed(seed, path),
                                           std::uint64_t(d));
      p.values.col(d) = block * dW;
    }
    out.push_back(std::move(p));
  }
  return out;
}

YMomentReport y_moment_check(double H, double s, double u, double t, double p,
                             std::size_t mc, std::uint64_t seed) {
  if (!(0.0 <= s && s < u && u < t)) throw std::invalid_argument("y_moment_check: need s < u < t");
  YMomentReport rep;
  rep.bound = std::pow(t - s, H) - std::pow(u - s, H);
  if (is_half(H) || s == 0.0) {
    // Y^{H,s} vanishes at H = 1/2; with s = 0 there is no history.
    rep.lhs = 0.0;
    rep.ratio = 0.0;
    return rep;
  }
  const KernelTable& tab = table_for(H);
  boost::math::quadrature::tanh_sinh<double> ts;
  rep.variance = ts.integrate(
      [&](double r) {
        if (r <= 0.0) return 0.0;
        const double d = kernel_eval(tab, t, r) - kernel_eval(tab, u, r);
        return d * d;
      },
      0.0, s, 1e-11);
  const double sigma = std::sqrt(std::max(0.0, rep.variance));
  // exact |N(0,1)|^p moment
  const double cp = std::pow(std::exp2(p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(M_PI),
                             1.0 / p);
  rep.lhs = sigma * cp;
  rep.ratio = rep.bound > 0.0 ? rep.lhs / rep.bound : 0.0;
  if (mc > 0) {
    Rng rng(seed);
    double acc = 0.0;
    for (std::size_t i = 0; i < mc; ++i) acc += std::pow(std::abs(sigma * rng.gaussian()), p);
    rep.mc_estimate = std::pow(acc / double(mc), 1.0 / p);
  }
  return rep;
}

}  // namespace roughwave
