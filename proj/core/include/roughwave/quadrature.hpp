#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace roughwave {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [0,1].
inline const QuadratureRule& gauss_legendre(std::size_t n) {
  static std::map<std::size_t, QuadratureRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) { p1 = x; }
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      const double dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
      p0 = p1;
      p1 = p2;
    }
    const double dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = 0.5 * (x + 1.0);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

/// Gauss-Hermite rule for the standard normal weight: sum w_i f(x_i)
/// approximates E[f(Z)], Z ~ N(0,1). Weights renormalised to sum to 1 so
/// constants are preserved exactly.
inline const QuadratureRule& gauss_hermite(std::size_t n) {
  static std::map<std::size_t, QuadratureRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be positive");
  // Golub-Welsch on the monic Hermite (probabilists') Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double off = std::sqrt(double(k));
    J(Eigen::Index(k - 1), Eigen::Index(k)) = off;
    J(Eigen::Index(k), Eigen::Index(k - 1)) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(Eigen::Index(i));
    const double v = es.eigenvectors()(0, Eigen::Index(i));
    rule.weights[i] = v * v;
    wsum += rule.weights[i];
  }
  for (auto& w : rule.weights) w /= wsum;
  return cache.emplace(n, std::move(rule)).first->second;
}

/// Fixed-order Gauss-Legendre integral of f over [a,b].
template <class F>
double integrate_gl(F&& f, double a, double b, std::size_t n = 32) {
  const auto& rule = gauss_legendre(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += rule.weights[i] * f(a + (b - a) * rule.nodes[i]);
  return acc * (b - a);
}

}  // namespace roughwave
