#include "fracdyn/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fracdyn/errors.hpp"

namespace fracdyn::kernels {

namespace {

// Generalized binomial coefficient C(p, k).
double binom(double p, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (p - i) / (i + 1);
  return c;
}

// (d+1)^p - 2 d^p + (d-1)^p without cancellation for large d.
double second_difference_of_power(double p, std::size_t d) {
  const double x = static_cast<double>(d);
  if (d < 64) return std::pow(x + 1.0, p) - 2.0 * std::pow(x, p) + std::pow(x - 1.0, p);
  const double inv2 = 1.0 / (x * x);
  double acc = 0.0;
  double pw = inv2;
  for (int k = 1; k <= 8; ++k) {
    acc += binom(p, 2 * k) * pw;
    pw *= inv2;
  }
  return 2.0 * std::pow(x, p) * acc;
}

bool use_parallel(Exec exec, std::size_t n) { return exec == Exec::kParallel && n > 256; }

}  // namespace

int max_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("FRACDYN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(n, 1);
}

ProductTrapezoidWeights::ProductTrapezoidWeights(double eps, std::size_t n_max)
    : eps_(eps), start_(n_max + 1, 0.0), interior_(n_max + 1, 0.0) {
  if (!(eps > 0.0)) throw DomainError("ProductTrapezoidWeights: eps must be positive");
  const double p = eps + 1.0;
  for (std::size_t j = 1; j <= n_max; ++j) {
    const double x = 1.0 / static_cast<double>(j);
    const double jj = static_cast<double>(j);
    // (j-1)^{eps+1} - (j-1-eps) j^eps, rewritten around j to avoid cancellation
    start_[j] = std::pow(jj, eps) * (jj * std::expm1(p * std::log1p(-x)) + p);
  }
  for (std::size_t d = 1; d <= n_max; ++d) interior_[d] = second_difference_of_power(p, d);
}

double ProductTrapezoidWeights::scale(double h) const {
  return std::pow(h, eps_) / std::tgamma(eps_ + 2.0);
}

double fractional_integral_at(std::span<const double> f, std::size_t j,
                              const ProductTrapezoidWeights& w, double h) {
  if (j == 0) return 0.0;
  double acc = w.start(j) * f[0];
  for (std::size_t k = 1; k < j; ++k) acc += w.interior(j - k) * f[k];
  acc += f[j];
  return w.scale(h) * acc;
}

void fractional_integral(std::span<const double> f, double eps, double h, std::span<double> out,
                         Exec exec) {
  const std::size_t n = f.size();
  if (out.size() != n) throw DomainError("fractional_integral: output size mismatch");
  if (n == 0) return;
  const ProductTrapezoidWeights w(eps, n - 1);
  const long nn = static_cast<long>(n);
  if (use_parallel(exec, n)) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(max_threads())
    for (long j = 0; j < nn; ++j)
      out[static_cast<std::size_t>(j)] = fractional_integral_at(f, static_cast<std::size_t>(j), w, h);
  } else {
    for (long j = 0; j < nn; ++j)
      out[static_cast<std::size_t>(j)] = fractional_integral_at(f, static_cast<std::size_t>(j), w, h);
  }
}

L1Weights::L1Weights(double beta, std::size_t n_max) : beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("L1Weights: beta must lie in (0,1)");
  reserve(n_max);
}

void L1Weights::reserve(std::size_t n) {
  const double q = 1.0 - beta_;
  for (std::size_t i = b_.size(); i < n; ++i) {
    if (i == 0) {
      b_.push_back(1.0);
    } else {
      const double x = static_cast<double>(i);
      b_.push_back(std::pow(x, q) * std::expm1(q * std::log1p(1.0 / x)));
    }
  }
}

double l1_history_sum(std::span<const double> increments, std::size_t j, const L1Weights& w) {
  double acc = 0.0;
  for (std::size_t k = 0; k < j; ++k) acc += w[j - 1 - k] * increments[k];
  return acc;
}

void l1_caputo(std::span<const double> x, double beta, double h, std::span<double> out,
               Exec exec) {
  const std::size_t n = x.size();
  if (out.size() != n) throw DomainError("l1_caputo: output size mismatch");
  if (n == 0) return;
  const L1Weights w(beta, n);
  std::vector<double> dx(n > 0 ? n - 1 : 0);
  for (std::size_t k = 0; k + 1 < n; ++k) dx[k] = x[k + 1] - x[k];
  const double scale = std::pow(h, -beta) / std::tgamma(2.0 - beta);
  const long nn = static_cast<long>(n);
  if (use_parallel(exec, n)) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(max_threads())
    for (long j = 0; j < nn; ++j)
      out[static_cast<std::size_t>(j)] = scale * l1_history_sum(dx, static_cast<std::size_t>(j), w);
  } else {
    for (long j = 0; j < nn; ++j)
      out[static_cast<std::size_t>(j)] = scale * l1_history_sum(dx, static_cast<std::size_t>(j), w);
  }
}

namespace {
double convolution_at(std::span<const double> q, std::span<const double> g,
                      std::span<const double> lower, std::span<const double> upper,
                      std::size_t j) {
  double acc = 0.0;
  for (std::size_t i = 0; i < j; ++i)
    acc += lower[i] * q[j - i] * g[i] + upper[i] * q[j - i - 1] * g[i + 1];
  return acc;
}
}  // namespace

void weighted_convolution(std::span<const double> q, std::span<const double> g,
                          std::span<const double> lower, std::span<const double> upper,
                          std::span<double> out, Exec exec) {
  const std::size_t n = q.size();
  if (g.size() != n || out.size() != n || lower.size() + 1 < n || upper.size() + 1 < n)
    throw DomainError("weighted_convolution: size mismatch");
  const long nn = static_cast<long>(n);
  if (use_parallel(exec, n)) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(max_threads())
    for (long j = 0; j < nn; ++j)
      out[static_cast<std::size_t>(j)] =
          convolution_at(q, g, lower, upper, static_cast<std::size_t>(j));
  } else {
    for (long j = 0; j < nn; ++j)
      out[static_cast<std::size_t>(j)] =
          convolution_at(q, g, lower, upper, static_cast<std::size_t>(j));
  }
}

}  // namespace fracdyn::kernels
