#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "censwald/error.hpp"

namespace censwald::quad {

struct Options {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  int max_depth = 40;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::span<const double> nodes;
  std::span<const double> weights;
};

/// The 20-point rule used by the adaptive integrators (computed once, thread-safe).
const GaussLegendreRule& rule20();

/// Gauss-Legendre rule with `n` points, computed by Newton iteration on P_n.
void gauss_legendre(std::size_t n, std::span<double> nodes, std::span<double> weights);

namespace detail {

template <std::size_t N>
using Values = std::array<double, N>;

template <std::size_t N, class F>
Values<N> panel(F& f, double a, double b) {
  const auto& rule = rule20();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Values<N> sum{};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const Values<N> y = f(mid + half * rule.nodes[k]);
    for (std::size_t c = 0; c < N; ++c) sum[c] += rule.weights[k] * y[c];
  }
  for (auto& s : sum) s *= half;
  return sum;
}

template <std::size_t N>
double max_abs(const Values<N>& v) {
  double m = 0.0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

template <std::size_t N, class F>
void refine(F& f, double a, double b, const Values<N>& whole, double tol_per_width, double width,
            int depth, const Options& opt, Values<N>& out) {
  const double mid = 0.5 * (a + b);
  const Values<N> left = panel<N>(f, a, mid);
  const Values<N> right = panel<N>(f, mid, b);
  double diff = 0.0;
  for (std::size_t c = 0; c < N; ++c) {
    const double d = std::fabs(left[c] + right[c] - whole[c]);
    if (!std::isfinite(d)) throw NumericalError("quadrature: non-finite integrand");
    diff = std::fmax(diff, d);
  }
  if (diff <= tol_per_width * (b - a) / width || diff == 0.0) {
    for (std::size_t c = 0; c < N; ++c) out[c] += left[c] + right[c];
    return;
  }
  if (depth >= opt.max_depth) {
    throw NumericalError("quadrature: no convergence at requested tolerance");
  }
  refine<N>(f, a, mid, left, tol_per_width, width, depth + 1, opt, out);
  refine<N>(f, mid, b, right, tol_per_width, width, depth + 1, opt, out);
}

}  // namespace detail

/// Adaptive Gauss-Legendre integration of a vector-valued integrand on [a, b].
///
/// Every panel is compared with its two halves; a panel is accepted once the difference is
/// below its share of max(abs_tol, rel_tol * |I|), where |I| is the largest component of a
/// coarse first pass. `f(x)` must return std::array<double, N>.
template <std::size_t N, class F>
std::array<double, N> integrate(F&& f, double a, double b, const Options& opt = {}) {
  constexpr int kInitialPanels = 8;
  const double width = b - a;
  std::array<std::array<double, N>, kInitialPanels> coarse{};
  std::array<double, N> estimate{};
  for (int i = 0; i < kInitialPanels; ++i) {
    const double lo = a + width * i / kInitialPanels;
    const double hi = a + width * (i + 1) / kInitialPanels;
    coarse[i] = detail::panel<N>(f, lo, hi);
    for (std::size_t c = 0; c < N; ++c) estimate[c] += coarse[i][c];
  }
  const double tol = std::fmax(opt.abs_tol, opt.rel_tol * detail::max_abs<N>(estimate));
  std::array<double, N> out{};
  for (int i = 0; i < kInitialPanels; ++i) {
    const double lo = a + width * i / kInitialPanels;
    const double hi = a + width * (i + 1) / kInitialPanels;
    detail::refine<N>(f, lo, hi, coarse[i], tol, width, 0, opt, out);
  }
  return out;
}

/// Integral over (0, inf) through s = t / (1 - t), t in (0, 1).
template <std::size_t N, class F>
std::array<double, N> integrate_half_line(F&& f, const Options& opt = {}) {
  auto mapped = [&f](double t) {
    std::array<double, N> y{};
    if (t >= 1.0) return y;
    const double one_minus = 1.0 - t;
    const double s = t / one_minus;
    const double jac = 1.0 / (one_minus * one_minus);
    y = f(s);
    for (auto& v : y) v = (v == 0.0) ? 0.0 : v * jac;
    return y;
  };
  return integrate<N>(mapped, 0.0, 1.0, opt);
}

/// Integral over the whole real line, split at `center` into two mapped half-lines.
template <std::size_t N, class F>
std::array<double, N> integrate_real_line(F&& f, double center = 0.0, const Options& opt = {}) {
  auto right = integrate_half_line<N>([&](double s) { return f(center + s); }, opt);
  const auto left = integrate_half_line<N>([&](double s) { return f(center - s); }, opt);
  for (std::size_t c = 0; c < N; ++c) right[c] += left[c];
  return right;
}

/// Scalar convenience wrapper around integrate().
template <class F>
double integrate_scalar(F&& f, double a, double b, const Options& opt = {}) {
  return integrate<1>([&f](double x) { return std::array<double, 1>{f(x)}; }, a, b, opt)[0];
}

}  // namespace censwald::quad
