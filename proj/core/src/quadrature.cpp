#include "censwald/quadrature.hpp"

#include <numbers>
#include <vector>

namespace censwald::quad {

void gauss_legendre(std::size_t n, std::span<double> nodes, std::span<double> weights) {
  if (n == 0 || nodes.size() < n || weights.size() < n) {
    throw InvalidArgument("gauss_legendre: bad rule size");
  }
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

const GaussLegendreRule& rule20() {
  static const auto storage = [] {
    std::vector<double> buf(40);
    gauss_legendre(20, std::span<double>(buf.data(), 20), std::span<double>(buf.data() + 20, 20));
    return buf;
  }();
  static const GaussLegendreRule rule{std::span<const double>(storage.data(), 20),
                                      std::span<const double>(storage.data() + 20, 20)};
  return rule;
}

}  // namespace censwald::quad
