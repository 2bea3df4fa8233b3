#include <cmath>
#include <numbers>

#include "hfspec/kernels.hpp"

namespace hfspec::kernels::scalar {

void lorentzian_accumulate(std::span<const double> centers, std::span<const double> weights,
                           double fwhm, std::span<const double> grid, std::span<double> out) {
  const double gamma = 0.5 * fwhm;
  const double g2 = gamma * gamma;
  const double norm = gamma / std::numbers::pi;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double d = grid[k] - centers[j];
      acc += weights[j] / (d * d + g2);
    }
    out[k] += norm * acc;
  }
}

void gaussian_accumulate(std::span<const double> centers, std::span<const double> weights,
                         double sigma, std::span<const double> grid, std::span<double> out) {
  const double inv2s2 = 0.5 / (sigma * sigma);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double d = grid[k] - centers[j];
      acc += weights[j] * std::exp(-d * d * inv2s2);
    }
    out[k] += norm * acc;
  }
}

}  // namespace hfspec::kernels::scalar
