#pragma once

// Lineshape accumulation kernels. Scalar versions are the reference; AVX2
// versions are selected at runtime when the CPU supports them.

#include <span>
#include <string_view>

namespace hfspec::kernels {

enum class Isa { scalar, avx2 };

// Best ISA available on this machine and build. HFSPEC_ISA=scalar in the
// environment forces the scalar path.
Isa active_isa();
std::string_view isa_name(Isa isa);

// out[k] += sum_j weights[j] * L(grid[k]; centers[j], fwhm), unit-area Lorentzian.
void lorentzian_accumulate(std::span<const double> centers, std::span<const double> weights,
                           double fwhm, std::span<const double> grid, std::span<double> out);

// out[k] += sum_j weights[j] * N(grid[k]; centers[j], sigma), unit-area Gaussian.
void gaussian_accumulate(std::span<const double> centers, std::span<const double> weights,
                         double sigma, std::span<const double> grid, std::span<double> out);

namespace scalar {
void lorentzian_accumulate(std::span<const double> centers, std::span<const double> weights,
                           double fwhm, std::span<const double> grid, std::span<double> out);
void gaussian_accumulate(std::span<const double> centers, std::span<const double> weights,
                         double sigma, std::span<const double> grid, std::span<double> out);
}  // namespace scalar

#if defined(HFSPEC_HAVE_AVX2)
namespace avx2 {
void lorentzian_accumulate(std::span<const double> centers, std::span<const double> weights,
                           double fwhm, std::span<const double> grid, std::span<double> out);
void gaussian_accumulate(std::span<const double> centers, std::span<const double> weights,
                         double sigma, std::span<const double> grid, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace hfspec::kernels
