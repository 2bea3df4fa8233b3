#include <cstdlib>
#include <cstring>

#include "hfspec/errors.hpp"
#include "hfspec/kernels.hpp"

namespace hfspec::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("HFSPEC_ISA"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
#if defined(HFSPEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

void check_sizes(std::span<const double> centers, std::span<const double> weights,
                 std::span<const double> grid, std::span<double> out) {
  if (centers.size() != weights.size()) throw PreconditionError("centers and weights differ in length");
  if (grid.size() != out.size()) throw PreconditionError("grid and output differ in length");
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void lorentzian_accumulate(std::span<const double> centers, std::span<const double> weights,
                           double fwhm, std::span<const double> grid, std::span<double> out) {
  check_sizes(centers, weights, grid, out);
#if defined(HFSPEC_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::lorentzian_accumulate(centers, weights, fwhm, grid, out);
#endif
  scalar::lorentzian_accumulate(centers, weights, fwhm, grid, out);
}

void gaussian_accumulate(std::span<const double> centers, std::span<const double> weights,
                         double sigma, std::span<const double> grid, std::span<double> out) {
  check_sizes(centers, weights, grid, out);
#if defined(HFSPEC_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::gaussian_accumulate(centers, weights, sigma, grid, out);
#endif
  scalar::gaussian_accumulate(centers, weights, sigma, grid, out);
}

}  // namespace hfspec::kernels
