#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hfspec/errors.hpp"
#include "hfspec/kernels.hpp"

using namespace hfspec::kernels;

namespace {

struct Case {
  std::vector<double> centers, weights, grid;
  double width;
};

Case random_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-500, 500);
  std::uniform_int_distribution<int> n_lines(0, 25), n_grid(1, 1031);
  Case c;
  const int nl = n_lines(rng);
  for (int k = 0; k < nl; ++k) {
    c.centers.push_back(u(rng));
    c.weights.push_back(std::abs(u(rng)) / 500.0);
  }
  const int ng = n_grid(rng);
  const double lo = u(rng);
  for (int k = 0; k < ng; ++k) c.grid.push_back(lo + 0.7 * k);
  c.width = 0.5 + std::abs(u(rng)) / 5.0;
  return c;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0, diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    scale = std::max(scale, std::abs(a[k]));
    diff = std::max(diff, std::abs(a[k] - b[k]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

TEST_CASE("scalar Lorentzian matches the closed form") {
  const double c[] = {1.0};
  const double w[] = {2.0};
  const double g[] = {1.0, 3.0};
  std::vector<double> out(2, 0.5);
  scalar::lorentzian_accumulate(c, w, 4.0, g, out);
  CHECK(out[0] == doctest::Approx(0.5 + 2.0 * 2.0 / (M_PI * 4.0)));
  CHECK(out[1] == doctest::Approx(0.5 + 2.0 / M_PI * 2.0 / (4.0 + 4.0)));
}

TEST_CASE("scalar Gaussian matches the closed form") {
  const double c[] = {0.0};
  const double w[] = {1.0};
  const double g[] = {0.0, 2.0};
  std::vector<double> out(2, 0.0);
  scalar::gaussian_accumulate(c, w, 2.0, g, out);
  CHECK(out[0] == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * M_PI))));
  CHECK(out[1] == doctest::Approx(std::exp(-0.5) / (2.0 * std::sqrt(2.0 * M_PI))));
}

TEST_CASE("dispatch validates sizes") {
  const double c[] = {0.0, 1.0};
  const double w[] = {1.0};
  const double g[] = {0.0};
  std::vector<double> out(1);
  CHECK_THROWS_AS(lorentzian_accumulate(c, w, 1.0, g, out), hfspec::PreconditionError);
  std::vector<double> out2(2);
  CHECK_THROWS_AS(gaussian_accumulate(std::span(c, 1), w, 1.0, g, out2), hfspec::PreconditionError);
}

TEST_CASE("isa names") {
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_name(Isa::avx2) == "avx2");
  MESSAGE("active kernel ISA: " << isa_name(active_isa()));
}

#if defined(HFSPEC_HAVE_AVX2)
TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) {
    MESSAGE("CPU lacks AVX2/FMA, equivalence not exercised");
    return;
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto c = random_case(seed);
    std::vector<double> a(c.grid.size(), 0.25), b(c.grid.size(), 0.25);
    scalar::lorentzian_accumulate(c.centers, c.weights, c.width, c.grid, a);
    avx2::lorentzian_accumulate(c.centers, c.weights, c.width, c.grid, b);
    CHECK(max_rel_diff(a, b) < 1e-13);

    std::fill(a.begin(), a.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
    scalar::gaussian_accumulate(c.centers, c.weights, c.width, c.grid, a);
    avx2::gaussian_accumulate(c.centers, c.weights, c.width, c.grid, b);
    CHECK(max_rel_diff(a, b) < 1e-12);
  }
}

TEST_CASE("AVX2 Gaussian far tail underflows to zero") {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return;
  const double c[] = {0.0};
  const double w[] = {1.0};
  const double g[] = {0.0, 1e3, 2e3, 5e3, -1e4};
  std::vector<double> a(5, 0.0), b(5, 0.0);
  scalar::gaussian_accumulate(c, w, 1.0, g, a);
  avx2::gaussian_accumulate(c, w, 1.0, g, b);
  for (std::size_t k = 1; k < 5; ++k) {
    CHECK(b[k] == 0.0);
    CHECK(a[k] == 0.0);
  }
  CHECK(b[0] == doctest::Approx(a[0]).epsilon(1e-14));
}
#endif
