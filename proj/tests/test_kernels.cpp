#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "franson/dispersion.hpp"
#include "franson/kernels.hpp"

using namespace franson;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_wavelengths(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> wl(1450.0, 1650.0);
  std::vector<double> out(n);
  for (auto& x : out) x = wl(rng);
  return out;
}

void compare_tables(const kernels::KernelTable& x, const kernels::KernelTable& y) {
  // Odd sizes exercise the scalar tails of the vector loops.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 33u, 1001u}) {
    CAPTURE(n);
    const auto a = random_wavelengths(n, 100 + n);
    std::vector<double> b1(n), b2(n), na1(n), na2(n), nb1(n), nb2(n), p1(n), p2(n);
    x.conjugate(770.0, a.data(), b1.data(), n);
    y.conjugate(770.0, a.data(), b2.data(), n);
    CHECK(same_bits(b1, b2));
    for (const auto* model : {&fused_silica(), &smf28()}) {
      x.sellmeier_index(model->terms(), a.data(), na1.data(), n);
      y.sellmeier_index(model->terms(), a.data(), na2.data(), n);
      CHECK(same_bits(na1, na2));
      x.sellmeier_index(model->terms(), b1.data(), nb1.data(), n);
      y.sellmeier_index(model->terms(), b1.data(), nb2.data(), n);
      CHECK(same_bits(nb1, nb2));
      x.phase_sum(0.067 - 8.5e-6, 0.067, a.data(), na1.data(), b1.data(), nb1.data(), p1.data(), n);
      y.phase_sum(0.067 - 8.5e-6, 0.067, a.data(), na1.data(), b1.data(), nb1.data(), p2.data(), n);
      CHECK(same_bits(p1, p2));
      x.reduce(0.731, p1.data(), n);
      y.reduce(0.731, p2.data(), n);
      CHECK(same_bits(p1, p2));
    }
  }
}

}  // namespace

TEST_CASE("active kernel table is one of the variants") {
  const auto& active = kernels::active();
  CHECK((active.name == kernels::scalar_table().name ||
         (kernels::avx2_table() != nullptr && active.name == kernels::avx2_table()->name)));
}

TEST_CASE("vector kernels are bit-identical to the scalar reference") {
  const auto* avx2 = kernels::avx2_table();
  if (avx2 == nullptr) {
    MESSAGE("AVX2 kernels unavailable on this build or CPU; comparing scalar with itself");
    compare_tables(kernels::scalar_table(), kernels::scalar_table());
    return;
  }
  compare_tables(kernels::scalar_table(), *avx2);
}

TEST_CASE("reduce handles the interval ends and large phases") {
  std::vector<double> edge{3.141592653589793, -3.141592653589793, 0.0, 1e6, -1e6, 6.283185307179586};
  for (const auto* table : {&kernels::scalar_table(), kernels::avx2_table()}) {
    if (table == nullptr) continue;
    auto v = edge;
    table->reduce(0.0, v.data(), v.size());
    for (double x : v) {
      CHECK(x > -3.141592653589793);
      CHECK(x <= 3.141592653589793);
    }
  }
}

TEST_CASE("batch index equals pointwise index") {
  const auto a = random_wavelengths(257, 5);
  std::vector<double> n(a.size());
  refractive_index_batch(smf28(), a, n);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(n[i] == refractive_index(smf28(), a[i]));
}
