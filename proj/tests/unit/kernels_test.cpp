#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "rideshare/kernels/kernels.h"

using namespace rideshare::kernels;

namespace {

struct RandomColumns {
  std::vector<std::int64_t> start{0};
  std::vector<std::int32_t> rows;
  std::vector<double> values;
};

RandomColumns random_columns(std::mt19937_64& rng, int columns, int num_rows, int max_nnz) {
  RandomColumns c;
  std::uniform_int_distribution<int> nnz(0, max_nnz);
  std::uniform_int_distribution<int> row(0, num_rows - 1);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  for (int j = 0; j < columns; ++j) {
    const int k = nnz(rng);
    for (int e = 0; e < k; ++e) {
      c.rows.push_back(row(rng));
      c.values.push_back(val(rng));
    }
    c.start.push_back(static_cast<std::int64_t>(c.rows.size()));
  }
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("kernel column_dots matches a direct sparse dot product") {
  std::mt19937_64 rng(11);
  const int columns = 37;
  const int num_rows = 19;
  const int width = 5;
  auto c = random_columns(rng, columns, num_rows, width);
  auto ell = make_blocked_ell(columns, width, c.start, c.rows, c.values);
  std::vector<double> y(num_rows);
  std::vector<double> base(columns);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (auto& v : y) v = val(rng);
  for (auto& v : base) v = val(rng);
  std::vector<double> out(ell.padded_columns());
  scalar_kernels().column_dots(ell, 0, columns, y.data(), base.data(), out.data());
  for (int j = 0; j < columns; ++j) {
    double dot = 0.0;
    for (auto e = c.start[j]; e < c.start[j + 1]; ++e) dot += y[c.rows[e]] * c.values[e];
    CHECK(out[j] == doctest::Approx(base[j] - dot).epsilon(1e-12));
  }
}

TEST_CASE("kernel variants agree bit for bit") {
  const KernelTable* avx2 = avx2_kernels();
  if (avx2 == nullptr || !cpu_has_avx2()) {
    MESSAGE("AVX2 unavailable; only the scalar kernels run here");
    return;
  }
  const auto& scalar = scalar_kernels();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> size(1, 90);
    const int columns = size(rng);
    const int num_rows = size(rng);
    const int width = 1 + trial % 7;
    auto c = random_columns(rng, columns, num_rows, width);
    auto ell = make_blocked_ell(columns, width, c.start, c.rows, c.values);
    std::vector<double> y(num_rows);
    std::vector<double> base(columns);
    std::uniform_real_distribution<double> val(-1e3, 1e3);
    for (auto& v : y) v = val(rng);
    for (auto& v : base) v = val(rng);
    std::vector<double> a(ell.padded_columns(), 0.0);
    std::vector<double> b(ell.padded_columns(), 0.0);
    const int begin = (trial % 3) * kLanes < columns ? (trial % 3) * kLanes : 0;
    const double* base_ptr = trial % 2 == 0 ? base.data() : nullptr;
    scalar.column_dots(ell, begin, columns, y.data(), base_ptr, a.data());
    avx2->column_dots(ell, begin, columns, y.data(), base_ptr, b.data());
    for (int j = begin; j < columns; ++j) REQUIRE(same_bits(a[j], b[j]));

    std::vector<double> d(columns);
    std::vector<double> dir(columns);
    std::uniform_int_distribution<int> sign(-1, 1);
    std::uniform_int_distribution<int> coarse(-4, 4);
    for (int j = 0; j < columns; ++j) {
      d[j] = trial % 4 == 0 ? coarse(rng) : val(rng);
      dir[j] = sign(rng);
    }
    const auto ca = scalar.dantzig_select(d, dir, 1e-9, 17);
    const auto cb = avx2->dantzig_select(d, dir, 1e-9, 17);
    REQUIRE(ca.index == cb.index);
    REQUIRE(same_bits(ca.score, cb.score));
    REQUIRE(scalar.argmin(d) == avx2->argmin(d));
  }
  CHECK(scalar.argmin(std::span<const double>{}) == -1);
  CHECK(avx2->argmin(std::span<const double>{}) == -1);
}

TEST_CASE("kernel selection honours the scalar override") {
  const char* forced = std::getenv("RIDESHARE_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") {
    CHECK(active().name == "scalar");
  } else if (avx2_kernels() != nullptr && cpu_has_avx2()) {
    CHECK(active().name == avx2_kernels()->name);
  }
}

TEST_CASE("kernel dantzig_select ties go to the lowest index") {
  const std::vector<double> d{-2.0, 1.0, -2.0, 2.0, 0.0};
  const std::vector<double> dir{1.0, -1.0, 1.0, -1.0, 1.0};
  const auto c = scalar_kernels().dantzig_select(d, dir, 1e-9, 0);
  CHECK(c.index == 0);
  CHECK(c.score == 2.0);
  const std::vector<double> values{3.0, 1.0, 1.0, 2.0};
  CHECK(scalar_kernels().argmin(values) == 1);
}
