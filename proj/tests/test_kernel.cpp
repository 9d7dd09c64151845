#include "addk/error.hpp"
#include "addk/kernel.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace addk;

namespace {

const Tensor kX = Tensor::matrix({{1, 1, 5}, {0, 6, 4}, {0, 1, 0}});
const Tensor kXPrime = Tensor::matrix({{8, 0, 7}, {1, 4, 3}, {1, 2, 1}});

// exp(15 * (x/6 - x'/8)) evaluated to 30 digits with mpmath, frozen.
const double kWorkedExact[9] = {
    3.726653172078671e-06, 12.182493960703473, 0.5352614285189903,
    0.15335496684492847,   1808.0424144560632, 79.43983955226133,
    0.15335496684492847,   0.2865047968601901, 0.15335496684492847};

// The matrix as printed (rounded for display).
const double kWorkedPrinted[9] = {.0, 12.2, .5, .2, 1808, 79.8, .2, .3, .2};

} // namespace

TEST_CASE("worked example at alpha = 15") {
  const auto r = directed_kernel(kX, kXPrime, 15.0);
  REQUIRE(r.raw);
  const auto direct = oracle::direct_kernel(oracle::as_doubles(kX),
                                            oracle::as_doubles(kXPrime), 15.0L);
  for (std::size_t i = 0; i < 9; ++i) {
    CAPTURE(i);
    CHECK(oracle::rel_close((*r.raw)[i], kWorkedExact[i], 1e-6));
    CHECK(oracle::rel_close(kWorkedExact[i], static_cast<double>(direct[i]), 1e-12));
    const double tol = std::max(0.5, 0.01 * kWorkedPrinted[i]);
    CHECK(std::fabs((*r.raw)[i] - kWorkedPrinted[i]) <= tol);
  }
  // The printed 79.8 is not what the formula gives.
  CHECK((*r.raw)[5] == doctest::Approx(79.44).epsilon(1e-4));
  CHECK(r.alpha == 15.0);
  CHECK(concentration(r, 0.5) == 1);
  CHECK(argmax(r.normalized) == 4);
  CHECK(r.normalized[4] == 1.0f);
}

TEST_CASE("hand-evaluated 1x2 map at alpha = 1") {
  const auto r = directed_kernel(Tensor::matrix({{2, 0}}), Tensor::matrix({{0, 3}}), 1.0);
  REQUIRE(r.raw);
  CHECK((*r.raw)[0] == doctest::Approx(M_E).epsilon(1e-7));
  CHECK((*r.raw)[1] == doctest::Approx(1.0 / M_E).epsilon(1e-7));
  CHECK(r.log_values[0] == doctest::Approx(1.0));
  CHECK(r.log_values[1] == doctest::Approx(-1.0));
  CHECK(r.normalized[0] == 1.0f);
  CHECK(r.normalized[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-7));
}

TEST_CASE("identical operands give all ones") {
  std::mt19937_64 rng(21);
  for (double alpha : {0.1, 1.0, 5.0, 15.0, 50.0, 500.0}) {
    const auto x = oracle::random_positive_map(rng, 4, 6);
    const auto r = directed_kernel(x, x, alpha);
    REQUIRE(r.raw);
    for (float v : r.raw->data()) CHECK(v == 1.0f);
    for (float v : r.normalized.data()) CHECK(v == 1.0f);
  }
}

TEST_CASE("argument errors") {
  const auto x = Tensor::matrix({{1, 2}, {3, 4}});
  CHECK_THROWS_AS(directed_kernel(x, Tensor::matrix({{1, 2, 3}}), 5.0), Error);
  CHECK_THROWS_AS(directed_kernel(x, x, 0.0), Error);
  CHECK_THROWS_AS(directed_kernel(x, x, -1.0), Error);
  CHECK_THROWS_AS(directed_kernel(x, x, std::nan("")), Error);
  CHECK_THROWS_AS(directed_kernel(Tensor({2, 2}), x, 5.0), NonPositiveMaxError);
  CHECK_THROWS_AS(directed_kernel(x, Tensor::matrix({{-1, -2}, {-3, -4}}), 5.0),
                  NonPositiveMaxError);
  try {
    directed_kernel(x, x, -1.0);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Parameter);
  }
  try {
    directed_kernel(x, Tensor({3, 3}), 1.0);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Dimension);
  }
}

TEST_CASE("raw is dropped when K leaves float32 range, normalized survives") {
  // x' has a large negative excursion, so x/max - x'/max reaches 101.
  const auto x = Tensor::matrix({{1, 1}});
  const auto xp = Tensor::matrix({{1, -100}});
  const auto r = directed_kernel(x, xp, 50.0);
  CHECK_FALSE(r.raw);
  CHECK(r.log_values[1] == doctest::Approx(5050.0));
  CHECK(r.normalized[1] == 1.0f);
  CHECK(r.normalized[0] == 0.0f); // exp(-5050) underflows
  const auto ok = directed_kernel(x, xp, 0.5);
  CHECK(ok.raw);
}

TEST_CASE("concentration") {
  const auto ones = directed_kernel(Tensor::filled({3, 4}, 2.0f), Tensor::filled({3, 4}, 7.0f), 5.0);
  CHECK(concentration(ones, 0.5) == 12);
  CHECK(concentration(ones, 1e-9) == 12);

  const auto r = directed_kernel(kX, kXPrime, 15.0);
  CHECK(concentration(r, 1e-12) == 9);
  CHECK(concentration(r, 0.04) == 2); // 79.44 / 1808 = 0.0439
  CHECK_THROWS_AS(concentration(r, 0.0), Error);
  CHECK_THROWS_AS(concentration(r, 1.0), Error);
}

TEST_CASE("property: normalized = exp(log - max(log)) = raw / max(raw)") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> adist(0.1, 30.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = oracle::random_positive_map(rng, 5, 5);
    const auto xp = oracle::random_positive_map(rng, 5, 5);
    const auto r = directed_kernel(x, xp, adist(rng));
    REQUIRE(r.raw);
    const double max_log = max_value(r.log_values);
    const double max_raw = max_value(*r.raw);
    CHECK(max_value(r.normalized) == 1.0f);
    for (std::size_t i = 0; i < 25; ++i) {
      CHECK(r.normalized[i] >= 0.0f);
      CHECK(r.normalized[i] <= 1.0f);
      CHECK(oracle::rel_close(r.normalized[i], std::exp(r.log_values[i] - max_log), 1e-5));
      CHECK(oracle::rel_close(r.normalized[i], (*r.raw)[i] / max_raw, 1e-6));
      CHECK((*r.raw)[i] > 0.0f);
    }
  }
}

TEST_CASE("property: swapping operands inverts K cell-wise") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_positive_map(rng, 3, 7);
    const auto xp = oracle::random_positive_map(rng, 3, 7);
    const auto fwd = directed_kernel(x, xp, 15.0), bwd = directed_kernel(xp, x, 15.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(oracle::rel_close(double{(*fwd.raw)[i]} * (*bwd.raw)[i], 1.0, 1e-5));
    CHECK_FALSE(*fwd.raw == *bwd.raw);
  }
}

TEST_CASE("property: concentration never grows with alpha") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_positive_map(rng, 7, 7);
    const auto xp = oracle::random_positive_map(rng, 7, 7);
    for (double level : {0.1, 0.5, 0.9}) {
      std::size_t prev = x.size();
      for (double alpha = 0.25; alpha <= 128; alpha *= 2) {
        const auto c = concentration(directed_kernel(x, xp, alpha), level);
        CHECK(c <= prev);
        CHECK(c >= 1);
        prev = c;
      }
    }
  }
}
