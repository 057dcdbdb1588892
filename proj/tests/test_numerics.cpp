#include <cmath>
#include <vector>

#include "doctest.h"
#include "lossq/error.hpp"
#include "lossq/numerics.hpp"
#include "lossq/rng.hpp"

using namespace lossq;

TEST_CASE("compensated sum keeps low-order terms") {
  CompensatedSum<double> acc;
  for (double v : {1.0, 1e100, 1.0, -1e100}) acc += v;
  CHECK(acc.value() == 2.0);

  std::vector<double> tenths(1000, 0.1);
  CHECK(stable_sum<double>(tenths) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("bracketed root") {
  const double r = bracketed_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  CHECK(std::abs(r - std::sqrt(2.0)) < 1e-14);
  CHECK_THROWS_AS((void)bracketed_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  BracketError);
}

TEST_CASE("binomial and log_add_exp") {
  CHECK(binomial(10, 3) == 120.0);
  CHECK(binomial(16, 8) == 12870.0);
  CHECK(binomial(3, 5) == 0.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_add_exp(-INFINITY, 2.0) == 2.0);
}

TEST_CASE("xoshiro streams") {
  Xoshiro256 a(7), b(7), c(8);
  for (int i = 0; i < 5; ++i) CHECK(a() == b());
  CHECK(a() != c());

  Xoshiro256 d(7);
  Xoshiro256 e = d;
  e.jump();
  CHECK(d() != e());

  Xoshiro256 u(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform_open0();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo > 0.0);
  CHECK(hi <= 1.0);
}
