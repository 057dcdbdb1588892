#include <cmath>
#include <vector>

#include "doctest.h"
#include "lossq/asymptotics.hpp"
#include "lossq/error.hpp"
#include "lossq/mcoracle.hpp"
#include "lossq/recurrence.hpp"
#include "oracles.hpp"

using namespace lossq;

namespace {

QueueModel at_load(const char* dist, int m, int n, double rho, double mu = 1.0) {
  return QueueModel::with_load(parse_distribution(dist), m, n, mu, rho);
}

}  // namespace

TEST_CASE("solve_generic examples") {
  const std::vector<double> identity{1.0};
  const PiSequence q = solve_generic(identity, 1.0, 50);
  for (int j = 0; j <= 50; ++j) CHECK(q.value(j) == doctest::Approx(1.0).epsilon(1e-15));

  // M/M/1 at rho = 0.5: r_j = (rho/(1+rho)) (1/(1+rho))^j, and with capacity
  // N = n + 1 the loss is (1-rho) rho^N / (1 - rho^(N+1)).
  const double rho = 0.5;
  std::vector<double> f(40);
  for (int j = 0; j < 40; ++j) f[j] = rho / (1.0 + rho) * std::pow(1.0 / (1.0 + rho), j);
  const PiSequence mm1 = solve_generic(f, 1.0, 31);
  for (int n = 0; n <= 30; ++n) {
    const int cap = n + 1;
    const double exact = (1.0 - rho) * std::pow(rho, cap) / (1.0 - std::pow(rho, cap + 1));
    CHECK(std::abs(1.0 / mm1.value(cap) - exact) < 1e-12 * std::max(1.0, exact));
    CHECK(std::abs(1.0 / mm1.value(cap) / exact - 1.0) < 1e-12);
  }

  // gamma_1 = 0.5: Q_n -> Q_0 / (1 - gamma_1) = 2 Q_0.
  const std::vector<double> half{0.5, 0.5};
  CHECK(std::abs(solve_generic(half, 1.0, 10000).value(10000) - 2.0) < 1e-8);
}

TEST_CASE("solve_generic rejects bad kernels") {
  const std::vector<double> zero_head{0.0, 1.0};
  CHECK_THROWS_AS((void)solve_generic(zero_head, 1.0, 5), DomainError);
  const std::vector<double> heavy{0.6, 0.6};
  CHECK_THROWS_AS((void)solve_generic(heavy, 1.0, 5), DomainError);
  const std::vector<double> negative{0.5, -0.1};
  CHECK_THROWS_AS((void)solve_generic(negative, 1.0, 5), DomainError);
  const std::vector<double> ok{1.0};
  CHECK_THROWS_AS((void)solve_generic(ok, 0.0, 5), DomainError);
}

TEST_CASE("solve_generic rescales without changing ratios") {
  const auto model = at_load("det", 1, 3000, 0.5);
  const KernelSet ks = build_kernel_set(model);
  const PiSequence a = solve_generic(ks.interior, 1.0, 3001);
  const PiSequence b = solve_generic(ks.interior, 1e250, 3001);
  // Q grows past 1e300 many times over; log values stay consistent.
  CHECK(a.log_value(3001) > 3000.0);
  for (int j : {1, 100, 1000, 3001}) {
    CHECK(std::abs((b.log_value(j) - a.log_value(j)) - 250.0 * std::log(10.0)) < 1e-9);
  }
}

TEST_CASE("GI/M/1/n") {
  CHECK(loss_gim1n(at_load("exp", 1, 0, 1.0)).p == doctest::Approx(0.5).epsilon(1e-15));
  for (const char* name : {"det", "exp", "erlang:k=2", "hyper:w=0.3|0.7,rate=0.5|2"}) {
    for (int n : {0, 3, 17}) {
      const auto model = at_load(name, 1, n, 0.9);
      CHECK(std::abs(loss_gim1n(model).p - loss_oracle(model).p) < 1e-12);
    }
  }
  // Reference from an independent matrix-exponential chain.
  CHECK(std::abs(loss_gim1n(at_load("det", 1, 10, 0.999)).p - 0.043633754315313) < 1e-12);
  CHECK_THROWS_AS((void)loss_gim1n(at_load("exp", 2, 1, 0.5)), DomainError);
}

TEST_CASE("GI/M/m/0") {
  for (const char* name : {"det", "erlang:k=3", "gamma:shape=0.5"}) {
    const auto model = at_load(name, 1, 0, 0.7);
    CHECK(loss_gimm0(model).p == doctest::Approx(model.arrivals.lst(model.mu)).epsilon(1e-14));
  }
  for (int m = 1; m <= 10; ++m) {
    for (double a : {0.5, 1.0, 2.0, 5.0}) {
      const QueueModel model{m, 0, 1.0, InterarrivalDistribution::exponential(a)};
      const LossResult r = loss_gimm0(model);
      CHECK(r.method == Method::gim_m0_closed_form);
      CHECK(std::abs(r.p - test::erlang_b(m, a)) < 1e-12);
    }
  }
  const QueueModel dm2{2, 0, 1.0, InterarrivalDistribution::deterministic(1.0)};
  CHECK(std::abs(loss_gimm0(dm2).p - loss_oracle(dm2).p) < 1e-12);
  CHECK_THROWS_AS((void)loss_gimm0(at_load("exp", 2, 1, 0.5)), DomainError);
}

TEST_CASE("GI/M/m/n") {
  for (const char* name : {"det", "hyper:w=0.3|0.7,rate=0.5|2"}) {
    const auto model = at_load(name, 2, 0, 0.8);
    CHECK(std::abs(loss_gimmn(model).p - loss_gimm0(model).p) < 1e-15);
  }
  for (int m : {2, 3}) {
    for (int n : {1, 5, 10}) {
      const double a = 0.9 * m;
      const QueueModel model{m, n, 1.0, InterarrivalDistribution::exponential(a)};
      CHECK(std::abs(loss_gimmn(model).p - test::mmmn_blocking(m, n, a)) < 1e-10);
    }
  }
  // References from an independent matrix-exponential chain.
  CHECK(std::abs(loss_gimmn(at_load("det", 2, 10, 0.999)).p - 0.0423066569305063) < 1e-12);
  CHECK(std::abs(loss_gimmn(at_load("erlang:k=2", 3, 5, 0.9)).p - 0.0592854404807783) < 1e-12);
  const QueueModel h2{4, 10, 1.0 / (4 * 1.3),
                      InterarrivalDistribution::hyperexponential({0.3, 0.7}, {0.5, 2.0})};
  CHECK(std::abs(loss_gimmn(h2).p - 0.284983701926202) < 1e-12);

  const QueueModel wrong = at_load("exp", 2, 3, 0.5);
  CHECK_THROWS_AS((void)loss_gimmn(wrong, build_kernel_set(at_load("exp", 2, 4, 0.5))),
                  DomainError);
}

TEST_CASE("cut chain agrees with the m = 1 recurrence") {
  for (const char* name : {"det", "hyper:w=0.3|0.7,rate=0.5|2", "gamma:shape=0.5"}) {
    for (double rho : {0.1, 0.5, 1.0, 1.3, 3.0}) {
      const auto model = at_load(name, 1, 50, rho);
      const KernelSet ks = build_kernel_set(model);
      const double a = loss_gim1n(model).diagnostics.pi_log;
      const double b = loss_cut_chain(model, ks).diagnostics.pi_log;
      CAPTURE(name);
      CAPTURE(rho);
      CHECK(std::abs(a - b) < 1e-11);
    }
  }
}

TEST_CASE("stationary distributions") {
  const auto mm1 = at_load("exp", 1, 12, 0.8);
  const auto x = stationary_gim1n(mm1);
  REQUIRE(x.size() == 14);
  CHECK(std::abs(stable_sum<double>(x) - 1.0) < 1e-12);
  CHECK(x.back() == doctest::Approx(loss_gim1n(mm1).p).epsilon(1e-12));
  const auto bd = test::mmmn_stationary(1, 12, 0.8);
  for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(x[j] - bd[j]) < 1e-10);

  const auto dm1 = at_load("det", 1, 20, 0.95);
  const auto y = stationary_gim1n(dm1);
  const auto z = stationary_gimmn(dm1);
  for (std::size_t j = 0; j < y.size(); ++j) CHECK(std::abs(y[j] - z[j]) < 1e-12);

  for (int m : {2, 3}) {
    const QueueModel mmm{m, 7, 1.0, InterarrivalDistribution::exponential(0.9 * m)};
    const auto s = stationary_gimmn(mmm);
    const auto ref = test::mmmn_stationary(m, 7, 0.9 * m);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(s[j] - ref[j]) < 1e-12);
  }
  const auto e2 = at_load("erlang:k=2", 3, 15, 1.1);
  const auto s = stationary_gimmn(e2);
  const auto o = stationary_vector(build_chain(e2));
  CHECK(std::abs(stable_sum<double>(s) - 1.0) < 1e-12);
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(s[j] - o[j]) < 1e-12);
}

TEST_CASE("loss decreases strictly in the buffer size") {
  for (const char* name : {"det", "exp", "hyper:w=0.3|0.7,rate=0.5|2"}) {
    for (int m : {1, 2, 4}) {
      for (double rho : {0.6, 1.0, 1.5}) {
        double prev = 1.0;
        for (int n = 0; n <= 40; ++n) {
          const double p = loss_gimmn(at_load(name, m, n, rho)).p;
          CHECK(p < prev);
          prev = p;
        }
      }
    }
  }
}

TEST_CASE("overloaded loss converges to (rho - 1) / rho") {
  for (int m : {1, 2, 3}) {
    double prev_gap = INFINITY;
    // The gap decays geometrically and reaches rounding level near n = 80.
    for (int n : {2, 5, 10, 20, 40}) {
      const double gap = std::abs(loss_gimmn(at_load("det", m, n, 1.2)).p - 1.0 / 6.0);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
    CHECK(std::abs(loss_gimmn(at_load("det", m, 200, 1.2)).p - 1.0 / 6.0) < 1e-14);
  }
}

TEST_CASE("tiny loss probabilities keep full relative precision") {
  const auto model = at_load("det", 3, 400, 0.2);
  const LossResult r = loss_gimmn(model);
  // p itself underflows; its logarithm does not.
  CHECK(std::isfinite(r.diagnostics.pi_log));
  CHECK(r.diagnostics.pi_log > 745.0);
  // Each extra waiting place multiplies p by about sigma.
  const double step = loss_gimmn(at_load("det", 3, 401, 0.2)).diagnostics.pi_log - r.diagnostics.pi_log;
  CHECK(step == doctest::Approx(-std::log(sigma_root(model))).epsilon(1e-9));
}
