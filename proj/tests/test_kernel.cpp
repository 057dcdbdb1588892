#include <cmath>
#include <vector>

#include "doctest.h"
#include "lossq/error.hpp"
#include "lossq/kernel.hpp"
#include "oracles.hpp"

using namespace lossq;

namespace {

QueueModel at_load(const char* dist, int m, int n, double rho, double mu = 1.0) {
  return QueueModel::with_load(parse_distribution(dist), m, n, mu, rho);
}

const char* const kDists[] = {"det", "exp", "erlang:k=2", "hyper:w=0.3|0.7,rate=0.5|2",
                              "gamma:shape=0.5"};

}  // namespace

TEST_CASE("phi") {
  const auto exp1 = InterarrivalDistribution::exponential(1.0);
  CHECK(phi(exp1, 1.0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi(InterarrivalDistribution::deterministic(1.0), 1.0, 2) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS((void)phi(exp1, 1.0, 0), DomainError);
  // M/M/1/0 with lambda = rho mu loses phi_1 = rho / (1 + rho), which is Erlang B with m = 1.
  for (double rho : {0.3, 1.0, 2.5}) {
    const double p = phi(InterarrivalDistribution::exponential(rho), 1.0, 1);
    CHECK(p == doctest::Approx(rho / (1.0 + rho)).epsilon(1e-15));
    CHECK(p == doctest::Approx(test::erlang_b(1, rho)).epsilon(1e-15));
  }
}

TEST_CASE("c_products") {
  const std::vector<double> one{0.5};
  CHECK(c_products(one)[1] == doctest::Approx(1.0));
  const std::vector<double> two{0.5, 0.25};
  const auto c = c_products(two);
  CHECK(c[0] == 1.0);
  CHECK(c[2] == doctest::Approx(3.0).epsilon(1e-15));
  const std::vector<double> bad{0.5, 1.0};
  CHECK_THROWS_AS((void)c_products(bad), DomainError);
  // Products far beyond double range stay finite in log form.
  const std::vector<double> tiny(16, 1e-30);
  const std::vector<double> comp(16, 1.0);
  const auto logs = log_c_products(tiny, comp);
  CHECK(logs[16] == doctest::Approx(16 * 30 * std::log(10.0)));
}

TEST_CASE("boundary kernel without a queue") {
  for (const char* name : kDists) {
    const auto d = parse_distribution(name);
    CAPTURE(name);
    for (int m = 1; m <= 8; ++m) {
      CHECK(boundary_kernel_n0(d, 0.7, m, 0) == doctest::Approx(d.lst(0.7 * m)).epsilon(1e-14));
      CompensatedSum<double> total;
      for (int k = 0; k <= m; ++k) {
        const double r = boundary_kernel_n0(d, 0.7, m, k);
        total += r;
        const double quad = d.integrate([&](double x) {
          return binomial(m, k) * std::pow(-std::expm1(-0.7 * x), k) * std::exp(-(m - k) * 0.7 * x);
        });
        CAPTURE(m);
        CAPTURE(k);
        CHECK(std::abs(r - quad) < 1e-10);
      }
      CHECK(std::abs(total.value() - 1.0) < 1e-12);
    }
    const double phi1 = d.lst(1.0);
    const double phi2 = d.lst(2.0);
    CHECK(std::abs(boundary_kernel_n0(d, 1.0, 2, 2) - (1.0 - 2.0 * phi1 + phi2)) < 1e-15);
  }
  CHECK_THROWS_AS((void)boundary_kernel_n0(parse_distribution("exp"), 1.0, 2, 3), DomainError);
}

TEST_CASE("boundary kernel with a queue") {
  const auto exp1 = InterarrivalDistribution::exponential(1.0);
  // Reference from the defining double integral evaluated in Python: 2/9.
  CHECK(std::abs(boundary_kernel(exp1, 1.0, 2, 1, 1) - 2.0 / 9.0) < 1e-13);
  CHECK(std::abs(boundary_kernel(exp1, 1.0, 2, 1, 1) -
                 test::boundary_kernel_quadrature(exp1, 1.0, 2, 1, 1)) < 1e-10);

  for (const char* name : kDists) {
    const auto d = parse_distribution(name);
    for (int m : {2, 3, 5}) {
      for (int k = 1; k < m; ++k) {
        for (int j : {1, 2, 4}) {
          CAPTURE(name);
          CAPTURE(m);
          CAPTURE(k);
          CAPTURE(j);
          CHECK(std::abs(boundary_kernel(d, 0.6, m, k, j) -
                         test::boundary_kernel_quadrature(d, 0.6, m, k, j)) < 1e-9);
        }
      }
    }
  }

  // (j + k) r_{k,m-k,j} -> 0.
  const auto model = at_load("erlang:k=2", 3, 200, 0.9);
  const KernelSet ks = build_kernel_set(model);
  for (int k = 1; k < 3; ++k) {
    double prev = INFINITY;
    for (int j : {50, 100, 200}) {
      const double w = (j + k) * ks.boundary[k - 1][j];
      CHECK(w < prev);
      prev = w;
    }
    CHECK(prev < 1e-6);
  }
}

TEST_CASE("kernel set examples") {
  const double lambda = 0.8;
  const double mu = 1.3;
  const QueueModel mm1{1, 5, mu, InterarrivalDistribution::exponential(lambda)};
  const KernelSet ks = build_kernel_set(mm1);
  CHECK(ks.boundary.empty());
  for (int j = 0; j <= 5; ++j) {
    const double geo = lambda / (lambda + mu) * std::pow(mu / (lambda + mu), j);
    CHECK(ks.interior[j] == doctest::Approx(geo).epsilon(1e-14));
  }

  for (const char* name : kDists) {
    const auto model = at_load(name, 2, 0, 0.8);
    const KernelSet k0 = build_kernel_set(model);
    CHECK(std::abs(k0.interior[0] + k0.boundary[0][0] + k0.to_empty[0] - 1.0) < 1e-14);
    CHECK(k0.interior[0] == model.arrivals.lst(2.0 * model.mu));
  }
}

TEST_CASE("kernel set invariants") {
  for (const char* name : kDists) {
    for (double rho : {0.5, 1.0, 1.3}) {
      const auto model = at_load(name, 4, 200, rho, 0.7);
      const KernelSet ks = build_kernel_set(model);
      CAPTURE(name);
      CAPTURE(rho);
      CHECK(ks.interior[0] == model.arrivals.lst(4 * 0.7));
      for (double v : ks.interior) CHECK((v >= 0.0 && v <= 1.0));
      for (const auto& row : ks.boundary) {
        for (double v : row) CHECK((v >= 0.0 && v <= 1.0));
      }
      for (int j = 0; j <= 200; ++j) CHECK(ks.defective_row_sum(j) <= 1.0 + 1e-10);
      CHECK(std::abs(ks.defective_row_sum(200) - 1.0) < 1e-8);
      for (int post = 1; post <= 204; ++post) {
        const auto row = ks.transition_row(post);
        CHECK(std::abs(stable_sum<double>(row) - 1.0) < 1e-12);
      }
      for (int j = 1; j < 4; ++j) CHECK(ks.phi[j] < ks.phi[j - 1]);
      for (double c : ks.cprod) CHECK(c > 0.0);
      CHECK(ks.cprod[0] == 1.0);
    }
  }
}

TEST_CASE("kernels are invariant under a change of time unit") {
  for (const char* name : kDists) {
    const auto base = at_load(name, 3, 20, 0.85, 1.0);
    QueueModel scaled = base;
    scaled.mu = 3.7;
    scaled.arrivals = base.arrivals.time_scaled(1.0 / 3.7);
    const KernelSet a = build_kernel_set(base);
    const KernelSet b = build_kernel_set(scaled);
    for (int j = 0; j <= 20; ++j) {
      CHECK(std::abs(a.interior[j] - b.interior[j]) < 1e-12);
      for (int k = 1; k <= 3; ++k) CHECK(std::abs(a.crossing(k, j) - b.crossing(k, j)) < 1e-12);
    }
    for (int j = 0; j < 3; ++j) CHECK(std::abs(a.phi[j] - b.phi[j]) < 1e-12);
  }
}

TEST_CASE("boundary kernel partial sums settle") {
  const auto model = at_load("hyper:w=0.3|0.7,rate=0.5|2", 3, 400, 0.9);
  const KernelSet ks = build_kernel_set(model);
  for (int k = 1; k < 3; ++k) {
    CompensatedSum<double> s;
    double at300 = 0.0;
    for (int j = 1; j <= 400; ++j) {
      s += ks.boundary[k - 1][j];
      if (j == 300) at300 = s.value();
    }
    CHECK(std::abs(s.value() - at300) < 1e-10);
    // Eventually decreasing in j.
    for (int j = 50; j < 400; ++j) CHECK(ks.boundary[k - 1][j + 1] <= ks.boundary[k - 1][j]);
  }
}

TEST_CASE("standalone boundary kernel matches the kernel set") {
  const auto model = at_load("gamma:shape=1.5", 3, 6, 0.9);
  const KernelSet ks = build_kernel_set(model);
  for (int k = 1; k <= 3; ++k) {
    for (int j = 0; j <= 6; ++j) {
      CHECK(boundary_kernel(model.arrivals, model.mu, 3, k, j) ==
            doctest::Approx(ks.crossing(k, j)).epsilon(1e-13));
    }
  }
}
