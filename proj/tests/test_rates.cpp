#include <doctest.h>

#include <cmath>
#include <random>

#include "relay_harvest/rates.hpp"

using namespace relay_harvest;

TEST_CASE("link_rate values") {
  CHECK(link_rate(1.0, 0.0) == 0.0);
  CHECK(link_rate(3.0, 1.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(link_rate(4.0, 1.0) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK_THROWS_AS(link_rate(1.0, -0.1), DomainError);
}

TEST_CASE("epoch_energy values and perspective convention") {
  CHECK(epoch_energy(1.0, std::log(2.0), 1.0).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(epoch_energy(0.0, 0.0, 2.0).value == 0.0);
  CHECK(epoch_energy(2.0, 2.0 * std::log(2.0), 4.0).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::isinf(epoch_energy(0.0, 1.0, 1.0).value));
  CHECK_THROWS_AS(epoch_energy(-1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(epoch_energy(1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("broadcast power and split") {
  ChannelGains g{2.0, 1.0, 1.0, 1.0};
  CHECK(broadcast_power(0.0, 0.0, g) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(broadcast_power(std::log(2.0), 0.0, g) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(broadcast_power(std::log(2.0), std::log(2.0), g) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(broadcast_split(std::log(2.0), 0.0, g) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(broadcast_split(std::log(2.0), std::log(2.0), g) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(broadcast_split(1e-9, std::log(2.0), g) < 1e-8);
  CHECK_THROWS_AS(broadcast_split(0.0, 0.0, g), DegenerateBroadcast);
  CHECK_THROWS_AS(broadcast_power(-0.1, 0.0, g), DomainError);

  // the split reproduces the broadcast region boundary, (3)-(4)
  for (double c1 : {0.2, 0.7, 1.3}) {
    for (double c2 : {0.1, 0.5, 1.1}) {
      const double pb = broadcast_power(c1, c2, g);
      const double eta = broadcast_split(c1, c2, g);
      CHECK(std::log1p(eta * g.sr1 * pb) == doctest::Approx(c1).epsilon(1e-10));
      const double r2 = std::log1p((1.0 - eta) * g.sr2 * pb / (eta * g.sr2 * pb + 1.0));
      CHECK(r2 == doctest::Approx(c2).epsilon(1e-10));
    }
  }
}

TEST_CASE("mac rate bounds") {
  ChannelGains g{1.0, 1.0, 1.0, 3.0};
  auto b = mac_rate_bounds(0.0, 0.0, g);
  CHECK(b.r1_max == 0.0);
  CHECK(b.r2_max == 0.0);
  CHECK(b.sum_max == 0.0);
  b = mac_rate_bounds(1.0, 1.0, g);
  CHECK(b.r1_max == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(b.r2_max == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(b.sum_max == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  b = mac_rate_bounds(1.0, 0.0, g);
  CHECK(b.r2_max == 0.0);
  CHECK(b.sum_max == doctest::Approx(b.r1_max).epsilon(1e-15));
  CHECK_THROWS_AS(mac_rate_bounds(-1.0, 0.0, g), DomainError);
}

TEST_CASE("gradients match central finite differences") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const double l = u(rng), c = u(rng), alpha = u(rng);
    const auto vg = epoch_energy(l, c, alpha);
    const double h = 1e-6;
    const double dl = (epoch_energy(l + h, c, alpha).value - epoch_energy(l - h, c, alpha).value) /
                      (2.0 * h);
    const double dc = (epoch_energy(l, c + h, alpha).value - epoch_energy(l, c - h, alpha).value) /
                      (2.0 * h);
    CHECK(vg.partial("l") == doctest::Approx(dl).epsilon(1e-5));
    CHECK(vg.partial("c") == doctest::Approx(dc).epsilon(1e-5));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("midpoint convexity of epoch_energy and broadcast_power") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  ChannelGains g{2.5, 1.0, 1.0, 1.0};
  for (int t = 0; t < 500; ++t) {
    const double alpha = u(rng);
    const double l1 = u(rng), c1 = u(rng), l2 = u(rng), c2 = u(rng);
    const double mid = epoch_energy(0.5 * (l1 + l2), 0.5 * (c1 + c2), alpha).value;
    const double avg =
        0.5 * (epoch_energy(l1, c1, alpha).value + epoch_energy(l2, c2, alpha).value);
    CHECK(mid <= avg + 1e-12);
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
    const double pm = broadcast_power(0.5 * (a1 + a2), 0.5 * (b1 + b2), g);
    const double pa = 0.5 * (broadcast_power(a1, b1, g) + broadcast_power(a2, b2, g));
    CHECK(pm <= pa + 1e-12);
  }
}

TEST_CASE("inverse and perspective consistency") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    const double alpha = 0.3 + u(rng);
    const double p = u(rng);
    // epoch_energy(1, link_rate(alpha, p), alpha) == p
    const double back = epoch_energy(1.0, link_rate(alpha, p), alpha).value;
    CHECK(back == doctest::Approx(p).epsilon(1e-10));
    const double l = 0.1 + u(rng), c = 0.1 + u(rng);
    const double lhs = epoch_energy(l, c, alpha).value;
    const double rhs = l * epoch_energy(1.0, c / l, alpha).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}
