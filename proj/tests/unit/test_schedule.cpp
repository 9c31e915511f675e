#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "gddim/error.hpp"
#include "gddim/schedule.hpp"

using gddim::Schedule;
using gddim::ScheduleKind;

TEST_CASE("alpha_bar starts at one and decreases strictly to near pure noise") {
  for (auto kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    for (int T : {10, 100, 1000}) {
      CAPTURE(T);
      const auto s = Schedule::build(kind, T);
      const auto& ab = s.alpha_bar();
      REQUIRE(ab.size() == static_cast<std::size_t>(T) + 1);
      CHECK(ab[0] == 1.0);
      for (int t = 1; t <= T; ++t) CHECK(ab[t] < ab[t - 1]);
      CHECK(ab[T] > 0.0);
      CHECK(ab[T] < 1e-3);
    }
  }
}

TEST_CASE("f squared plus g squared is one") {
  for (auto kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    const auto s = Schedule::build(kind, 1000);
    for (int t = 0; t <= 1000; ++t) CHECK(std::abs(s.f(t) * s.f(t) + s.g(t) * s.g(t) - 1.0) < 1e-12);
  }
}

TEST_CASE("linear schedule matches a direct product of the beta sequence") {
  const int T = 1000;
  const auto s = Schedule::build(ScheduleKind::Linear, T);
  double ab = 1.0;
  for (int t = 1; t <= T; ++t) {
    const double beta = 1e-4 + (0.02 - 1e-4) * (t - 1) / (T - 1);
    ab *= 1.0 - beta;
    CHECK(s.alpha_bar()[t] == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("cosine schedule matches the squared-cosine formula away from the clip") {
  const int T = 1000;
  const auto s = Schedule::build(ScheduleKind::Cosine, T);
  auto h = [](double u) {
    const double c = std::cos((u + 0.008) / 1.008 * std::numbers::pi / 2.0);
    return c * c;
  };
  for (int t = 0; t <= 900; t += 50) CHECK(s.alpha_bar()[t] == doctest::Approx(h(double(t) / T) / h(0.0)).epsilon(1e-12));
  for (int t = 1; t <= T; ++t) CHECK(s.alpha_bar()[t] / s.alpha_bar()[t - 1] >= 0.001 - 1e-15);
}

TEST_CASE("identity jump") {
  const auto s = Schedule::build(ScheduleKind::Cosine, 100);
  for (int t = 1; t <= 100; ++t) {
    const auto c = s.coeffs(t, t);
    CHECK(c.f_bar == 1.0);
    CHECK(c.g_bar == 0.0);
  }
}

TEST_CASE("coeffs match values recomputed from alpha_bar") {
  const auto s = Schedule::build(ScheduleKind::Linear, 1000);
  const auto& ab = s.alpha_bar();
  const auto c = s.coeffs(1000, 990);
  const double fbar = std::sqrt(ab[990]) / std::sqrt(ab[1000]);
  const double gbar = std::sqrt(1.0 - ab[990]) - std::sqrt(ab[990]) * std::sqrt(1.0 - ab[1000]) / std::sqrt(ab[1000]);
  CHECK(std::abs(c.f_bar - fbar) <= 1e-12 * std::abs(fbar));
  CHECK(std::abs(c.g_bar - gbar) <= 1e-12 * std::abs(gbar));
}

TEST_CASE("reverse recurrence composes across jumps") {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> n01;
  for (auto kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    const auto s = Schedule::build(kind, 1000);
    std::uniform_int_distribution<int> pick(0, 1000);
    for (int rep = 0; rep < 200; ++rep) {
      int a = pick(eng), b = pick(eng), c = pick(eng);
      std::vector<int> idx{a, b, c};
      std::sort(idx.begin(), idx.end());
      const int u = idx[0], mid = idx[1], t = idx[2];
      if (t == 0) continue;
      const double x0 = n01(eng);
      const double z = n01(eng);
      const double x_t = s.f(t) * x0 + s.g(t) * z;
      const auto ts = s.coeffs(t, mid);
      const double x_mid = ts.f_bar * x_t + ts.g_bar * z;
      double two_step = x_mid;
      if (mid > 0) {
        const auto su = s.coeffs(mid, u);
        two_step = su.f_bar * x_mid + su.g_bar * z;
      } else {
        two_step = x_mid;  // x_0 reached; u must also be 0
      }
      const auto tu = s.coeffs(t, u);
      const double direct = tu.f_bar * x_t + tu.g_bar * z;
      CHECK(std::abs(two_step - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("coeffs errors") {
  const auto s = Schedule::build(ScheduleKind::Linear, 10);
  CHECK_THROWS_AS(s.coeffs(3, 5), gddim::ConfigError);
  CHECK_THROWS_AS(s.coeffs(11, 5), gddim::ConfigError);
  CHECK_THROWS_AS(s.coeffs(5, -1), gddim::ConfigError);
  CHECK_THROWS_AS(Schedule::build(ScheduleKind::Linear, 1), gddim::ConfigError);
  CHECK_THROWS_AS(Schedule::build(ScheduleKind::Cosine, 0), gddim::ConfigError);
}

TEST_CASE("subsample_steps") {
  SUBCASE("full length") {
    const auto v = gddim::subsample_steps(1000, 1000);
    REQUIRE(v.size() == 1001);
    for (int k = 0; k <= 1000; ++k) CHECK(v[k] == 1000 - k);
  }
  SUBCASE("100 of 1000") {
    const auto v = gddim::subsample_steps(1000, 100);
    REQUIRE(v.size() == 101);
    CHECK(v.front() == 1000);
    CHECK(v.back() == 0);
    for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k - 1] - v[k] == 10);
  }
  SUBCASE("golden rounding for 3 of 10") {
    CHECK(gddim::subsample_steps(10, 3) == std::vector<int>{10, 7, 3, 0});
  }
  SUBCASE("always strictly decreasing from T to 0") {
    for (int T : {2, 7, 10, 99, 1000}) {
      for (int n = 1; n <= T; n += (T > 50 ? 13 : 1)) {
        const auto v = gddim::subsample_steps(T, n);
        REQUIRE(v.size() == static_cast<std::size_t>(n) + 1);
        CHECK(v.front() == T);
        CHECK(v.back() == 0);
        for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] < v[k - 1]);
      }
    }
  }
  CHECK_THROWS_AS(gddim::subsample_steps(10, 11), gddim::ConfigError);
  CHECK_THROWS_AS(gddim::subsample_steps(10, 0), gddim::ConfigError);
}

TEST_CASE("schedule names") {
  CHECK(gddim::parse_schedule_kind("linear") == ScheduleKind::Linear);
  CHECK(gddim::parse_schedule_kind("cosine") == ScheduleKind::Cosine);
  CHECK(gddim::to_string(ScheduleKind::Cosine) == "cosine");
  CHECK_THROWS_AS(gddim::parse_schedule_kind("sigmoid"), gddim::ConfigError);
}
