#include "gddim/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gddim/approximator.hpp"
#include "gddim/error.hpp"
#include "gddim/noise_family.hpp"
#include "gddim/rng.hpp"
#include "gddim/sampler.hpp"
#include "gddim/schedule.hpp"
#include "gddim/trainer.hpp"

namespace gddim {
namespace {

using CheckFn = std::function<std::string(bool&)>;

SelfTestCheck timed(const std::string& name, const CheckFn& fn) {
  SelfTestCheck check{name, false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  try {
    check.detail = fn(check.passed);
  } catch (const std::exception& e) {
    check.passed = false;
    check.detail = std::string("exception: ") + e.what();
  }
  check.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return check;
}

std::string sci(double v) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(2) << v;
  return out.str();
}

std::vector<FamilyKind> all_families() {
  return {FamilyKind::gaussian(), FamilyKind::laplace(), FamilyKind::student_t(3.0),
          FamilyKind::generalized_gaussian(1.5), FamilyKind::generalized_gaussian(2.5), FamilyKind::uniform()};
}

std::string moment_round_trip(bool& ok) {
  Rng rng(11);
  double worst = 0.0;
  for (const auto& kind : all_families()) {
    const NoiseFamily fam(kind);
    for (int i = 0; i < 1000; ++i) {
      const LocScale p{10.0 * (2.0 * rng.uniform() - 1.0), 0.01 + 5.0 * rng.uniform()};
      const Moments m = fam.locscale_to_moments(p);
      const LocScale q = fam.moments_to_locscale(m.mean, m.variance);
      worst = std::max(worst, std::abs(q.loc - p.loc) / std::max(1.0, std::abs(p.loc)));
      worst = std::max(worst, std::abs(q.scale - p.scale) / p.scale);
    }
  }
  ok = worst < 1e-12;
  return "max relative error " + sci(worst);
}

std::string reverse_identity(bool& ok) {
  Rng rng(12);
  double worst = 0.0;
  for (ScheduleKind kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    const Schedule sched = Schedule::build(kind, 1000);
    const NoiseFamily fam(FamilyKind::gaussian());
    for (int i = 0; i < 500; ++i) {
      const int t = static_cast<int>(rng.uniform_int(1, 1000));
      const int s = static_cast<int>(rng.uniform_int(0, t - 1));
      const double x0 = 3.0 * rng.normal();
      const double z = rng.normal();
      const double xt = sched.f(t) * x0 + sched.g(t) * z;
      const double xs_direct = sched.f(s) * x0 + sched.g(s) * z;
      const double mean[1] = {z};
      const double var[1] = {0.0};
      const double xt_arr[1] = {xt};
      const auto xs = reverse_step(xt_arr, t, s, sched, fam, mean, var, SampleMode::MeanAndVariance, rng);
      worst = std::max(worst, std::abs(xs[0] - xs_direct) / std::max(1.0, std::abs(xs_direct)));
    }
  }
  ok = worst < 1e-10;
  return "max relative error " + sci(worst);
}

std::string ddim_equivalence(bool& ok) {
  Rng rng(13);
  const Schedule sched = Schedule::build(ScheduleKind::Linear, 1000);
  const NoiseFamily fam(FamilyKind::gaussian());
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int t = static_cast<int>(rng.uniform_int(1, 1000));
    const int s = static_cast<int>(rng.uniform_int(0, t - 1));
    const double xt = rng.normal();
    const double eps = rng.normal();
    const double ab_t = sched.alpha_bar()[static_cast<std::size_t>(t)];
    const double ab_s = sched.alpha_bar()[static_cast<std::size_t>(s)];
    const double x0_hat = (xt - std::sqrt(1.0 - ab_t) * eps) / std::sqrt(ab_t);
    const double expected = std::sqrt(ab_s) * x0_hat + std::sqrt(1.0 - ab_s) * eps;
    const double mean[1] = {eps};
    const double xt_arr[1] = {xt};
    const auto xs = reverse_step(xt_arr, t, s, sched, fam, mean, {}, SampleMode::MeanOnly, rng);
    worst = std::max(worst, std::abs(xs[0] - expected));
  }
  ok = worst < 1e-10;
  return "max abs error " + sci(worst);
}

std::string schedule_identity(bool& ok) {
  double worst = 0.0;
  bool monotone = true;
  for (ScheduleKind kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    const Schedule sched = Schedule::build(kind, 1000);
    for (int t = 0; t <= sched.T(); ++t) {
      worst = std::max(worst, std::abs(sched.f(t) * sched.f(t) + sched.g(t) * sched.g(t) - 1.0));
      if (t > 0) monotone = monotone && sched.alpha_bar()[static_cast<std::size_t>(t)] <
                                            sched.alpha_bar()[static_cast<std::size_t>(t - 1)];
    }
  }
  ok = worst < 1e-12 && monotone;
  return "max |f^2+g^2-1| " + sci(worst) + (monotone ? ", alpha_bar decreasing" : ", alpha_bar NOT decreasing");
}

std::string gradient_spot_check(bool& ok) {
  const Architecture arch{2, 4, {8, 8}};
  Approximator net = Approximator::initialized(arch, 14);
  const Schedule sched = Schedule::build(ScheduleKind::Linear, 100);
  const NoiseFamily fam(FamilyKind::laplace());
  Points x0(6, 2);
  Rng data_rng(15);
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0.data()[i] = data_rng.normal();

  auto loss_at = [&](const Approximator& n, std::span<double> grad) {
    Rng rng(16);
    return mom_loss(n, x0, sched, fam, rng, false, grad).total();
  };
  std::vector<double> grad(net.parameter_count());
  loss_at(net, grad);

  Rng pick(17);
  double worst = 0.0;
  const double eps = 1e-5;
  for (int k = 0; k < 20; ++k) {
    const auto idx = static_cast<std::size_t>(pick.uniform_int(0, static_cast<std::int64_t>(grad.size()) - 1));
    Approximator plus = net;
    Approximator minus = net;
    plus.parameters()[idx] += eps;
    minus.parameters()[idx] -= eps;
    const double fd = (loss_at(plus, {}) - loss_at(minus, {})) / (2.0 * eps);
    const double denom = std::max({std::abs(fd), std::abs(grad[idx]), 1e-6});
    worst = std::max(worst, std::abs(fd - grad[idx]) / denom);
  }
  ok = worst < 1e-4;
  return "max relative error " + sci(worst) + " over 20 coordinates";
}

}  // namespace

std::vector<SelfTestCheck> run_selftest() {
  return {
      timed("moment-map round trip", moment_round_trip),
      timed("reverse-step identity", reverse_identity),
      timed("ddim equivalence", ddim_equivalence),
      timed("schedule identities", schedule_identity),
      timed("gradient spot-check", gradient_spot_check),
  };
}

bool print_selftest(std::ostream& out, const std::vector<SelfTestCheck>& checks) {
  bool all = true;
  out << std::left << std::setw(26) << "check" << std::setw(7) << "result" << std::setw(10) << "seconds"
      << "detail\n";
  for (const auto& c : checks) {
    all = all && c.passed;
    out << std::left << std::setw(26) << c.name << std::setw(7) << (c.passed ? "PASS" : "FAIL") << std::setw(10)
        << std::fixed << std::setprecision(3) << c.seconds << c.detail << '\n';
  }
  return all;
}

}  // namespace gddim
