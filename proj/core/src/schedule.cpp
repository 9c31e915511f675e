#include "gddim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gddim/error.hpp"

namespace gddim {
namespace {

constexpr double kMinStepAlpha = 0.001;
constexpr double kCosineOffset = 0.008;

std::vector<double> cumulative(const std::vector<double>& step_alpha) {
  std::vector<double> alpha_bar(step_alpha.size() + 1);
  alpha_bar[0] = 1.0;
  for (std::size_t i = 0; i < step_alpha.size(); ++i) {
    alpha_bar[i + 1] = alpha_bar[i] * step_alpha[i];
  }
  return alpha_bar;
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  return kind == ScheduleKind::Linear ? "linear" : "cosine";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
  if (text == "linear") return ScheduleKind::Linear;
  if (text == "cosine") return ScheduleKind::Cosine;
  throw ConfigError("unknown schedule '" + std::string(text) + "' (expected linear | cosine)");
}

Schedule Schedule::build(ScheduleKind kind, int T) {
  if (T < 2) throw ConfigError("schedule requires T >= 2, got " + std::to_string(T));
  const auto steps = static_cast<std::size_t>(T);
  std::vector<double> step_alpha(steps);

  if (kind == ScheduleKind::Linear) {
    const double scale = 1000.0 / T;
    const double beta_start = scale * 1e-4;
    const double beta_end = scale * 0.02;
    for (std::size_t i = 0; i < steps; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(steps - 1);
      const double beta = beta_start + frac * (beta_end - beta_start);
      step_alpha[i] = std::max(1.0 - beta, kMinStepAlpha);
    }
  } else {
    auto raw = [T](int t) {
      const double phase =
          (static_cast<double>(t) / T + kCosineOffset) / (1.0 + kCosineOffset) * std::numbers::pi / 2.0;
      const double c = std::cos(phase);
      return c * c;
    };
    const double base = raw(0);
    for (int t = 1; t <= T; ++t) {
      const double ratio = (raw(t) / base) / (raw(t - 1) / base);
      step_alpha[static_cast<std::size_t>(t - 1)] = std::clamp(ratio, kMinStepAlpha, 1.0);
    }
  }
  return Schedule(kind, cumulative(step_alpha));
}

void Schedule::check_index(int t) const {
  if (t < 0 || t > T()) {
    throw ConfigError("time index " + std::to_string(t) + " outside [0, " + std::to_string(T()) + "]");
  }
}

double Schedule::f(int t) const {
  check_index(t);
  return std::sqrt(alpha_bar_[static_cast<std::size_t>(t)]);
}

double Schedule::g(int t) const {
  check_index(t);
  return std::sqrt(1.0 - alpha_bar_[static_cast<std::size_t>(t)]);
}

StepCoeffs Schedule::coeffs(int t, int s) const {
  check_index(t);
  check_index(s);
  if (s > t) {
    throw ConfigError("coeffs: target index " + std::to_string(s) + " is after source index " +
                      std::to_string(t));
  }
  if (s == t) return {1.0, 0.0};
  const double ft = f(t);
  if (ft == 0.0) throw NumericalError("coeffs: degenerate schedule, f(t) = 0 at t = " + std::to_string(t));
  const double fs = f(s);
  return {fs / ft, g(s) - fs * g(t) / ft};
}

std::vector<int> subsample_steps(int T, int n_steps) {
  if (n_steps < 1 || n_steps > T) {
    throw ConfigError("sample steps must lie in [1, " + std::to_string(T) + "], got " +
                      std::to_string(n_steps));
  }
  std::vector<int> idx(static_cast<std::size_t>(n_steps) + 1);
  const long long n = n_steps;
  for (long long k = 0; k <= n; ++k) {
    idx[static_cast<std::size_t>(k)] = static_cast<int>((2LL * T * (n - k) + n) / (2LL * n));
  }
  return idx;
}

}  // namespace gddim
