#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gddim {

enum class ScheduleKind { Linear, Cosine };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view text);

/// Coefficients of the jump x_t -> x_s given a noise estimate z:
/// x_s = f_bar * x_t + g_bar * z.
struct StepCoeffs {
  double f_bar = 1.0;
  double g_bar = 0.0;
};

/// Discrete cumulative schedule alpha_bar[0..T] with alpha_bar[0] = 1.
/// The forward marginal is x_t = f(t) x_0 + g(t) z with f = sqrt(alpha_bar)
/// and g = sqrt(1 - alpha_bar). Immutable once built.
class Schedule {
 public:
  /// Linear: betas evenly spaced in [1e-4, 0.02] scaled by 1000/T.
  /// Cosine: the shifted squared-cosine with offset 0.008.
  /// Per-step alpha is clipped to >= 0.001 for both kinds.
  /// Throws ConfigError for T < 2.
  static Schedule build(ScheduleKind kind, int T);

  ScheduleKind kind() const noexcept { return kind_; }
  int T() const noexcept { return static_cast<int>(alpha_bar_.size()) - 1; }
  const std::vector<double>& alpha_bar() const noexcept { return alpha_bar_; }

  double f(int t) const;
  double g(int t) const;

  /// Jump coefficients for t -> s with s <= t. Multi-step jumps are allowed.
  /// Throws ConfigError if s > t or an index is out of range, and
  /// NumericalError if f(t) = 0.
  StepCoeffs coeffs(int t, int s) const;

 private:
  Schedule(ScheduleKind kind, std::vector<double> alpha_bar)
      : kind_(kind), alpha_bar_(std::move(alpha_bar)) {}

  void check_index(int t) const;

  ScheduleKind kind_;
  std::vector<double> alpha_bar_;
};

/// Evenly spaced decreasing indices T = i_0 > i_1 > ... > i_n = 0 with
/// i_k = floor(T (n - k) / n + 1/2). Throws ConfigError unless 1 <= n_steps <= T.
std::vector<int> subsample_steps(int T, int n_steps);

}  // namespace gddim
