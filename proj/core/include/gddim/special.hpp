#pragma once

namespace gddim {

/// log Γ(x) for x > 0 via the Lanczos approximation (g = 7, 9 coefficients).
double log_gamma(double x);

/// Γ(x) for x > 0.
double gamma_function(double x);

}  // namespace gddim
