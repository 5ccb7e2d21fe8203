#pragma once

#include "idealpoint/random.hpp"

namespace idealpoint {

/// One draw from PG(1, z) by Devroye's alternating-series method
/// (Polson, Scott and Windle, 2013).
double polya_gamma_draw(Rng& rng, double z);

/// E[PG(1, z)] = tanh(z/2) / (2z), with the limit 1/4 at z = 0.
double polya_gamma_mean(double z) noexcept;

/// Var[PG(1, z)] = (sinh z - z) / (4 z^3 cosh^2(z/2)), limit 1/24 at z = 0.
double polya_gamma_variance(double z) noexcept;

} // namespace idealpoint
