#pragma once

#include "idealpoint/random.hpp"

namespace idealpoint {

/// Standard-normal quantile.
double normal_quantile(double p);

/// Z ~ N(0,1) conditioned on Z > a. Inverse CDF for a <= 6, exponential
/// rejection (Robert, 1995) in the far tail.
double standard_normal_above(Rng& rng, double a);

/// Y ~ N(mean, 1) truncated to (0, inf) when `positive`, else (-inf, 0].
double truncated_normal_at_zero(Rng& rng, double mean, bool positive);

} // namespace idealpoint
