#include "idealpoint/truncated_normal.hpp"

#include "idealpoint/model.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>

namespace idealpoint {

namespace {
constexpr double kTailCutoff = 6.0;
} // namespace

double normal_quantile(double p) {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, p);
}

double standard_normal_above(Rng& rng, double a) {
    if (a > kTailCutoff) {
        const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
        for (;;) {
            const double z = a + standard_exponential(rng) / rate;
            const double d = z - rate;
            if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
        }
    }
    // Sample -Z from the lower tail, where the quantile keeps full precision.
    const double mass = normal_cdf(-a);
    double z = -normal_quantile(rng.uniform() * mass);
    if (!(z > a)) z = std::nextafter(a, std::numeric_limits<double>::infinity());
    return z;
}

double truncated_normal_at_zero(Rng& rng, double mean, bool positive) {
    if (positive) {
        double y = mean + standard_normal_above(rng, -mean);
        if (!(y > 0.0)) y = std::numeric_limits<double>::denorm_min();
        return y;
    }
    double y = mean - standard_normal_above(rng, mean);
    return y > 0.0 ? 0.0 : y;
}

} // namespace idealpoint
