#include "idealpoint/polya_gamma.hpp"

#include "idealpoint/model.hpp"

#include <cmath>
#include <numbers>

namespace idealpoint {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;

// n-th coefficient of the alternating series for the J*(1) density at x.
double series_coef(int n, double x) {
    const double k = n + 0.5;
    if (x > kTrunc) return kPi * k * std::exp(-0.5 * k * k * kPi * kPi * x);
    return kPi * k * std::pow(2.0 / (kPi * x), 1.5) * std::exp(-2.0 * k * k / x);
}

double log_normal_cdf(double x) { return std::log(normal_cdf(x)); }

// Probability that the proposal is drawn from the exponential piece.
double exponential_mass(double z, double fz) {
    const double b = std::sqrt(1.0 / kTrunc) * (kTrunc * z - 1.0);
    const double a = -std::sqrt(1.0 / kTrunc) * (kTrunc * z + 1.0);
    const double x0 = std::log(fz) + fz * kTrunc;
    const double xb = x0 - z + log_normal_cdf(b);
    const double xa = x0 + z + log_normal_cdf(a);
    const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
    return 1.0 / (1.0 + q_over_p);
}

// Inverse-Gaussian(1/z, 1) truncated to (0, kTrunc).
double truncated_inverse_gaussian(Rng& rng, double z) {
    const double mu = 1.0 / z;
    double x = kTrunc + 1.0;
    if (mu > kTrunc) {
        double accept = 0.0;
        while (rng.uniform() > accept) {
            double e1 = 0.0, e2 = 0.0;
            do {
                e1 = standard_exponential(rng);
                e2 = standard_exponential(rng);
            } while (e1 * e1 > 2.0 * e2 / kTrunc);
            x = kTrunc / ((1.0 + kTrunc * e1) * (1.0 + kTrunc * e1));
            accept = std::exp(-0.5 * z * z * x);
        }
        return x;
    }
    while (x > kTrunc) {
        const double y0 = standard_normal(rng);
        const double y = y0 * y0;
        const double half_mu = 0.5 * mu;
        x = mu + half_mu * mu * y - half_mu * std::sqrt(4.0 * mu * y + (mu * y) * (mu * y));
        if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
    return x;
}

} // namespace

double polya_gamma_draw(Rng& rng, double z) {
    // PG(1, z) = J*(1, z/2) / 4.
    z = 0.5 * std::fabs(z);
    const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
    const double p_exp = exponential_mass(z, fz);
    for (;;) {
        double x = 0.0;
        if (rng.uniform() < p_exp) {
            x = kTrunc + standard_exponential(rng) / fz;
        } else {
            x = truncated_inverse_gaussian(rng, z);
        }
        double s = series_coef(0, x);
        const double y = rng.uniform() * s;
        for (int n = 1;; ++n) {
            if (n % 2 == 1) {
                s -= series_coef(n, x);
                if (y <= s) return 0.25 * x;
            } else {
                s += series_coef(n, x);
                if (y > s) break;
            }
        }
    }
}

double polya_gamma_mean(double z) noexcept {
    if (std::fabs(z) < 1e-6) return 0.25 - z * z / 48.0;
    return std::tanh(0.5 * z) / (2.0 * z);
}

double polya_gamma_variance(double z) noexcept {
    z = std::fabs(z);
    if (z < 1e-3) return 1.0 / 24.0 - z * z / 120.0;
    // sinh(z) / cosh^2(z/2) = 2 tanh(z/2), which avoids overflow.
    const double sech = 1.0 / std::cosh(0.5 * z);
    return (2.0 * std::tanh(0.5 * z) - z * sech * sech) / (4.0 * z * z * z);
}

} // namespace idealpoint
