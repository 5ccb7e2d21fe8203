#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace idealpoint {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a tuple of integers into one 64-bit key. Used to derive
/// independent seeds for chains, scenarios and per-unit substreams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0, std::uint64_t d = 0) noexcept;

/// xoshiro256++ generator; satisfies UniformRandomBitGenerator.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

  private:
    std::array<std::uint64_t, 4> s_;
};

double standard_normal(Rng& rng);
double standard_exponential(Rng& rng);
/// Gamma with the given shape and unit scale.
double gamma_draw(Rng& rng, double shape);
/// Inverse-Gamma(shape, scale), density proportional to x^(-shape-1) exp(-scale/x).
double inverse_gamma_draw(Rng& rng, double shape, double scale);

/// Phases of a Gibbs sweep that draw random numbers.
enum class Phase : std::uint64_t { Init = 1, Latent = 2, Items = 3, IdealPoints = 4, Hierarchy = 5 };

/// Seeds for one sweep of one chain. Each (phase, unit) pair gets its own
/// generator, so draws do not depend on how units are scheduled on threads.
struct SweepStreams {
    std::uint64_t seed = 0;
    std::uint64_t sweep = 0;

    Rng stream(Phase phase, std::uint64_t unit) const noexcept {
        return Rng(mix_seed(seed, sweep, static_cast<std::uint64_t>(phase), unit));
    }
};

} // namespace idealpoint
