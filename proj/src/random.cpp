#include "idealpoint/random.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace idealpoint {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
} // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) noexcept {
    std::uint64_t state = a;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t v : {b, c, d}) {
        state = h ^ v;
        h = splitmix64(state);
    }
    return h;
}

Rng::Rng(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& w : s_) w = splitmix64(state);
}

Rng::result_type Rng::operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept {
    // 53 random bits, shifted by half an ulp so 0 is never returned.
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
    boost::random::normal_distribution<double> dist;
    return dist(rng);
}

double standard_exponential(Rng& rng) {
    boost::random::exponential_distribution<double> dist;
    return dist(rng);
}

double gamma_draw(Rng& rng, double shape) {
    boost::random::gamma_distribution<double> dist(shape, 1.0);
    return dist(rng);
}

double inverse_gamma_draw(Rng& rng, double shape, double scale) { return scale / gamma_draw(rng, shape); }

} // namespace idealpoint
