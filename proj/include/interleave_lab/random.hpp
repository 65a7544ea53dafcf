#pragma once

// Seeded random streams. The samplers below are written out by hand rather
// than taken from <random> distributions so that a given seed produces the
// same stream with every standard library.

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace ilab {

// A generator that yields uniformly distributed full-width 64-bit words.
template <class G>
concept BitSource = std::uniform_random_bit_generator<G> &&
                    std::same_as<typename G::result_type, std::uint64_t> && (G::min() == 0) &&
                    (G::max() == std::numeric_limits<std::uint64_t>::max());

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Independent stream keyed by a root seed and a path of integers, e.g.
    // derive(seed, {kRq1, repeat, pair}).
    static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t h = splitmix64(seed);
        for (std::uint64_t id : path) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
        return RandomStream(h);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Uniform double in [0, 1) with 53 random bits.
template <BitSource G>
double uniform01(G& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Fair coin: true ("heads") when the draw lands in the lower half.
template <BitSource G>
bool coin(G& gen) {
    return uniform01(gen) < 0.5;
}

template <BitSource G>
bool bernoulli(G& gen, double p) {
    return uniform01(gen) < p;
}

namespace detail {
__extension__ typedef unsigned __int128 u128;
}

// Uniform integer in [0, bound) using Lemire's multiply-and-reject method.
template <BitSource G>
std::uint64_t uniform_index(G& gen, std::uint64_t bound) {
    if (bound == 0) return 0;
    detail::u128 m = static_cast<detail::u128>(gen()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<detail::u128>(gen()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace ilab
