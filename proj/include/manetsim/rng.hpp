#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace manetsim {

// Named, mutually independent pseudo-random stream. The (seed, stream_id)
// pair fully determines the draw sequence; distribution helpers are
// hand-rolled on the raw 64-bit output so results do not depend on the
// standard library's <random> distribution implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id)
        : gen_(mix(seed ^ fnv1a(stream_id))) {}

    std::uint64_t next() { return gen_(); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_int(std::uint64_t bound) { return next() % bound; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_int(i)]);
        }
    }

private:
    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace manetsim
