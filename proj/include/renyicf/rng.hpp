#ifndef RENYICF_RNG_HPP
#define RENYICF_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace renyicf {

// Counter-derived random streams: a stream is fully determined by
// (master_seed, stream_index), so trajectories can be scheduled in any
// order, on any number of workers, and still reproduce bit-exactly.
// Generator is xoshiro256++ with splitmix64 state expansion; raw 64-bit
// output is converted to doubles explicitly so results do not depend on
// the standard library's distribution implementations.

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_(master_seed), stream_(stream_index) {
        std::uint64_t x = master_seed ^ (0x9e3779b97f4a7c15ULL + stream_index * 0xd1b54a32d192ed03ULL);
        for (auto& w : s_) w = splitmix64(x);
        // a state of all zeros is invalid for xoshiro
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next_u64() {
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

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bool() { return (next_u64() >> 63) != 0; }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_double() * static_cast<double>(n)) % n;
    }

    // standard normal via Box-Muller (one value per pair, spare cached)
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0, u2 = 0.0;
        do { u1 = next_double(); } while (u1 <= 0.0);
        u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return stream_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
    std::uint64_t master_ = 0, stream_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// FNV-1a, used for config hashes and geometry fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace renyicf

#endif
