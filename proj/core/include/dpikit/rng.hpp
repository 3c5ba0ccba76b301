#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace dpikit {

// SplitMix64 (Steele, Lea & Flood; also the seeding generator of xoshiro).
// Every seeded operation in the toolkit draws from this generator so that
// datasets, parameter initialization and training trajectories reproduce
// bit-for-bit across platforms and implementations. The update is:
//
//   state += 0x9e3779b97f4a7c15
//   z = state; z = (z ^ z>>30) * 0xbf58476d1ce4e5b9
//   z = (z ^ z>>27) * 0x94d049bb133111eb
//   output = z ^ z>>31
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, n) by rejection sampling.
    uint64_t uniform(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. One uniform pair per value; the sine
    // half is discarded to keep the draw sequence position-independent.
    double next_normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Normal(0, std^2) resampled until within +/- clip*std.
    double truncated_normal(double std_dev, double clip) {
        double z = next_normal();
        while (std::abs(z) > clip) z = next_normal();
        return z * std_dev;
    }

    // Fisher-Yates, descending index order.
    template <class Vec>
    void shuffle(Vec& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(uniform(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

// Derives an independent stream seed from (base, tag), e.g. per-epoch shuffle
// seeds or per-step dropout seeds. Resuming a run mid-way reproduces the same
// streams because nothing depends on generator history.
inline uint64_t mix_seed(uint64_t base, uint64_t tag) {
    SplitMix64 g(base ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
    return g.next_u64();
}

} // namespace dpikit
