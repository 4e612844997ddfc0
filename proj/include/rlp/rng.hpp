#pragma once
// Counter-based RNG: Philox4x64-10. Streams are addressed by (seed, stream id,
// substream), so any path of a simulation can be regenerated independently and
// parallel runs are bit-identical to serial ones.

#include <cmath>
#include <cstdint>

namespace rlp {

struct Philox4x64 {
    // key = (seed, stream), counter = (block, 0, substream, 0)
    uint64_t key0, key1;
    uint64_t ctr2, ctr3;
    uint64_t block = 0;
    uint64_t out[4]{};
    int have = 0;

    Philox4x64(uint64_t seed, uint64_t stream = 0, uint64_t substream = 0)
        : key0(seed), key1(stream), ctr2(substream), ctr3(0) {}

    static void round_(uint64_t& c0, uint64_t& c1, uint64_t& c2, uint64_t& c3,
                       uint64_t k0, uint64_t k1) {
        constexpr uint64_t M0 = 0xD2E7470EE14C6C93ULL;
        constexpr uint64_t M1 = 0xCA5A826395121157ULL;
        __uint128_t p0 = (__uint128_t)M0 * c0;
        __uint128_t p1 = (__uint128_t)M1 * c2;
        uint64_t hi0 = (uint64_t)(p0 >> 64), lo0 = (uint64_t)p0;
        uint64_t hi1 = (uint64_t)(p1 >> 64), lo1 = (uint64_t)p1;
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
    }

    void generate() {
        constexpr uint64_t W0 = 0x9E3779B97F4A7C15ULL;
        constexpr uint64_t W1 = 0xBB67AE8584CAA73BULL;
        uint64_t c0 = block, c1 = 0, c2 = ctr2, c3 = ctr3;
        uint64_t k0 = key0, k1 = key1;
        for (int r = 0; r < 10; ++r) {
            round_(c0, c1, c2, c3, k0, k1);
            k0 += W0;
            k1 += W1;
        }
        out[0] = c0;
        out[1] = c1;
        out[2] = c2;
        out[3] = c3;
        ++block;
        have = 4;
    }

    uint64_t next_u64() {
        if (have == 0) generate();
        return out[4 - have--];
    }

    // uniform on (0, 1]
    double uniform() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

  private:
    double cached_ = 0;
    bool has_cached_ = false;
};

}  // namespace rlp
