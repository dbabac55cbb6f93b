#pragma once

#include <cmath>
#include <cstdint>

namespace ruinvest {

// Counter-based stream: (seed, stream_id, counter) fully determines every draw,
// so paths can be farmed out to any number of workers and replayed bit-for-bit.
// Core is Philox4x32-10; the 128-bit block counter holds (block index, stream id)
// and the 64-bit key holds the seed.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_(stream_id) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }
    // Number of 64-bit words consumed so far.
    std::uint64_t counter() const noexcept { return draws_; }

    std::uint64_t next_u64() noexcept {
        if (word_pos_ >= 4) fill_block();
        std::uint32_t lo = block_[word_pos_++];
        std::uint32_t hi = block_[word_pos_++];
        ++draws_;
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

    // Uniform on the open interval (0,1): 53-bit mantissa shifted off zero.
    double next_uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double next_normal() noexcept {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925287 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    double next_exponential(double rate) noexcept {
        return -std::log(next_uniform()) / rate;
    }

private:
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    void fill_block() noexcept {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_index_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_index_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c0;
            std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c2;
            std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
            std::uint32_t n1 = static_cast<std::uint32_t>(p1);
            std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
            std::uint32_t n3 = static_cast<std::uint32_t>(p0);
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += kWeyl0; k1 += kWeyl1;
        }
        block_[0] = c0; block_[1] = c1; block_[2] = c2; block_[3] = c3;
        ++block_index_;
        word_pos_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    std::uint64_t draws_ = 0;
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int word_pos_ = 4;  // next unconsumed 32-bit word; 4 forces a refill
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace ruinvest
