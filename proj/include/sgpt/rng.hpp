#pragma once

#include <array>
#include <cstdint>

namespace sgpt {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every output
/// block is a pure function of (key, counter), so a sample's random numbers
/// depend only on the seed and the sample index.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

/// Uniform doubles in [0, 1) for one (seed, stream, index) triple.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint32_t stream, std::uint64_t index, std::uint32_t attempt = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          index_(index), stream_(stream), attempt_(attempt)
    {
    }

    double uniform() noexcept
    {
        if (used_ == 2) {
            refill();
        }
        const std::uint64_t hi = buf_[2 * used_] >> 5;     // 27 bits
        const std::uint64_t lo = buf_[2 * used_ + 1] >> 6; // 26 bits
        ++used_;
        return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
    }

private:
    void refill() noexcept
    {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                                      (attempt_ << 20) | block_, stream_};
        buf_ = Philox4x32::block(ctr, key_);
        ++block_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t index_;
    std::uint32_t stream_;
    std::uint32_t attempt_;
    std::uint32_t block_ = 0;
    Philox4x32::Counter buf_{};
    int used_ = 2;
};

} // namespace sgpt
