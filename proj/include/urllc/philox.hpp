#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so independent streams need no shared
// state and results do not depend on how work is scheduled.

#include <array>
#include <cstdint>

namespace urllc {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
};

/// Uniform doubles for one (seed, stream, frame, user) cell. Successive
/// blocks walk the low 20 bits of the last counter word (user index in the
/// high 12), so a cell owns 2^20 blocks.
class CellRng {
public:
    CellRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t frame, std::uint32_t user)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{static_cast<std::uint32_t>(frame), static_cast<std::uint32_t>(frame >> 32), stream, user << 20} {}

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        if (next_ == 2) refill();
        const std::uint64_t hi = block_[2 * next_];
        const std::uint64_t lo = block_[2 * next_ + 1];
        ++next_;
        const std::uint64_t bits = ((hi << 21) ^ (lo >> 11)) & ((1ull << 53) - 1);
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

private:
    void refill() {
        block_ = Philox4x32::generate(ctr_, key_);
        ++ctr_[3];
        next_ = 0;
    }

    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter block_{};
    int next_ = 2;
};

}  // namespace urllc
