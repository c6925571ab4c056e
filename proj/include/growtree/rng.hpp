#pragma once

#include <cstdint>

namespace growtree {

// Counter-style 64-bit generator (splitmix64 update and finalizer).
// A stream is fully determined by (base_seed, stream_index); replicate
// streams are decorrelated by mixing the index through the finalizer,
// so results do not depend on the order streams are created or used.
class RngStream {
  public:
    explicit RngStream(std::uint64_t base_seed, std::uint64_t stream_index = 0) {
        std::uint64_t s = finalize(base_seed + 0x9E3779B97F4A7C15ull);
        s ^= finalize(stream_index + 0xD1B54A32D192ED03ull);
        state_ = finalize(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return finalize(state_);
    }

    // Exact uniform draw on [0, n) via multiply-shift with rejection.
    std::uint64_t next_below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = -n % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // 53-bit uniform double in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    static std::uint64_t finalize(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace growtree
