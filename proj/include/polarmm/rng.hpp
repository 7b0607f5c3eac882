#pragma once

#include <cstdint>
#include <string_view>

namespace polarmm {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; full-period bijective mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Counter-based generator (splitmix64 over key + i*golden). Streams are
// addressed, not stepped: the stream for (seed, task, index) is the same no
// matter which thread evaluates it or in what order, which is what makes
// simulation output independent of the thread count.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static CounterRng derive(std::uint64_t seed, std::string_view task, std::uint64_t index) {
        std::uint64_t k = detail::mix64(seed + detail::kGolden);
        k = detail::mix64(k ^ detail::fnv1a64(task));
        k = detail::mix64(k + detail::kGolden * (index + 1));
        return CounterRng(k);
    }

    std::uint64_t next_u64() { return detail::mix64(key_ + detail::kGolden * ++counter_); }

    // Uniform on [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1); never returns 0 (safe as a log argument).
    double next_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint32_t next_bit() { return static_cast<std::uint32_t>(next_u64() >> 63); }

    // Uniform integer in [0, n); n >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        // Lemire's multiply-shift; bias below 2^-64 is irrelevant here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace polarmm
