#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace scenmargin {

/// Stream purposes. Each purpose owns an independent family of substreams.
enum class Purpose : std::uint64_t {
    scenarios = 1,
    monte_carlo = 2,
    multistart = 3,
    rademacher = 4,
    constants = 5,
    repetition = 6,
};

namespace detail {
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based generator: the i-th output of a stream is a pure function
/// of (key, i), so substreams can be handed to workers in any order.
class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

    /// Substream for (seed, purpose, index). Distinct triples give
    /// statistically independent streams.
    static constexpr CounterRng substream(std::uint64_t seed, Purpose purpose, std::uint64_t index) {
        std::uint64_t k = detail::mix64(seed + 0x9e3779b97f4a7c15ULL);
        k = detail::mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0xd1b54a32d192ed03ULL));
        k = detail::mix64(k + index * 0x8cb92ba72f3d8dd7ULL);
        return CounterRng(k);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    [[nodiscard]] constexpr std::uint64_t key() const { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace scenmargin
