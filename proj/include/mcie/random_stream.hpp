#pragma once

#include <cstdint>
#include <limits>

namespace mcie {

/// Coordinates of one random draw. Stage 0 is reserved for single-block
/// integrators; tags at or above kAuxiliaryStage separate auxiliary uses.
struct Lane {
    std::uint64_t replication = 0;
    std::uint64_t stage = 0;
    std::uint64_t index = 0;
};

inline constexpr std::uint64_t kAuxiliaryStage = std::uint64_t{1} << 48;
inline constexpr std::uint64_t kGaussianStage = kAuxiliaryStage + 1;
inline constexpr std::uint64_t kProbeStage = kAuxiliaryStage + 2;

/// Channel offsets within a lane. Point coordinates use channels [0, dim).
inline constexpr std::uint64_t kEtaChannel = 1024;

/**
 * Counter-based random source: every value is a pure function of
 * (seed, lane, channel), so draws can be generated in any order or on any
 * thread without changing results.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t bits(const Lane& lane, std::uint64_t channel = 0) const noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform(const Lane& lane, std::uint64_t channel = 0) const noexcept {
        return static_cast<double>(bits(lane, channel) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_;
};

/// UniformRandomBitGenerator walking the channels of one lane, for use with
/// <random> distributions.
class LaneEngine {
public:
    using result_type = std::uint64_t;

    LaneEngine(const RandomStream& stream, const Lane& lane) noexcept : stream_(&stream), lane_(lane) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return stream_->bits(lane_, counter_++); }

private:
    const RandomStream* stream_;
    Lane lane_;
    std::uint64_t counter_ = 0;
};

}  // namespace mcie
