#include "mcie/random_stream.hpp"

namespace mcie {
namespace {

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomStream::bits(const Lane& lane, std::uint64_t channel) const noexcept {
    // Each coordinate is absorbed through a full avalanche round, so lanes that
    // differ in any field land on unrelated outputs.
    std::uint64_t h = mix(seed_ ^ 0x6A09E667F3BCC908ULL);
    h = mix(h ^ lane.replication);
    h = mix(h ^ (lane.stage * 0xD1B54A32D192ED03ULL));
    h = mix(h ^ lane.index);
    h = mix(h ^ (channel * 0xABC98388FB8FAC03ULL));
    return h;
}

}  // namespace mcie
