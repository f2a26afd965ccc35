#include "cosim/random_stream.hpp"

namespace cosim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed, StreamKind kind, int node)
    : engine_(splitmix64(splitmix64(seed) ^
                         splitmix64((static_cast<std::uint64_t>(kind) << 32) ^
                                    static_cast<std::uint64_t>(static_cast<std::uint32_t>(node))))) {}

double RandomStream::draw() {
    // 53 significand bits, exactly representable, never reaches 1.0
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint32_t RandomStream::draw_int(std::uint32_t bound) {
    // modulo keeps sequences portable; bias at backoff window sizes is
    // below 2^-53 and irrelevant
    return static_cast<std::uint32_t>(engine_() % (static_cast<std::uint64_t>(bound) + 1));
}

} // namespace cosim
