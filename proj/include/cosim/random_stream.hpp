#pragma once

#include <cstdint>
#include <random>

namespace cosim {

// Every random mechanism gets its own stream so adding a draw in one place
// never shifts the sequence of another.
enum class StreamKind : std::uint32_t {
    Backoff = 0,
    SenderGate = 1,
    ReceiverGate = 2,
};

/// Deterministic uniform source. A (seed, kind, node) triple always yields
/// the same sequence on every platform; draws avoid
/// std::uniform_real_distribution, whose output is implementation-defined.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, StreamKind kind, int node);

    /// Uniform double in [0, 1).
    double draw();

    /// Uniform integer in {0, ..., bound}.
    std::uint32_t draw_int(std::uint32_t bound);

private:
    std::mt19937_64 engine_;
};

} // namespace cosim
