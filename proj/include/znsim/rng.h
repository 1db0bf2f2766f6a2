// Counter-based random streams: stream(seed, index) is reproducible regardless
// of execution order, so path ensembles can be generated in parallel and still
// produce identical results.
#pragma once

#include <cstdint>
#include <random>

namespace znsim {

// One independent random stream, identified by (seed, stream_index).
// Distinct indices under the same seed give statistically independent streams;
// the same pair always reproduces the same sequence.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index)
        : engine_(derive_state(seed, stream_index)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
    // inverse transforms are safe.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached so consecutive calls cost one transform per two draws.
    double normal();

    // Exponential with rate 1.
    double exponential();

private:
    static std::uint64_t derive_state(std::uint64_t seed, std::uint64_t stream_index);

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace znsim
