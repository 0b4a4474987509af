#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace rismod {

/// SplitMix64 finalizer (Stafford variant 13). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Folds a sequence of indices into a single stream id.
///
///   id = 0; for each index i: id = mix64(id ^ mix64(i + 0x9E3779B97F4A7C15))
///
/// Used to give every (tag, snr index, channel index, ...) tuple its own
/// substream.
std::uint64_t stream_id_of(std::initializer_list<std::uint64_t> indices) noexcept;

/// Counter-based random stream identified by (master_seed, stream_id).
///
/// Derivation rule, fixed so runs are reproducible across machines:
///
///   key      = mix64(mix64(master_seed) + 0xD1B54A32D192ED03 * (stream_id + 1))
///   word(i)  = mix64(key + 0x9E3779B97F4A7C15 * (i + 1))      for i = 0, 1, ...
///
/// i.e. SplitMix64 keyed per stream. Every word is a pure function of
/// (master_seed, stream_id, i); the stream only carries its counter.
/// Uniform doubles use the top 53 bits of a word. Normal variates use the
/// Box-Muller transform on two consecutive uniforms, so bit-identity across
/// machines additionally requires the same libm log/sin/cos.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1).
    double uniform() noexcept;

    /// Uniform integer on [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;

    /// Standard normal.
    double normal() noexcept;

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0) noexcept;

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rismod
