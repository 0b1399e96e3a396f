#pragma once

#include <array>
#include <cstdint>

namespace jdpinn {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// A stream is identified by (seed, stream id); the draw index is the low half
// of the counter, so path i of a Monte Carlo run consumes stream i and the
// result does not depend on which thread evaluates it.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal by inversion of the CDF.
    double normal() noexcept;
    /// Exponential with the given rate.
    double exponential(double rate) noexcept;
    std::uint64_t next_u64() noexcept;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;  // 32-bit words consumed from buffer_
};

/// Derives an independent 64-bit sub-seed from a master seed and a label.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label) noexcept;

/// Inverse of the standard normal CDF. Acklam's rational approximation
/// (relative error 1.15e-9) followed by one Halley step against erfc, giving
/// close to full double precision on (0, 1).
double inverse_normal_cdf(double p) noexcept;

double normal_cdf(double x) noexcept;

}  // namespace jdpinn
