#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace brbm {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the key; the 128-bit counter is split into a 64-bit
/// block index and a 64-bit stream id. Distinct stream ids therefore address
/// disjoint counter ranges, which is what makes per-replicate streams
/// independent without any coordination between them.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    /// The raw 10-round bijection, exposed for known-answer tests.
    static Counter bijection(Counter counter, Key key);

    result_type operator()();

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    void refill();

    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    unsigned next_ = 2;
};

/// A reproducible random stream identified by (seed, stream_id).
///
/// Single owner; not thread-safe. Create one per replicate.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform_open();
    double standard_normal() { return normal_(engine_); }

    Philox4x32& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    Philox4x32 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace brbm
