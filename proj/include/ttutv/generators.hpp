#pragma once

#include <cstdint>
#include <vector>

#include "ttutv/completion.hpp"
#include "ttutv/dense_tensor.hpp"
#include "ttutv/tt.hpp"

namespace ttutv {

/// Seeded splitmix64 generator with a fixed uniform/normal mapping, so
/// streams are bit-reproducible across platforms and library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller (pairs cached).
    double normal();
    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::uint64_t splitmix();

    std::uint64_t state_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// X(i_1,...,i_d) = 1 / (i_1 + ... + i_d) with 1-based indices.
DenseTensor gen_hilbert(const Shape& shape);

/// Train with iid standard normal core entries; dense form via reconstruct.
TTTensor gen_planted_tt(const Shape& shape, const std::vector<std::int64_t>& ranks, std::uint64_t seed);

/// Dense tensor with iid standard normal entries.
DenseTensor gen_gaussian(const Shape& shape, std::uint64_t seed);

/// 0/1 indicator tensor observing exactly floor(fraction * N) positions,
/// sampled without replacement.
DenseTensor gen_mask(const Shape& shape, double fraction, std::uint64_t seed);

}  // namespace ttutv
