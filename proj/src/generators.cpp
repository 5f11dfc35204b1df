#include "ttutv/generators.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ttutv/errors.hpp"

namespace ttutv {

// splitmix64 step; fixed here (rather than std::mt19937_64 plus distribution
// adapters) so that identical seeds give identical bytes on every platform.
std::uint64_t Rng::splitmix() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() { return splitmix(); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; 1-u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ArgumentError("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw = next_u64();
    while (draw >= limit) draw = next_u64();
    return lo + static_cast<std::int64_t>(draw % span);
}

DenseTensor gen_hilbert(const Shape& shape) {
    DenseTensor out{shape};
    std::vector<std::int64_t> idx(static_cast<std::size_t>(shape.order()), 1);
    std::int64_t linear = 0;
    do {
        std::int64_t total = 0;
        for (std::int64_t v : idx) total += v;
        out[linear++] = 1.0 / static_cast<double>(total);
    } while (next_index(idx, shape));
    return out;
}

TTTensor gen_planted_tt(const Shape& shape, const std::vector<std::int64_t>& ranks,
                        std::uint64_t seed) {
    const std::int64_t d = shape.order();
    if (static_cast<std::int64_t>(ranks.size()) != d + 1)
        throw ArgumentError("rank chain length must be order + 1");
    if (ranks.front() != 1 || ranks.back() != 1)
        throw ArgumentError("boundary ranks must both be 1");
    Rng rng(seed);
    std::vector<TTCore> cores;
    cores.reserve(static_cast<std::size_t>(d));
    for (std::int64_t k = 0; k < d; ++k) {
        DenseTensor core{Shape({ranks[static_cast<std::size_t>(k)], shape.dim(k + 1),
                                ranks[static_cast<std::size_t>(k) + 1]})};
        for (std::int64_t i = 0; i < core.element_count(); ++i) core[i] = rng.normal();
        cores.push_back(TTCore{std::move(core)});
    }
    return TTTensor(std::move(cores));
}

DenseTensor gen_gaussian(const Shape& shape, std::uint64_t seed) {
    Rng rng(seed);
    DenseTensor out{shape};
    for (std::int64_t i = 0; i < out.element_count(); ++i) out[i] = rng.normal();
    return out;
}

DenseTensor gen_mask(const Shape& shape, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0) throw ArgumentError("mask fraction must be in [0, 1]");
    const std::int64_t n = shape.element_count();
    const std::int64_t count = static_cast<std::int64_t>(fraction * static_cast<double>(n));
    Rng rng(seed);
    // Partial Fisher-Yates: the first `count` slots end up a uniform sample
    // without replacement.
    std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    DenseTensor out{shape};
    for (std::int64_t i = 0; i < count; ++i) {
        const std::int64_t j = rng.uniform_int(i, n - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        out[pool[static_cast<std::size_t>(i)]] = 1.0;
    }
    return out;
}

}  // namespace ttutv
