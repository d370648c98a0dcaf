#pragma once

#include <cmath>
#include <vector>

#include "finsler/kernels.hpp"

namespace finsler::kernels::detail {

struct BlockPartial {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t count = 0;
};

inline std::uint64_t block_count(std::uint64_t samples) { return (samples + kBlockSize - 1) / kBlockSize; }

inline BlockPartial run_block(const PointFunction& f, const Box& box, std::uint64_t seed, std::uint64_t block,
                              std::uint64_t samples) {
    const std::size_t dim = box.dim();
    const std::uint64_t begin = block * kBlockSize;
    const std::uint64_t end = std::min(samples, begin + kBlockSize);
    SplitMix64 rng(block_seed(seed, block));
    std::vector<double> x(dim);
    BlockPartial part;
    for (std::uint64_t i = begin; i < end; ++i) {
        for (std::size_t d = 0; d < dim; ++d) x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * rng.uniform();
        const double v = f(x);
        part.sum += v;
        part.sum_sq += v * v;
        ++part.count;
    }
    return part;
}

inline McEstimate reduce(const std::vector<BlockPartial>& parts, const Box& box, std::uint64_t samples,
                         std::uint64_t seed, int workers) {
    double s = 0.0, ss = 0.0;
    for (const auto& p : parts) {
        s += p.sum;
        ss += p.sum_sq;
    }
    McEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.workers = workers;
    if (samples == 0) return est;
    const double n = static_cast<double>(samples);
    const double mean = s / n;
    const double var = samples > 1 ? std::max(0.0, (ss / n - mean * mean) * n / (n - 1.0)) : 0.0;
    const double vol = box.volume();
    est.value = vol * mean;
    est.std_error = vol * std::sqrt(var / n);
    return est;
}

inline void cell_midpoint(const Box& box, std::span<const int> cells, std::size_t index, std::vector<double>& x) {
    const std::size_t dim = box.dim();
    for (std::size_t d = dim; d-- > 0;) {
        const std::size_t k = index % static_cast<std::size_t>(cells[d]);
        index /= static_cast<std::size_t>(cells[d]);
        const double h = (box.hi[d] - box.lo[d]) / cells[d];
        x[d] = box.lo[d] + (static_cast<double>(k) + 0.5) * h;
    }
}

inline std::size_t total_cells(std::span<const int> cells) {
    std::size_t total = 1;
    for (int c : cells) total *= static_cast<std::size_t>(c);
    return total;
}

}  // namespace finsler::kernels::detail
