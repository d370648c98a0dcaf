#include "kernels_common.hpp"

namespace finsler::kernels {

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (block + 1)));
    mix.next();
    return mix.next();
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t d = 0; d < lo.size(); ++d) v *= hi[d] - lo[d];
    return v;
}

namespace serial {

McEstimate integrate(const PointFunction& f, const Box& box, std::uint64_t samples, std::uint64_t seed) {
    const std::uint64_t blocks = detail::block_count(samples);
    std::vector<detail::BlockPartial> parts(blocks);
    for (std::uint64_t b = 0; b < blocks; ++b) parts[b] = detail::run_block(f, box, seed, b, samples);
    return detail::reduce(parts, box, samples, seed, 1);
}

std::vector<double> evaluate_cells(const PointFunction& f, const Box& box, std::span<const int> cells) {
    const std::size_t total = detail::total_cells(cells);
    std::vector<double> out(total);
    std::vector<double> x(box.dim());
    for (std::size_t i = 0; i < total; ++i) {
        detail::cell_midpoint(box, cells, i, x);
        out[i] = f(x);
    }
    return out;
}

}  // namespace serial

McEstimate integrate(const PointFunction& f, const Box& box, std::uint64_t samples, std::uint64_t seed,
                     Execution exec) {
    return exec == Execution::serial ? serial::integrate(f, box, samples, seed)
                                     : omp::integrate(f, box, samples, seed);
}

std::vector<double> evaluate_cells(const PointFunction& f, const Box& box, std::span<const int> cells,
                                   Execution exec) {
    return exec == Execution::serial ? serial::evaluate_cells(f, box, cells) : omp::evaluate_cells(f, box, cells);
}

}  // namespace finsler::kernels
