#include <omp.h>

#include <atomic>
#include <exception>

#include "kernels_common.hpp"

namespace finsler::kernels {

namespace {
std::atomic<int> g_threads{0};

int resolve_workers() {
    const int t = g_threads.load();
    return t > 0 ? t : omp_get_max_threads();
}
}  // namespace

void set_threads(int t) { g_threads.store(t < 0 ? 0 : t); }
int threads() { return resolve_workers(); }

namespace omp {

McEstimate integrate(const PointFunction& f, const Box& box, std::uint64_t samples, std::uint64_t seed) {
    const auto blocks = static_cast<std::int64_t>(detail::block_count(samples));
    std::vector<detail::BlockPartial> parts(static_cast<std::size_t>(blocks));
    const int workers = resolve_workers();
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t b = 0; b < blocks; ++b) {
        parts[static_cast<std::size_t>(b)] = detail::run_block(f, box, seed, static_cast<std::uint64_t>(b), samples);
    }
    return detail::reduce(parts, box, samples, seed, workers);
}

std::vector<double> evaluate_cells(const PointFunction& f, const Box& box, std::span<const int> cells) {
    const auto total = static_cast<std::int64_t>(detail::total_cells(cells));
    std::vector<double> out(static_cast<std::size_t>(total));
    const int workers = resolve_workers();
#pragma omp parallel num_threads(workers)
    {
        std::vector<double> x(box.dim());
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < total; ++i) {
            detail::cell_midpoint(box, cells, static_cast<std::size_t>(i), x);
            out[static_cast<std::size_t>(i)] = f(x);
        }
    }
    return out;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const auto n = static_cast<std::int64_t>(count);
    const int workers = resolve_workers();
    std::exception_ptr first;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(finsler_parallel_for_error)
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace omp
}  // namespace finsler::kernels
