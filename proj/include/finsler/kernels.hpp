#pragma once

// Data-parallel sampling kernels. Every kernel exists twice: a serial reference
// (kernels_serial.cpp) and an OpenMP version (kernels_omp.cpp). Both walk the
// same fixed partition of the sample stream into blocks, each block seeded from
// (seed, block index), and reduce block partials in block order, so results are
// bit-identical for any worker count.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace finsler::kernels {

inline constexpr std::uint64_t kBlockSize = 8192;

/// SplitMix64 stream; small, fast and good enough for Monte-Carlo volumes.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Seed of block `block` of the stream identified by `seed`.
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block);

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
    [[nodiscard]] std::size_t dim() const { return lo.size(); }
    [[nodiscard]] double volume() const;
};

struct McEstimate {
    double value = 0.0;      ///< estimate of the integral over the box
    double std_error = 0.0;  ///< one-sigma standard error
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    int workers = 1;
};

using PointFunction = std::function<double(std::span<const double>)>;

enum class Execution { serial, parallel };

/// Worker count used by the parallel kernels (0 = OpenMP default).
void set_threads(int threads);
int threads();

namespace serial {
McEstimate integrate(const PointFunction& f, const Box& box, std::uint64_t samples, std::uint64_t seed);
std::vector<double> evaluate_cells(const PointFunction& f, const Box& box, std::span<const int> cells);
}  // namespace serial

namespace omp {
McEstimate integrate(const PointFunction& f, const Box& box, std::uint64_t samples, std::uint64_t seed);
std::vector<double> evaluate_cells(const PointFunction& f, const Box& box, std::span<const int> cells);
/// Runs body(i) for i in [0, count) across workers; body must be thread-safe.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);
}  // namespace omp

/// Monte-Carlo estimate of the integral of f over `box` with `samples` uniform points.
McEstimate integrate(const PointFunction& f, const Box& box, std::uint64_t samples, std::uint64_t seed,
                     Execution exec = Execution::parallel);

/// Values of f at the midpoints of a regular cell grid over `box`
/// (cells[d] cells along axis d), in row-major order with axis 0 slowest.
std::vector<double> evaluate_cells(const PointFunction& f, const Box& box, std::span<const int> cells,
                                   Execution exec = Execution::parallel);

}  // namespace finsler::kernels
