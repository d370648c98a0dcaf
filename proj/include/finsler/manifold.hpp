#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/norms.hpp"

namespace finsler {

enum class InstanceKind { euclidean, minkowski, f_eps };

/// Base metric g on R^{n-1} for the warped family. `flat` is the Euclidean
/// metric; `smoothed_cone` is dr^2 + f(r)^2 dS^2 with f(r) = a r + (1 - a) tanh r,
/// which has nonnegative Ricci curvature and volume ratio a^{n-2}.
struct BaseMetric {
    enum class Kind { flat, smoothed_cone } kind = Kind::flat;
    double cone_factor = 1.0;  ///< a in (0, 1]

    [[nodiscard]] bool flat() const { return kind == Kind::flat; }
    [[nodiscard]] double warp(double r) const;  ///< f(r)
    /// Volume ratio of g + dt^2 on R^n.
    [[nodiscard]] double avr(int n) const;
    [[nodiscard]] std::string name() const;
    /// "euclidean" or "smoothed_cone:<a>".
    static BaseMetric parse(const std::string& text);
};

/// A Finsler structure on a single global chart R^n. Immutable.
class FinslerInstance {
public:
    static FinslerInstance euclidean(int n);
    static FinslerInstance minkowski(MinkowskiNorm h);
    /// F_eps((x,t),(v,w)) = sqrt(g_x(v,v) + w^2 + eps sqrt(g_x(v,v)^2 + w^4)).
    static FinslerInstance f_eps(int n, double eps, BaseMetric g = {});

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] InstanceKind kind() const { return kind_; }
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] const BaseMetric& base() const { return base_; }

    /// F(x, y).
    [[nodiscard]] double metric(std::span<const double> x, std::span<const double> y) const;
    /// Frozen tangent norm F(x, .).
    [[nodiscard]] MinkowskiNorm fiber(std::span<const double> x) const;
    /// True when F(x, .) does not depend on x; distances are then H(x1 - x0).
    [[nodiscard]] bool x_independent() const { return base_.flat(); }
    /// The tangent norm of an x-independent instance.
    [[nodiscard]] const MinkowskiNorm& norm() const;

    /// Vol_F(B_x(r)) when known exactly (omega_n r^n for every x-independent
    /// instance, whatever the scale of its norm).
    [[nodiscard]] std::optional<double> exact_ball_volume(double r) const;
    [[nodiscard]] std::optional<double> exact_avr() const;

    [[nodiscard]] nlohmann::json descriptor() const;

private:
    FinslerInstance() = default;
    friend FinslerInstance instance_from_descriptor(const nlohmann::json& d);

    int dim_ = 0;
    InstanceKind kind_ = InstanceKind::euclidean;
    double eps_ = 0.0;
    BaseMetric base_;
    std::optional<MinkowskiNorm> norm_;  ///< fiber norm at the origin (the norm itself when flat)
};

/// `{"kind": "euclidean"|"minkowski"|"f_eps", "n", "norm"?, "eps"?, "g"?}`.
FinslerInstance instance_from_descriptor(const nlohmann::json& d);

/// Busemann-Hausdorff density sigma_F(x) = omega_n / Vol(B_x(1)).
double bh_density(const FinslerInstance& m, std::span<const double> x, const VolumeOptions& opts = {});

struct DistanceOptions {
    int segments = 32;
    int sweeps = 200;
};

struct DistanceResult {
    double value = 0.0;  ///< exact distance, or the best certified upper value
    double lo = 0.0;
    double hi = 0.0;
    bool exact = false;
    bool warning = false;  ///< path optimizer did not improve on the sandwich
    std::string method;    ///< "closed_form" | "sandwich_bounds" | "path_optimization"
};

/// d_F(x0, x1). Exact for x-independent instances; otherwise the interval
/// implied by g~ <= F_eps <= sqrt(1 + eps) g~, tightened from above by a
/// piecewise-linear path optimizer.
DistanceResult distance(const FinslerInstance& m, std::span<const double> x0, std::span<const double> x1,
                        const DistanceOptions& opts = {});

struct BallOptions {
    bool force_monte_carlo = false;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 20240601;
    kernels::Execution execution = kernels::Execution::parallel;
};

struct BallVolume {
    double value = 0.0;
    double lo = 0.0;  ///< interval end points; equal to value when distances are exact
    double hi = 0.0;
    double std_error = 0.0;
    bool exact = false;
    std::string method;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Vol_F(B_{x0}(r)) = integral of sigma_F over {d_F(x0, .) < r}.
BallVolume ball_volume(const FinslerInstance& m, std::span<const double> x0, double r, const BallOptions& opts = {});

struct BallVolumeCurve {
    Vec center;
    std::vector<double> radii;
    std::vector<BallVolume> volumes;
    std::vector<double> ratios;  ///< Vol / (omega_n r^n)
    std::vector<double> ratio_errors;
    bool nondecreasing = true;
    bool bishop_gromov = true;  ///< ratios nonincreasing within 3 sigma
};

struct AvrEstimate {
    double point = 0.0;
    double std_error = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    std::string method;  ///< "exact" | "monte_carlo" | "sandwich_interval"
    BallVolumeCurve curve;
};

struct AvrOptions {
    BallOptions ball;
    std::optional<double> base_avr;  ///< AVR of g~, enables the sandwich interval
    bool throw_on_violation = true;
};

/// Volume-ratio curve over `radii` (increasing) with the Bishop-Gromov check.
/// Each radius uses its own seed stream derived from the ball seed.
BallVolumeCurve volume_curve(const FinslerInstance& m, std::span<const double> x0, std::span<const double> radii,
                             const BallOptions& opts = {});

/// Asymptotic volume ratio estimate: last ratio of the curve, the
/// Bishop-Gromov check, and for F_eps the interval
/// [AVR_g~ / (1 + eps)^{n/2}, AVR_g~]. Throws DataError when the ratio curve
/// increases beyond its error bars and `throw_on_violation` is set.
AvrEstimate avr(const FinslerInstance& m, std::span<const double> x0, std::span<const double> radii,
                const AvrOptions& opts = {});

/// Legendre transform nabla_F u = J*(x, du): the vector y with du(y) = F*(x, du)^2
/// and F(x, y) = F*(x, du). Zero for du = 0.
Vec finsler_gradient(const FinslerInstance& m, std::span<const double> x, std::span<const double> du);

}  // namespace finsler
