#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/kernels.hpp"

namespace finsler {

using Vec = std::vector<double>;

enum class NormKind { euclidean, lp, f_eps_fiber, custom };

/// A reversible norm H on R^n, optionally carrying a closed-form dual and
/// gradient. Objects are immutable; `scaled` returns a new norm c*H.
class MinkowskiNorm {
public:
    using Eval = std::function<double(std::span<const double>)>;
    using Grad = std::function<void(std::span<const double>, std::span<double>)>;

    static MinkowskiNorm euclidean(int n);
    /// l^p norm, p in [1, inf]; pass HUGE_VAL for the max norm.
    static MinkowskiNorm lp(int n, double p);
    /// Tangent norm of the warped metric F_eps over a Euclidean base:
    /// y = (v, w) in R^{n-1} x R, H(y) = sqrt(|v|^2 + w^2 + eps sqrt(|v|^4 + w^4)).
    static MinkowskiNorm f_eps_fiber(int n, double eps);
    /// y -> ||A y||_p for an invertible n x n matrix A (row-major).
    static MinkowskiNorm linear_image(int n, std::vector<double> matrix, double p = 2.0);
    /// Arbitrary evaluator; the dual is then computed numerically unless given.
    static MinkowskiNorm custom(int n, Eval eval, std::optional<Eval> dual = std::nullopt, std::string name = "custom");

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double operator()(std::span<const double> y) const { return scale_ * eval_(y); }
    [[nodiscard]] double scale() const { return scale_; }
    [[nodiscard]] MinkowskiNorm scaled(double c) const;

    [[nodiscard]] bool has_analytic_dual() const { return static_cast<bool>(dual_); }
    /// Closed-form dual (already divided by the scale), if any.
    [[nodiscard]] std::optional<double> analytic_dual(std::span<const double> alpha) const;
    [[nodiscard]] bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
    /// Gradient of H at y != 0; closed form when available, else central differences.
    [[nodiscard]] Vec gradient(std::span<const double> y, bool force_finite_difference = false) const;

    /// False for l^1 and l^inf: admitted for closed-form values only.
    [[nodiscard]] bool smooth() const { return smooth_; }
    [[nodiscard]] NormKind kind() const { return kind_; }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double parameter() const { return param_; }

    /// Descriptor document `{"kind", "n", "p"?, "eps"?, "scale"}`.
    [[nodiscard]] nlohmann::json descriptor() const;

private:
    MinkowskiNorm() = default;

    int dim_ = 0;
    NormKind kind_ = NormKind::custom;
    std::string name_;
    double param_ = 0.0;
    double scale_ = 1.0;
    bool smooth_ = true;
    Eval eval_;
    Eval dual_;
    Grad grad_;
    std::vector<double> matrix_;
};

/// Wulff shape W_H(R) = {x : H(x) < R}.
struct WulffShape {
    MinkowskiNorm norm;
    double radius = 1.0;
    [[nodiscard]] bool contains(std::span<const double> x) const { return norm(x) < radius; }
};

struct DualOptions {
    int random_starts = 2;
    int max_iterations = 400;
    double tolerance = 1e-13;
    std::uint64_t seed = 0x5EEDF00DULL;
};

struct DualResult {
    double value = 0.0;
    Vec maximizer;  ///< point of the H-unit sphere where alpha is maximal
    int iterations = 0;
};

/// Numerical polar transform sup{alpha(y) : H(y) <= 1}: multi-start projected
/// ascent of alpha(t) / H(t) over the Euclidean sphere, then golden-section
/// refinement along great circles. Throws NumericalError (carrying the best
/// value) when the ascent does not settle within the iteration budget.
DualResult dual_norm_numeric(const MinkowskiNorm& h, std::span<const double> alpha, const DualOptions& opts = {});

/// H*(alpha): closed form when available, numerical otherwise.
double dual_norm(const MinkowskiNorm& h, std::span<const double> alpha, const DualOptions& opts = {});

enum class VolumeMethod { automatic, quadrature, monte_carlo, closed_form };

struct VolumeOptions {
    VolumeMethod method = VolumeMethod::automatic;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 20240601;
    kernels::Execution execution = kernels::Execution::parallel;
};

struct VolumeEstimate {
    double value = 0.0;
    double std_error = 0.0;  ///< Monte-Carlo one-sigma error, quadrature error estimate otherwise
    VolumeMethod method = VolumeMethod::quadrature;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Box [-R H*(e_i), R H*(e_i)] containing W_H(R); H*(e_i) is the support
/// function of the unit Wulff shape in direction e_i.
kernels::Box wulff_bounding_box(const MinkowskiNorm& h, double radius = 1.0);

/// Euclidean volume of W_H(1). Automatic method: radial-angular quadrature for
/// n <= 3, Monte-Carlo over the bounding box otherwise.
VolumeEstimate wulff_volume(const MinkowskiNorm& h, const VolumeOptions& opts = {});

/// c H with Vol(W_{cH}(1)) = omega_n, where c = (Vol(W_H(1)) / omega_n)^{1/n}.
MinkowskiNorm normalize(const MinkowskiNorm& h, const VolumeOptions& opts = {});

/// Integral over the Euclidean unit sphere of f(theta) (n = 2 or 3) by nested
/// adaptive quadrature; used for Wulff volumes and anisotropic energies.
double sphere_integral(int n, const std::function<double(std::span<const double>)>& f, double rel_tol = 1e-12);

/// max over samples of |H*(DH(x)) - 1|. DH uses the closed-form gradient when
/// available unless `force_finite_difference` is set.
double eikonal_residual(const MinkowskiNorm& h, std::span<const Vec> samples, bool force_finite_difference = false);

/// Builds a norm from `{"kind": "euclidean"|"lp"|"f_eps_fiber"|"custom", "n", "p"?, "eps"?,
/// "matrix"?, "normalized"?}`. Throws ConfigError on malformed input.
MinkowskiNorm norm_from_descriptor(const nlohmann::json& d);

}  // namespace finsler
