#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "finsler/kernels.hpp"
#include "finsler/manifold.hpp"
#include "finsler/norms.hpp"
#include "finsler/profiles.hpp"
#include "finsler/report.hpp"

namespace finsler {

/// rho -> Vol(B(rho)) and its derivative.
struct VolumeGrowth {
    std::function<double(double)> volume;
    std::function<double(double)> density;
    int dim = 0;
    double coefficient = 0.0;  ///< c in c rho^n for power laws, 0 otherwise

    static VolumeGrowth power_law(int n, double coefficient);
};

/// u(x) = g(K(x - center)) with K the instance metric unless `shape` is set.
struct RadialFunction {
    Profile profile;
    Vec center;
    std::optional<MinkowskiNorm> shape;
};

/// Volume growth of {u > t} in terms of the profile radius: omega_n rho^n for
/// functions radial in the instance metric, omega_n (Vol W_K / Vol W_H) rho^n
/// for functions radial in a different norm K. Needs an x-independent instance.
VolumeGrowth level_set_growth(const FinslerInstance& m, const RadialFunction& u);

/// Exact superlevel sets of a radial profile under a volume growth.
class RadialLevelSets {
public:
    RadialLevelSets(Profile g, VolumeGrowth v);

    /// mu(t) = Vol{g > t}; right-continuous.
    [[nodiscard]] double mu(double t) const;
    /// Vol{g >= t}; differs from mu(t) where g has a plateau at height t.
    [[nodiscard]] double mu_at_least(double t) const;
    /// -mu'(t) = sum over g(rho_i) = t of V'(rho_i) / |g'(rho_i)|.
    [[nodiscard]] double mu_rate(double t) const;
    [[nodiscard]] std::vector<double> crossings(double t) const;
    /// Values of g at the ends of its monotone segments, plus 0 and sup, sorted.
    [[nodiscard]] std::vector<double> critical_values() const;
    [[nodiscard]] double sup() const { return sup_; }
    [[nodiscard]] double support_volume() const { return mu(0.0); }
    [[nodiscard]] const Profile& profile() const { return g_; }
    [[nodiscard]] const VolumeGrowth& growth() const { return v_; }

private:
    [[nodiscard]] double volume_above(double t, bool inclusive) const;

    struct Segment {
        double a, b, ga, gb;
    };
    Profile g_;
    VolumeGrowth v_;
    std::vector<Segment> segments_;
    double sup_ = 0.0;
};

/// Function sampled on the midpoints of a cell grid over a box (Minkowski instances only).
struct SampledFunction {
    kernels::PointFunction f;
    kernels::Box box;
    std::vector<int> cells;
};

/// mu on a level grid; between grid levels the value of the next lower level is used.
struct DistributionFunction {
    std::vector<double> levels;
    std::vector<double> mu;
    double sup = 0.0;
    double support_volume = 0.0;
    [[nodiscard]] double operator()(double t) const;
};

/// 2048-node hybrid grid on [0, sup]: uniform in the bulk, geometric towards both ends.
std::vector<double> level_grid(double sup, int count = 2048);

DistributionFunction distribution(const RadialFunction& u, const FinslerInstance& m, std::span<const double> levels);
DistributionFunction distribution(const SampledFunction& u, const FinslerInstance& m, std::span<const double> levels,
                                  kernels::Execution exec = kernels::Execution::parallel);

/// u*_H(x) = v(omega_n H(x)^n), v(s) = inf{t >= 0 : mu(t) <= s}.
struct DecreasingProfile {
    int dim = 0;
    std::optional<MinkowskiNorm> norm;
    std::function<double(double)> v;
    double support_volume = 0.0;
    double sup = 0.0;
    bool exact = false;  ///< v inverts the exact distribution (radial input)
    std::shared_ptr<const RadialLevelSets> source;
    DistributionFunction grid;

    [[nodiscard]] double at_volume(double s) const { return s >= support_volume ? 0.0 : v(s); }
    /// v(omega_n rho^n).
    [[nodiscard]] double radial(double rho) const;
    [[nodiscard]] double operator()(std::span<const double> x) const;
    /// |{s : v(s) > t}| computed from v itself.
    [[nodiscard]] double superlevel_volume(double t) const;
};

/// Anisotropic rearrangement onto the normalized norm h.
DecreasingProfile rearrange(const RadialFunction& u, const FinslerInstance& m, const MinkowskiNorm& h,
                            int levels = 2048);
DecreasingProfile rearrange(const SampledFunction& u, const FinslerInstance& m, const MinkowskiNorm& h,
                            int levels = 2048, kernels::Execution exec = kernels::Execution::parallel);

struct NormPair {
    double q;
    double source;      ///< ||u||_{L^q(M)}
    double rearranged;  ///< ||u*_H||_{L^q(R^n)}
};
/// q = HUGE_VAL selects the sup norm.
std::vector<NormPair> lq_norms(const RadialFunction& u, const FinslerInstance& m, const DecreasingProfile& us,
                               std::span<const double> qs);

struct RadialIntegral {
    double value = 0.0;
    double error = 0.0;
    bool divergent = false;
};

/// int_0^R |g'(rho)|^p rho^{n-1} d rho, split at kinks, graded at singular ends.
RadialIntegral profile_energy(const Profile& g, int n, double p);

/// sigma_H int_{S^{n-1}} H*(DK(theta))^p K(theta)^{-n} d theta: the energy of
/// g(K(x)) under H is this factor times int |g'|^p rho^{n-1}. Equals n omega_n
/// when K = H (any scale). Quadrature for n <= 3.
double energy_factor(const MinkowskiNorm& measure, const MinkowskiNorm& shape, double p);

/// Energy int H*(D(g o H))^p dv_H of a radial profile on the normalized norm h.
RadialIntegral radial_dirichlet_energy(const Profile& g, const MinkowskiNorm& h, double p);

/// int_M F*(Du)^p dv_F for a radial function on an x-independent instance.
RadialIntegral source_energy(const RadialFunction& u, const FinslerInstance& m, double p);

/// Energy of u*_H by the co-area formula in t:
/// int_0^sup P(mu(t))^p (-mu'(t))^{1-p} dt, P(m) = n omega_n^{1/n} m^{(n-1)/n}.
RadialIntegral rearranged_energy(const DecreasingProfile& us, double p);

struct LayerCake {
    double lhs = 0.0;
    double rhs = 0.0;
};
/// lhs = int_{B(R)} f(d) dv (radial quadrature);
/// rhs = f(R) V(R) - int_0^R f'(r) V(r) dr. `left_power` is the exponent of f at 0.
LayerCake layer_cake_integral(const VolumeGrowth& v, const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double radius, double left_power = 0.0);
LayerCake layer_cake_integral(const FinslerInstance& m, std::span<const double> x0,
                              const std::function<double(double)>& f, const std::function<double(double)>& df,
                              double radius, double left_power = 0.0);

/// Radial weight f(r) with f(r) ~ r^power_at_zero near 0.
struct Weight {
    std::function<double(double)> f;
    double power_at_zero = 0.0;
    std::string name = "custom";

    static Weight power(double k);  ///< r^k
    static Weight constant();
};

/// ||u||_{L^q(M)}; q = HUGE_VAL gives the sup.
double source_lq_norm(const RadialFunction& u, const FinslerInstance& m, double q);

/// int_M |u|^p f(d_F(x0, .)) dv_F. Off-centre or cross-norm functions use polar
/// quadrature about x0 (n = 2) or an axisymmetric reduction (Euclidean, n = 3).
RadialIntegral weighted_power_integral(const RadialFunction& u, const FinslerInstance& m, const Weight& f, double p,
                                       std::span<const double> x0);

/// Polya-Szego: int F*(Du)^p dv_F >= avr^{p/n} int H*(Du*_H)^p dx.
InequalityReport polya_szego_check(const RadialFunction& u, const FinslerInstance& m, const MinkowskiNorm& h,
                                   double p, std::optional<double> avr = std::nullopt);

/// Hardy-Littlewood-Polya: int u^p f(d(x0, .)) dv_F <= int (u*_H)^p f(H) dx.
InequalityReport hlp_check(const RadialFunction& u, const FinslerInstance& m, const MinkowskiNorm& h,
                           const Weight& f, double p, std::span<const double> x0);

}  // namespace finsler
