#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/manifold.hpp"
#include "finsler/rearrange.hpp"
#include "finsler/report.hpp"

namespace finsler {

/// Support bound: sup|u| <= T_MS Vol(supp u)^{1/n - 1/p} E_p(u)^{1/p}, p > n.
InequalityReport verify_morrey_support(const FinslerInstance& m, const RadialFunction& u, double p);

/// L^1 bound: sup|u| <= C_MS ||u||_1^{1 - eta} E_p(u)^{eta / p}, p > n.
InequalityReport verify_morrey_l1(const FinslerInstance& m, const RadialFunction& u, double p);

/// Scaled energies of u_R = morrey_extremal(p, n, R) against their limit and the
/// inferred constant against T_MS.
SweepResult sharpness_sweep_support(const FinslerInstance& m, double p, std::span<const double> radii);

/// Mass, energy and sup of the L^1 extremal family against their Beta limits.
SweepResult sharpness_sweep_l1(const FinslerInstance& m, double p, std::span<const double> radii);

/// E_p(u) >= avr^{p/n} ((n - p) / p)^p int |u|^p d(x0, .)^{-p} dv, n > p > 1.
InequalityReport verify_hardy(const FinslerInstance& m, const RadialFunction& u, double p, std::span<const double> x0);

/// Cap A(delta) = e^{1/delta} of the near-extremal Hardy family.
double hardy_family_cap(double delta);

/// Hardy ratios along hardy_cap(p, n, delta, A(delta)); `scaled` holds rhs / lhs,
/// which must increase as delta decreases. No limit is asserted.
SweepResult hardy_near_extremal(const FinslerInstance& m, double p, std::span<const double> deltas);

/// E_2(u) - mu int u^2 d(x0, .)^{-2} >= S_mu(Omega) int u^2 on the Wulff ball
/// Omega = {H(x - x0) < radius}; u must be supported in Omega.
InequalityReport verify_bpv(const FinslerInstance& m, double radius, const RadialFunction& u, double mu,
                            std::span<const double> x0);

/// Bounded domains for the isoperimetric check.
struct Domain {
    enum class Kind { wulff, ball, ellipsoid, box };
    Kind kind = Kind::wulff;
    std::optional<MinkowskiNorm> norm;  ///< Wulff shapes: norm of the shape (instance norm if unset)
    double radius = 1.0;
    std::vector<double> axes;  ///< ellipsoid semi-axes or box half-widths

    static Domain wulff(double radius, std::optional<MinkowskiNorm> norm = std::nullopt);
    static Domain ball(double radius);
    static Domain ellipsoid(std::vector<double> semi_axes);
    static Domain box(std::vector<double> half_widths);
    [[nodiscard]] nlohmann::json descriptor() const;
};

/// `{"kind": "wulff"|"ball"|"ellipsoid"|"ellipse"|"box"|"rectangle", "radius"?, "axes"?, "norm"?}`.
Domain domain_from_descriptor(const nlohmann::json& d);

/// P_F(boundary) >= n omega_n^{1/n} avr^{1/n} Vol_F(Omega)^{(n-1)/n} on an
/// x-independent instance, with P_F = sigma int H*(nu) d area. Smooth boundaries
/// are integrated over the sphere of directions; boxes face by face.
InequalityReport verify_isoperimetric(const FinslerInstance& m, const Domain& omega);

/// Randomized property suites.
enum class SuiteKind {
    morrey_support,
    morrey_l1,
    hardy,
    bpv,
    polya_szego,
    hlp,
    layer_cake,
    equimeasurability,
};

std::string to_string(SuiteKind kind);
SuiteKind suite_kind_from_string(const std::string& name);

struct SuiteOptions {
    int cases = 100;
    std::uint64_t seed = 20240601;
    std::optional<double> p;  ///< fixed exponent; drawn per case otherwise
};

struct SuiteSummary {
    SuiteKind kind = SuiteKind::hardy;
    nlohmann::json instance;
    int cases = 0;
    int failures = 0;
    double worst_margin = 0.0;  ///< smallest signed relative slack over cases (negative = violation)
    std::vector<InequalityReport> failed;  ///< first few failing reports
    std::uint64_t seed = 0;
    int workers = 1;
    [[nodiscard]] bool pass() const { return failures == 0; }
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Runs `opts.cases` random draws in parallel; case i uses block_seed(seed, i).
SuiteSummary random_suite(SuiteKind kind, const FinslerInstance& m, const SuiteOptions& opts = {});

}  // namespace finsler
