#pragma once

// Longitudinal-lateral look-ahead pursuit law, its finite-time compensation layer, and
// the feasibility / settling-time diagnostics that go with it. All functions are pure.

#include "rllp/config.hpp"
#include "rllp/path.hpp"
#include "rllp/types.hpp"

namespace rllp {

inline constexpr double kThetaGuard = 1e-6;

struct CompensationGains {
    double k1 = 0.0;  // rad/s
    double k2 = 0.0;
};

/// Angular-rate compensation (f_chi, f_gamma) with per-axis singularity flags.
struct AxisCompensation {
    double f_chi = 0.0;
    double f_gamma = 0.0;
    bool singular_chi = false;
    bool singular_gamma = false;
};

struct CompensationTerms {
    double f_chi = 0.0;
    double f_gamma = 0.0;
    double f_lat = 0.0;  // after clipping
    double f_lon = 0.0;
    bool clipped = false;
};

/// Box on (f_chi, f_gamma) that keeps the compensated command inside the acceleration limits.
struct CompensationBox {
    double f_chi_min = 0.0;
    double f_chi_max = 0.0;
    double f_gamma_min = 0.0;
    double f_gamma_max = 0.0;
};

struct Feasibility {
    bool feasible = false;
    double tau_star = 0.0;  // largest admissible tau; negative when infeasible
    double f_chi_opt = 0.0;  // minimizing box vertex
    double f_gamma_opt = 0.0;
};

struct AssembledCommand {
    AccelCommand command;
    CompensationTerms terms;
};

struct AttractionRegion {
    double max_initial_norm = 0.0;  // rad
    double max_disturbance = 0.0;   // rad/s
};

struct KqSearchResult {
    double k_q = 0.0;
    bool feasible = false;
    int steps = 0;  // number of decay multiplications performed
    Feasibility feasibility;
};

/// Clamps a command to the configured acceleration box.
AccelCommand saturate(const AccelCommand& cmd, const GuidanceConfig& cfg);

/// a_yc = k_q V sin(eta_lat) cos(gamma), a_zc = k_q V sin(eta_lon) + g cos(gamma), with both
/// angles first clamped to [-delta, delta] and the result saturated.
AccelCommand base_law(const LookaheadGeometry& geom, const UavState& state, const GuidanceConfig& cfg);

/// f_chi = -k1 / sin(theta), f_gamma = -k2 / cos(theta). An axis whose direction cosine is
/// below kThetaGuard (or an undefined theta) contributes zero and is flagged singular.
AxisCompensation typical_compensation(const LookaheadGeometry& geom, const CompensationGains& gains);

/// Limits on f_chi / f_gamma implied by the acceleration box around the base command.
CompensationBox compensation_box(const LookaheadGeometry& geom, const UavState& state,
                                 const GuidanceConfig& cfg, const LosRates& c_dots);

/// Existence test for a compensation satisfying the finite-time condition inside `box`.
/// Requires a defined theta.
Feasibility check_feasibility(const LookaheadGeometry& geom, const CompensationBox& box, double L_d);

/// f_lat = c1_dot - f_chi, f_lon = c2_dot - f_gamma, clipped to their bounds and added to
/// the base command. The output always satisfies the acceleration limits.
AssembledCommand clip_and_assemble(const AccelCommand& base, double f_chi, double f_gamma,
                                   const LosRates& c_dots, const UavState& state,
                                   const LookaheadGeometry& geom, const GuidanceConfig& cfg);

/// (1 / (k_q cos delta)) ln(1 + (k_q / tau) sqrt(sin^2 eta_lon + sin^2 eta_lat)).
/// Throws Error(NonPositiveTau) for tau <= 0.
double finite_time_bound(double eta_lat, double eta_lon, double k_q, double delta, double tau);
double settling_time_bound(const LookaheadGeometry& geom, const GuidanceConfig& cfg, double tau);

AttractionRegion attraction_region_bound(const GuidanceConfig& cfg, double sup_disturbance,
                                         double epsilon_target);

/// Shrinks k_q geometrically from cfg.k_q until the compensation box admits a feasible
/// compensation or k_q drops to cfg.k_q_floor.
KqSearchResult decremental_kq_search(const LookaheadGeometry& geom, const UavState& state,
                                     const GuidanceConfig& cfg, const LosRates& c_dots);

}  // namespace rllp
