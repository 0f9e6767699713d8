#pragma once

// 3-DOF point-mass UAV model driven by lateral / normal-plane acceleration
// commands, with additive angular-rate disturbances on chi and gamma.

#include <cstdint>
#include <random>

#include "rllp/types.hpp"

namespace rllp::kinematics {

using Rng = std::mt19937_64;

inline constexpr int kDefaultSubsteps = 5;
inline constexpr double kMinCosGamma = 1e-6;

struct StateRate {
    double x_dot = 0.0;
    double y_dot = 0.0;
    double z_dot = 0.0;
    double chi_dot = 0.0;
    double gamma_dot = 0.0;
};

/// Right-hand side of the perturbed equations of motion.
/// Throws Error(DegenerateGamma) when |cos gamma| < 1e-6.
StateRate derivative(const UavState& state, const AccelCommand& cmd, const DisturbanceSample& dist);

/// Advances `state` by `dt` with `cmd` and `dist` held constant, using classical RK4
/// over `substeps` equal substeps. chi is re-wrapped to (-pi, pi].
UavState step(const UavState& state, const AccelCommand& cmd, const DisturbanceSample& dist,
              double dt, int substeps = kDefaultSubsteps);

struct AttitudeLimits {
    double a_bzc_min = 0.0;
    double a_bzc_max = 30.0;
    double phi_c_min = -kPi;
    double phi_c_max = kPi;
};

/// Inverts a_zc = a_bzc sin(phi_c), a_yc = a_bzc cos(phi_c).
AttitudeCommand command_to_attitude(const AccelCommand& cmd, const AttitudeLimits& limits = {});
AccelCommand attitude_to_command(const AttitudeCommand& att);

enum class DisturbanceMode {
    /// Each axis uniform on [-L_d/sqrt2, +L_d/sqrt2]; the joint bound holds by construction.
    Box,
    /// Each axis uniform with standard deviation L_d/sqrt2, then radially projected onto
    /// the disk of radius L_d when it falls outside.
    StdMatched,
};

/// Uniform double on [0, 1) from the top 53 bits of one draw. Portable across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

DisturbanceSample sample_disturbance(Rng& rng, double L_d, DisturbanceMode mode = DisturbanceMode::Box);

}  // namespace rllp::kinematics
