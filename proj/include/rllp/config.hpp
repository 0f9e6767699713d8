#pragma once

#include "rllp/types.hpp"

namespace rllp {

/// Tunables of the look-ahead pursuit law, its compensation layer and the per-tick QP.
/// Immutable once validated; share freely between threads.
struct GuidanceConfig {
    double k_q = 1.0;           // 1/s, pursuit gain
    double delta = kPi / 3.0;   // rad, look-ahead angle cap, 0 < delta < pi/2
    double L_d = 0.0;           // rad/s, assumed disturbance bound
    double tau_hat = 1.0;       // settling-rate estimate used when selecting targets
    double q_L = 2.0;           // s, look-ahead distance = q_L * V_g

    double a_yc_min = -25.0;    // m/s^2
    double a_yc_max = 25.0;
    double a_zc_min = -14.12;
    double a_zc_max = 14.12;

    double u_dot_min = -40.0;   // m/s^3, command rate limits (QP rate rows)
    double u_dot_max = 40.0;
    double epsilon = 0.1;       // disturbance-rejection margin in k1 + k2 >= (1 + eps) L_d
    double r_weight = 0.1;      // R = r_weight * I

    double k_q_floor = 0.2;     // decremental k_q search
    double k_q_decay = 0.8;

    double k1 = 0.52;           // fixed compensation gains
    double k2 = 0.52;

    double capture_radius = 2.0;  // m, final-waypoint capture

    /// Throws Error(Config) naming the first violated invariant.
    void validate() const;
};

}  // namespace rllp
