#include "rllp/kinematics.hpp"

#include <cmath>
#include <sstream>

#include "rllp/error.hpp"

namespace rllp::kinematics {

StateRate derivative(const UavState& s, const AccelCommand& cmd, const DisturbanceSample& dist) {
    const double cg = std::cos(s.gamma);
    if (std::abs(cg) < kMinCosGamma) {
        std::ostringstream os;
        os << "cos(gamma) vanishes at gamma=" << s.gamma;
        throw Error(ErrorCode::DegenerateGamma, os.str());
    }
    StateRate r;
    r.x_dot = s.v_g * cg * std::cos(s.chi);
    r.y_dot = s.v_g * cg * std::sin(s.chi);
    r.z_dot = s.v_g * std::sin(s.gamma);
    r.chi_dot = cmd.a_yc / (s.v_g * cg) + dist.d_chi;
    r.gamma_dot = (cmd.a_zc - kGravity * cg) / s.v_g + dist.d_gamma;
    return r;
}

namespace {

UavState advance(const UavState& s, const StateRate& r, double h) {
    UavState out = s;
    out.x_p += h * r.x_dot;
    out.y_p += h * r.y_dot;
    out.z_p += h * r.z_dot;
    out.chi += h * r.chi_dot;  // unwrapped inside the integrator
    out.gamma += h * r.gamma_dot;
    return out;
}

}  // namespace

UavState step(const UavState& state, const AccelCommand& cmd, const DisturbanceSample& dist,
              double dt, int substeps) {
    if (!(dt > 0.0) || substeps < 1) {
        throw Error(ErrorCode::InvalidArgument, "step requires dt > 0 and substeps >= 1");
    }
    const double h = dt / substeps;
    UavState s = state;
    for (int i = 0; i < substeps; ++i) {
        const StateRate k1 = derivative(s, cmd, dist);
        const StateRate k2 = derivative(advance(s, k1, 0.5 * h), cmd, dist);
        const StateRate k3 = derivative(advance(s, k2, 0.5 * h), cmd, dist);
        const StateRate k4 = derivative(advance(s, k3, h), cmd, dist);
        const double w = h / 6.0;
        s.x_p += w * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot);
        s.y_p += w * (k1.y_dot + 2.0 * k2.y_dot + 2.0 * k3.y_dot + k4.y_dot);
        s.z_p += w * (k1.z_dot + 2.0 * k2.z_dot + 2.0 * k3.z_dot + k4.z_dot);
        s.chi += w * (k1.chi_dot + 2.0 * k2.chi_dot + 2.0 * k3.chi_dot + k4.chi_dot);
        s.gamma += w * (k1.gamma_dot + 2.0 * k2.gamma_dot + 2.0 * k3.gamma_dot + k4.gamma_dot);
    }
    if (std::abs(std::cos(s.gamma)) < kMinCosGamma) {
        throw Error(ErrorCode::DegenerateGamma, "step ended in vertical flight");
    }
    s.chi = wrap_angle(s.chi);
    return s;
}

AttitudeCommand command_to_attitude(const AccelCommand& cmd, const AttitudeLimits& limits) {
    if (cmd.a_yc == 0.0 && cmd.a_zc == 0.0) {
        throw Error(ErrorCode::ZeroCommand, "bank angle undefined for a zero command");
    }
    AttitudeCommand att{std::hypot(cmd.a_yc, cmd.a_zc), std::atan2(cmd.a_zc, cmd.a_yc)};
    if (att.a_bzc < limits.a_bzc_min || att.a_bzc > limits.a_bzc_max ||
        att.phi_c < limits.phi_c_min || att.phi_c > limits.phi_c_max) {
        std::ostringstream os;
        os << "a_bzc=" << att.a_bzc << " phi_c=" << att.phi_c << " outside configured limits";
        throw Error(ErrorCode::AttitudeOutOfRange, os.str());
    }
    return att;
}

AccelCommand attitude_to_command(const AttitudeCommand& att) {
    return {att.a_bzc * std::cos(att.phi_c), att.a_bzc * std::sin(att.phi_c)};
}

DisturbanceSample sample_disturbance(Rng& rng, double L_d, DisturbanceMode mode) {
    if (!(L_d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "L_d must be >= 0");
    // Both draws are taken even when L_d == 0 so the stream position is independent of L_d.
    const double u1 = 2.0 * uniform01(rng) - 1.0;
    const double u2 = 2.0 * uniform01(rng) - 1.0;
    if (mode == DisturbanceMode::Box) {
        const double half = L_d / std::sqrt(2.0);
        return {half * u1, half * u2};
    }
    const double half = std::sqrt(3.0) * L_d / std::sqrt(2.0);
    DisturbanceSample d{half * u1, half * u2};
    const double r = std::hypot(d.d_chi, d.d_gamma);
    if (r > L_d) {
        d.d_chi *= L_d / r;
        d.d_gamma *= L_d / r;
    }
    return d;
}

}  // namespace rllp::kinematics
