#include "rllp/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rllp/error.hpp"

namespace rllp {

void GuidanceConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::Config, what); };
    if (!(k_q > 0.0)) fail("k_q must be > 0");
    if (!(delta > 0.0 && delta < kPi / 2.0)) fail("delta must lie in (0, pi/2)");
    if (!(L_d >= 0.0)) fail("L_d must be >= 0");
    if (!(tau_hat >= 0.5 && tau_hat <= 2.0)) fail("tau_hat must lie in [0.5, 2]");
    if (!(q_L > 0.0)) fail("q_L must be > 0");
    if (!(a_yc_min < a_yc_max)) fail("a_yc_min must be < a_yc_max");
    if (!(a_zc_min < a_zc_max)) fail("a_zc_min must be < a_zc_max");
    if (!(u_dot_min < u_dot_max)) fail("u_dot_min must be < u_dot_max");
    if (!(epsilon > 0.0)) fail("epsilon must be > 0");
    if (!(r_weight > 0.0)) fail("r_weight must be > 0");
    if (!(k_q_floor > 0.0)) fail("k_q_floor must be > 0");
    if (!(k_q_decay > 0.0 && k_q_decay < 1.0)) fail("k_q_decay must lie in (0, 1)");
    if (!(k1 >= 0.0 && k2 >= 0.0)) fail("fixed gains k1, k2 must be >= 0");
    if (!(capture_radius > 0.0)) fail("capture_radius must be > 0");
}

AccelCommand saturate(const AccelCommand& cmd, const GuidanceConfig& cfg) {
    return {std::clamp(cmd.a_yc, cfg.a_yc_min, cfg.a_yc_max),
            std::clamp(cmd.a_zc, cfg.a_zc_min, cfg.a_zc_max)};
}

AccelCommand base_law(const LookaheadGeometry& geom, const UavState& state, const GuidanceConfig& cfg) {
    const double eta_lat = std::clamp(geom.eta_lat, -cfg.delta, cfg.delta);
    const double eta_lon = std::clamp(geom.eta_lon, -cfg.delta, cfg.delta);
    const double cg = std::cos(state.gamma);
    const AccelCommand raw{cfg.k_q * state.v_g * std::sin(eta_lat) * cg,
                           cfg.k_q * state.v_g * std::sin(eta_lon) + kGravity * cg};
    return saturate(raw, cfg);
}

AxisCompensation typical_compensation(const LookaheadGeometry& geom, const CompensationGains& gains) {
    AxisCompensation out;
    const bool chi_ok = geom.theta_defined && std::abs(geom.sin_theta) >= kThetaGuard;
    const bool gamma_ok = geom.theta_defined && std::abs(geom.cos_theta) >= kThetaGuard;
    out.singular_chi = !chi_ok;
    out.singular_gamma = !gamma_ok;
    if (chi_ok) out.f_chi = -gains.k1 / geom.sin_theta;
    if (gamma_ok) out.f_gamma = -gains.k2 / geom.cos_theta;
    return out;
}

namespace {

struct LawBounds {
    double f_lat_min, f_lat_max, f_lon_min, f_lon_max;
};

// Bounds are taken relative to the (saturated) base command. For an unsaturated base this
// is a_min / (V cos gamma) - k_q sin(eta_lat), and likewise for the normal plane.
LawBounds law_bounds(const AccelCommand& base, const UavState& state, const GuidanceConfig& cfg) {
    const double lat_scale = state.v_g * std::cos(state.gamma);
    return {(cfg.a_yc_min - base.a_yc) / lat_scale, (cfg.a_yc_max - base.a_yc) / lat_scale,
            (cfg.a_zc_min - base.a_zc) / state.v_g, (cfg.a_zc_max - base.a_zc) / state.v_g};
}

}  // namespace

CompensationBox compensation_box(const LookaheadGeometry& geom, const UavState& state,
                                 const GuidanceConfig& cfg, const LosRates& c_dots) {
    const LawBounds lb = law_bounds(base_law(geom, state, cfg), state, cfg);
    return {c_dots.c1_dot - lb.f_lat_max, c_dots.c1_dot - lb.f_lat_min,
            c_dots.c2_dot - lb.f_lon_max, c_dots.c2_dot - lb.f_lon_min};
}

Feasibility check_feasibility(const LookaheadGeometry& geom, const CompensationBox& box, double L_d) {
    if (!geom.theta_defined) throw Error(ErrorCode::SingularTheta, "theta undefined at zero look-ahead");
    Feasibility f;
    f.f_chi_opt = geom.sin_theta >= 0.0 ? box.f_chi_min : box.f_chi_max;
    f.f_gamma_opt = geom.cos_theta >= 0.0 ? box.f_gamma_min : box.f_gamma_max;
    const double value = f.f_chi_opt * geom.sin_theta + f.f_gamma_opt * geom.cos_theta;
    f.tau_star = -(value + L_d);
    f.feasible = value + L_d <= -1e-12;
    return f;
}

AssembledCommand clip_and_assemble(const AccelCommand& base, double f_chi, double f_gamma,
                                   const LosRates& c_dots, const UavState& state,
                                   const LookaheadGeometry& /*geom*/, const GuidanceConfig& cfg) {
    const LawBounds lb = law_bounds(base, state, cfg);
    AssembledCommand out;
    CompensationTerms& t = out.terms;
    t.f_chi = f_chi;
    t.f_gamma = f_gamma;
    const double f_lat = c_dots.c1_dot - f_chi;
    const double f_lon = c_dots.c2_dot - f_gamma;
    t.f_lat = std::clamp(f_lat, lb.f_lat_min, lb.f_lat_max);
    t.f_lon = std::clamp(f_lon, lb.f_lon_min, lb.f_lon_max);
    t.clipped = t.f_lat != f_lat || t.f_lon != f_lon;
    const AccelCommand raw{base.a_yc + state.v_g * std::cos(state.gamma) * t.f_lat,
                           base.a_zc + state.v_g * t.f_lon};
    // Rounding can leave the sum a few ulps outside the box.
    out.command = saturate(raw, cfg);
    return out;
}

double finite_time_bound(double eta_lat, double eta_lon, double k_q, double delta, double tau) {
    if (!(tau > 0.0)) {
        std::ostringstream os;
        os << "tau=" << tau;
        throw Error(ErrorCode::NonPositiveTau, os.str());
    }
    const double s = std::hypot(std::sin(eta_lon), std::sin(eta_lat));
    return std::log1p(k_q / tau * s) / (k_q * std::cos(delta));
}

double settling_time_bound(const LookaheadGeometry& geom, const GuidanceConfig& cfg, double tau) {
    return finite_time_bound(geom.eta_lat, geom.eta_lon, cfg.k_q, cfg.delta, tau);
}

AttractionRegion attraction_region_bound(const GuidanceConfig& cfg, double sup_disturbance,
                                         double epsilon_target) {
    if (!(epsilon_target > 0.0) || !(sup_disturbance >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "need sup_disturbance >= 0 and epsilon_target > 0");
    }
    const double gain = cfg.k_q * std::cos(cfg.delta);
    const double pi4 = kPi * kPi * kPi * kPi;
    return {(kPi / 2.0) * std::sqrt(sup_disturbance / gain),
            16.0 * epsilon_target * epsilon_target * gain / pi4};
}

KqSearchResult decremental_kq_search(const LookaheadGeometry& geom, const UavState& state,
                                     const GuidanceConfig& cfg, const LosRates& c_dots) {
    if (!(cfg.k_q_floor > 0.0) || !(cfg.k_q_decay > 0.0 && cfg.k_q_decay < 1.0)) {
        throw Error(ErrorCode::Config, "decremental search needs k_q_floor > 0 and 0 < k_q_decay < 1");
    }
    KqSearchResult r;
    GuidanceConfig trial = cfg;
    for (;;) {
        r.feasibility = check_feasibility(geom, compensation_box(geom, state, trial, c_dots), cfg.L_d);
        if (r.feasibility.feasible) {
            r.k_q = trial.k_q;
            r.feasible = true;
            return r;
        }
        trial.k_q *= cfg.k_q_decay;
        ++r.steps;
        if (trial.k_q <= cfg.k_q_floor) {
            r.k_q = cfg.k_q_floor;
            r.feasible = false;
            return r;
        }
    }
}

}  // namespace rllp
