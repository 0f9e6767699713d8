#pragma once

#include <cmath>
#include <numbers>

namespace rllp {

inline constexpr double kGravity = 9.81;  // m/s^2
inline constexpr double kPi = std::numbers::pi;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

/// Point-mass UAV state. chi is the track angle, gamma the flight-path angle.
struct UavState {
    double x_p = 0.0;  // m
    double y_p = 0.0;  // m
    double z_p = 0.0;  // m
    double chi = 0.0;    // rad, (-pi, pi]
    double gamma = 0.0;  // rad, |gamma| < pi/2
    double v_g = 25.0;   // m/s, > 0

    Vec3 position() const { return {x_p, y_p, z_p}; }
    /// Unit velocity direction.
    Vec3 heading() const {
        return {std::cos(gamma) * std::cos(chi), std::cos(gamma) * std::sin(chi), std::sin(gamma)};
    }
};

/// Lateral / normal-plane acceleration commands, m/s^2.
struct AccelCommand {
    double a_yc = 0.0;
    double a_zc = 0.0;
};

struct AttitudeCommand {
    double a_bzc = 0.0;  // m/s^2
    double phi_c = 0.0;  // rad
};

/// Angular-rate disturbance on chi and gamma, rad/s.
struct DisturbanceSample {
    double d_chi = 0.0;
    double d_gamma = 0.0;
};

}  // namespace rllp
