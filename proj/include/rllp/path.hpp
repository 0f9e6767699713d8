#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rllp/config.hpp"
#include "rllp/kernels.hpp"
#include "rllp/types.hpp"

namespace rllp {

/// Ordered 3D polyline of reference waypoints with a cumulative arc-length index.
class WaypointPath {
public:
    /// Throws Error(InvalidPath) for fewer than two points, non-finite coordinates or
    /// consecutive points closer than 1e-9 m.
    explicit WaypointPath(std::vector<Vec3> points);

    /// CSV: one `x,y,z` per line in meters; `#` starts a comment; blank lines ignored.
    static WaypointPath parse_csv(std::istream& in);
    static WaypointPath load_csv(const std::filesystem::path& file);
    void write_csv(std::ostream& out) const;

    std::size_t size() const { return points_.size(); }
    const Vec3& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Vec3>& points() const { return points_; }
    const std::vector<double>& cumulative_arclength() const { return arclength_; }
    double length() const { return arclength_.back(); }

    /// SoA view of points [first, size()).
    kernels::PointsView view_from(std::size_t first) const;

private:
    std::vector<Vec3> points_;
    std::vector<double> arclength_;
    std::vector<double> xs_, ys_, zs_;
};

enum class SelectionSource {
    Constrained,  // closest point of the admissible target set
    Lookahead,    // look-ahead distance match among points ahead
    NoneAhead,    // nothing ahead of the UAV; final waypoint returned
};

struct TargetSelection {
    Vec3 point;
    std::size_t index = 0;
    bool feasible = false;
    SelectionSource source = SelectionSource::NoneAhead;
};

/// Look-ahead angles, LOS bearings and the direction cosines of the compensation
/// constraint normal.
struct LookaheadGeometry {
    double eta_lat = 0.0;
    double eta_lon = 0.0;
    double c1 = 0.0;  // LOS azimuth
    double c2 = 0.0;  // LOS elevation
    double sin_theta = 0.0;
    double cos_theta = 0.0;
    bool theta_defined = false;
};

/// Throws Error(DegenerateLos) when the target coincides with the UAV or lies straight
/// above / below it.
LookaheadGeometry compute_geometry(const UavState& state, Vec3 target);

/// Direction cosines of the constraint normal for given look-ahead angles; nullopt when
/// the shared denominator is below 1e-9.
struct ThetaCosines {
    double sin_theta;
    double cos_theta;
};
std::optional<ThetaCosines> theta_cosines(double eta_lat, double eta_lon);

/// A point is ahead when the LOS to it has a positive component along the velocity.
bool is_ahead(const UavState& state, Vec3 point);

/// Point with index >= prev_index, ahead of the UAV, whose range best matches q_L * V_g.
/// Ties go to the lower index. With nothing ahead, returns the final waypoint with
/// feasible=false. Throws Error(PathExhausted) once the final waypoint is the previous
/// target and lies within `capture_radius`.
TargetSelection select_target_basic(const UavState& state, const WaypointPath& path, double q_L,
                                    std::size_t prev_index, double capture_radius = 2.0);

/// Closest point with index >= prev_index that is ahead, has both look-ahead angles within
/// delta, and is at least V_g * T away, T being the finite-time bound evaluated with tau_hat.
/// Falls back to select_target_basic (feasible=false) when no point qualifies.
TargetSelection select_target_constrained(const UavState& state, const WaypointPath& path,
                                          const GuidanceConfig& cfg, std::size_t prev_index);

struct LosRates {
    double c1_dot = 0.0;
    double c2_dot = 0.0;
};

/// Backward difference of the LOS bearings on the circle. Both geometries must belong to
/// the same target; otherwise throws Error(TargetSwitched).
LosRates finite_difference_los(const LookaheadGeometry& current, std::size_t current_index,
                               const LookaheadGeometry& previous, std::size_t previous_index,
                               double dt);

/// Stateful wrapper owned by one control loop: returns (0, 0) on the first tick and after
/// every target switch.
class LosDifferentiator {
public:
    LosRates update(const LookaheadGeometry& geom, std::size_t target_index, double dt);
    void reset() { previous_.reset(); }

private:
    struct Sample {
        LookaheadGeometry geom;
        std::size_t index;
    };
    std::optional<Sample> previous_;
};

}  // namespace rllp
