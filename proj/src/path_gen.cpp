#include "rllp/path_gen.hpp"

#include <cmath>
#include <string>

#include "rllp/error.hpp"
#include "rllp/kinematics.hpp"

namespace rllp {

namespace {

void check(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

WaypointPath generate_synthetic_path(const SyntheticPathOptions& o) {
    check(o.segments >= 1, "segments must be >= 1");
    check(o.leg_min > 0.0 && o.leg_max >= o.leg_min, "need 0 < leg_min <= leg_max");
    check(o.turn_min >= 0.0 && o.turn_max >= o.turn_min && o.turn_max <= kPi / 2.0,
          "need 0 <= turn_min <= turn_max <= pi/2");
    check(o.climb_max >= 0.0 && o.climb_max < kPi / 4.0, "climb_max must be in [0, pi/4)");
    check(o.spacing > 0.0, "spacing must be > 0");

    kinematics::Rng rng(o.seed);
    auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * kinematics::uniform01(rng); };

    std::vector<Vec3> points{o.start};
    double heading = 0.0;
    double climb = 0.0;
    double turn_sign = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    Vec3 corner = o.start;
    for (int seg = 0; seg < o.segments; ++seg) {
        if (seg > 0) {
            heading = wrap_angle(heading + turn_sign * uniform(o.turn_min, o.turn_max));
            turn_sign = -turn_sign;
        }
        // Legs come in pairs: a climb (or glide) followed by its mirror image.
        if (seg % 2 == 0) {
            climb = uniform(-o.climb_max, o.climb_max);
        } else {
            climb = -climb;
        }
        const double length = uniform(o.leg_min, o.leg_max);
        const Vec3 dir{std::cos(climb) * std::cos(heading), std::cos(climb) * std::sin(heading),
                       std::sin(climb)};
        const auto pieces = static_cast<int>(std::ceil(length / o.spacing));
        for (int k = 1; k <= pieces; ++k) {
            points.push_back(corner + (length * k / pieces) * dir);
        }
        corner = points.back();
    }
    return WaypointPath(std::move(points));
}

}  // namespace rllp
