#pragma once

// Synthetic non-smooth reference paths: piecewise-linear 3D polylines with sharp
// corners and alternating climb / glide legs.

#include <cstdint>

#include "rllp/path.hpp"

namespace rllp {

struct SyntheticPathOptions {
    std::uint64_t seed = 2024;
    int segments = 20;
    double leg_min = 400.0;  // m
    double leg_max = 600.0;  // m
    double turn_min = 0.1;   // rad, magnitude of the heading change at a corner
    double turn_max = 0.5;   // rad, at most pi/2
    double climb_max = 0.12; // rad, flight-path angle magnitude of a climb or glide leg
    double spacing = 250.0;  // m between resampled waypoints along a leg
    Vec3 start{0.0, 0.0, 100.0};
};

/// Throws Error(InvalidArgument) for out-of-range options. Turn directions alternate, and
/// every climb leg is followed by a glide leg of the same angle, so the path neither
/// spirals nor drifts in altitude. Deterministic in the seed.
WaypointPath generate_synthetic_path(const SyntheticPathOptions& options = {});

}  // namespace rllp
