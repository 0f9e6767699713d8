#pragma once

// Closed-loop scenario runner: target selection, LOS differentiation, one of three
// controller variants, RK4 propagation, and run metrics.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rllp/config.hpp"
#include "rllp/kinematics.hpp"
#include "rllp/path.hpp"
#include "rllp/types.hpp"

namespace rllp::sim {

enum class Controller {
    Rllp,           // base pursuit law only
    RllpFixedComp,  // typical compensation with fixed gains k1, k2
    RllpOptimal,    // gains from the per-tick QP, with fallbacks
};

std::string_view to_string(Controller c);
std::optional<Controller> parse_controller(std::string_view name);

/// Where the compensation gains of a tick came from (logged as `qp_status`).
enum class GainSource {
    None,           // variant without QP
    Qp,             // QP optimal at the configured k_q
    QpReducedKq,    // QP optimal after the decremental k_q search
    FallbackFixed,  // QP unusable; fixed gains max(k_i, (1 + eps) L_d / 2)
    FallbackNone,   // no usable compensation axis; base law only
};

std::string_view to_string(GainSource s);

struct Scenario {
    explicit Scenario(WaypointPath p) : path(std::move(p)) {}

    WaypointPath path;
    GuidanceConfig cfg;
    Controller controller = Controller::Rllp;
    double L_d = 0.0;  // rad/s; drives the injected disturbance and the controller's bound
    std::uint64_t seed = 1;
    double dt = 0.1;
    int disturbance_hold = 5;  // ticks per disturbance sample
    double duration = 600.0;
    UavState initial_state;
    kinematics::DisturbanceMode disturbance_mode = kinematics::DisturbanceMode::Box;

    /// Throws Error(Config).
    void validate() const;
};

/// State at the first waypoint, heading toward the second.
UavState state_at_path_start(const WaypointPath& path, double v_g);

struct TickRecord {
    double t = 0.0;
    UavState state;
    TargetSelection target;
    double eta_lat = 0.0;
    double eta_lon = 0.0;
    AccelCommand command;
    double e_d = 0.0;  // distance to the virtual target
    double k1 = 0.0;
    double k2 = 0.0;
    double k_q = 0.0;  // gain actually used this tick
    GainSource gain_source = GainSource::None;
    bool clipped = false;
    DisturbanceSample disturbance;
};

struct SeriesStats {
    double mean = 0.0;
    double std = 0.0;  // population
    double min = 0.0;
    double max = 0.0;
};

struct RunMetrics {
    SeriesStats eta_lon;
    SeriesStats eta_lat;
    SeriesStats a_yc;
    SeriesStats a_zc;
    /// Median over target legs of the time for e_d to fall below 5% of its value at the
    /// start of the leg. A leg that switches target first counts as infinite.
    double ed_convergence_median = 0.0;
    std::size_t legs = 0;
    std::size_t converged_legs = 0;
    std::size_t ticks = 0;
};

enum class Termination { Duration, PathComplete };

struct RunResult {
    std::vector<TickRecord> records;
    RunMetrics metrics;
    Termination termination = Termination::Duration;
};

/// Deterministic given the scenario. Throws Error(DegenerateGamma) when the UAV is driven
/// into vertical flight.
RunResult run(const Scenario& scenario);

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

/// Throws Error(EmptyRun) when no record falls in the window.
RunMetrics compute_metrics(std::span<const TickRecord> records,
                           std::optional<TimeWindow> window = std::nullopt);

struct FixedTargetRun {
    UavState initial_state;
    Vec3 target;
    GuidanceConfig cfg;
    double dt = 0.1;
    double duration = 60.0;
    double stop_radius = 1.0;  // stop once the range drops below this
};

/// Base-law pursuit of a stationary point without disturbance. One record per tick; the
/// last record is the first one inside stop_radius, if reached.
std::vector<TickRecord> pursue_fixed_target(const FixedTargetRun& run);

}  // namespace rllp::sim
