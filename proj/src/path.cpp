#include "rllp/path.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rllp/error.hpp"
#include "rllp/guidance.hpp"

namespace rllp {

namespace {

constexpr double kMinSegment = 1e-9;
constexpr double kMinLos = 1e-9;

}  // namespace

WaypointPath::WaypointPath(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw Error(ErrorCode::InvalidPath, "a path needs at least two waypoints");
    arclength_.reserve(points_.size());
    xs_.reserve(points_.size());
    ys_.reserve(points_.size());
    zs_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const Vec3& p = points_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw Error(ErrorCode::InvalidPath, "non-finite coordinate at waypoint " + std::to_string(i));
        }
        if (i == 0) {
            arclength_.push_back(0.0);
        } else {
            const double seg = distance(points_[i - 1], p);
            if (seg <= kMinSegment) {
                throw Error(ErrorCode::InvalidPath,
                            "waypoints " + std::to_string(i - 1) + " and " + std::to_string(i) + " coincide");
            }
            arclength_.push_back(arclength_.back() + seg);
        }
        xs_.push_back(p.x);
        ys_.push_back(p.y);
        zs_.push_back(p.z);
    }
}

WaypointPath WaypointPath::parse_csv(std::istream& in) {
    std::vector<Vec3> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        for (char& c : line) {
            if (c == ',') c = ' ';
        }
        std::istringstream fields(line);
        std::string tok[3];
        std::string extra;
        if (!(fields >> tok[0] >> tok[1] >> tok[2]) || (fields >> extra)) {
            throw Error(ErrorCode::InvalidPath, "line " + std::to_string(lineno) + ": expected x,y,z");
        }
        double v[3];
        for (int k = 0; k < 3; ++k) {
            try {
                std::size_t used = 0;
                v[k] = std::stod(tok[k], &used);
                if (used != tok[k].size()) throw std::invalid_argument(tok[k]);
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidPath,
                            "line " + std::to_string(lineno) + ": bad number '" + tok[k] + "'");
            }
        }
        pts.push_back({v[0], v[1], v[2]});
    }
    return WaypointPath(std::move(pts));
}

WaypointPath WaypointPath::load_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::InvalidPath, "cannot open path file " + file.string());
    return parse_csv(in);
}

void WaypointPath::write_csv(std::ostream& out) const {
    out << "# x,y,z [m]\n";
    out << std::setprecision(9);
    for (const Vec3& p : points_) out << p.x << ',' << p.y << ',' << p.z << '\n';
}

kernels::PointsView WaypointPath::view_from(std::size_t first) const {
    if (first >= points_.size()) return {};
    return {xs_.data() + first, ys_.data() + first, zs_.data() + first, points_.size() - first};
}

std::optional<ThetaCosines> theta_cosines(double eta_lat, double eta_lon) {
    const double p_lat = std::sin(eta_lat) * std::cos(eta_lat);
    const double p_lon = std::sin(eta_lon) * std::cos(eta_lon);
    const double denom = std::hypot(p_lat, p_lon);
    if (denom < 1e-9) return std::nullopt;
    return ThetaCosines{p_lat / denom, p_lon / denom};
}

LookaheadGeometry compute_geometry(const UavState& state, Vec3 target) {
    const double dx = target.x - state.x_p;
    const double dy = target.y - state.y_p;
    const double dz = target.z - state.z_p;
    const double horizontal = std::hypot(dx, dy);
    if (std::hypot(horizontal, dz) <= kMinLos) {
        throw Error(ErrorCode::DegenerateLos, "UAV sits on the target");
    }
    if (horizontal <= kMinLos) throw Error(ErrorCode::DegenerateLos, "LOS is vertical");
    LookaheadGeometry g;
    g.c1 = std::atan2(dy, dx);
    g.c2 = std::atan2(dz, horizontal);
    g.eta_lat = wrap_angle(g.c1 - state.chi);
    g.eta_lon = wrap_angle(g.c2 - state.gamma);
    if (const auto tc = theta_cosines(g.eta_lat, g.eta_lon)) {
        g.sin_theta = tc->sin_theta;
        g.cos_theta = tc->cos_theta;
        g.theta_defined = true;
    }
    return g;
}

bool is_ahead(const UavState& state, Vec3 point) {
    return dot(point - state.position(), state.heading()) > 0.0;
}

namespace {

void check_exhausted(const UavState& state, const WaypointPath& path, std::size_t prev_index,
                     double capture_radius) {
    if (prev_index >= path.size()) {
        throw Error(ErrorCode::InvalidArgument, "previous target index outside the path");
    }
    if (prev_index + 1 == path.size() && distance(state.position(), path[prev_index]) <= capture_radius) {
        throw Error(ErrorCode::PathExhausted, "final waypoint captured");
    }
}

struct Scan {
    std::vector<double> range;
    std::vector<double> along;
};

Scan scan_from(const UavState& state, const WaypointPath& path, std::size_t first) {
    const kernels::PointsView view = path.view_from(first);
    Scan s{std::vector<double>(view.size), std::vector<double>(view.size)};
    kernels::range_and_along(view, state.position(), state.heading(), s.range, s.along);
    return s;
}

TargetSelection lookahead_match(const UavState& state, const WaypointPath& path, double q_L,
                                std::size_t prev_index, const Scan& scan) {
    const double wanted = q_L * state.v_g;
    std::optional<std::size_t> best;
    double best_err = 0.0;
    for (std::size_t j = 0; j < scan.range.size(); ++j) {
        if (!(scan.along[j] > 0.0)) continue;
        const double err = std::abs(wanted - scan.range[j]);
        if (!best || err < best_err) {
            best = j;
            best_err = err;
        }
    }
    TargetSelection sel;
    if (!best) {
        sel.index = path.size() - 1;
        sel.point = path[sel.index];
        sel.feasible = false;
        sel.source = SelectionSource::NoneAhead;
        return sel;
    }
    sel.index = prev_index + *best;
    sel.point = path[sel.index];
    sel.feasible = true;
    sel.source = SelectionSource::Lookahead;
    return sel;
}

}  // namespace

TargetSelection select_target_basic(const UavState& state, const WaypointPath& path, double q_L,
                                    std::size_t prev_index, double capture_radius) {
    check_exhausted(state, path, prev_index, capture_radius);
    return lookahead_match(state, path, q_L, prev_index, scan_from(state, path, prev_index));
}

TargetSelection select_target_constrained(const UavState& state, const WaypointPath& path,
                                          const GuidanceConfig& cfg, std::size_t prev_index) {
    check_exhausted(state, path, prev_index, cfg.capture_radius);
    const Scan scan = scan_from(state, path, prev_index);
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < scan.range.size(); ++j) {
        if (!(scan.along[j] > 0.0)) continue;
        if (best && !(scan.range[j] < scan.range[*best])) continue;
        const Vec3& p = path[prev_index + j];
        const double dx = p.x - state.x_p;
        const double dy = p.y - state.y_p;
        const double horizontal = std::hypot(dx, dy);
        if (horizontal <= kMinLos) continue;
        const double eta_lat = wrap_angle(std::atan2(dy, dx) - state.chi);
        const double eta_lon = wrap_angle(std::atan2(p.z - state.z_p, horizontal) - state.gamma);
        if (std::abs(eta_lat) > cfg.delta || std::abs(eta_lon) > cfg.delta) continue;
        const double t_reach = finite_time_bound(eta_lat, eta_lon, cfg.k_q, cfg.delta, cfg.tau_hat);
        if (scan.range[j] < state.v_g * t_reach) continue;
        best = j;
    }
    if (!best) {
        TargetSelection sel = lookahead_match(state, path, cfg.q_L, prev_index, scan);
        sel.feasible = false;
        return sel;
    }
    TargetSelection sel;
    sel.index = prev_index + *best;
    sel.point = path[sel.index];
    sel.feasible = true;
    sel.source = SelectionSource::Constrained;
    return sel;
}

LosRates finite_difference_los(const LookaheadGeometry& current, std::size_t current_index,
                               const LookaheadGeometry& previous, std::size_t previous_index,
                               double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    if (current_index != previous_index) {
        throw Error(ErrorCode::TargetSwitched, "LOS difference across a target switch");
    }
    return {wrap_angle(current.c1 - previous.c1) / dt, wrap_angle(current.c2 - previous.c2) / dt};
}

LosRates LosDifferentiator::update(const LookaheadGeometry& geom, std::size_t target_index, double dt) {
    LosRates rates;
    if (previous_ && previous_->index == target_index) {
        rates = finite_difference_los(geom, target_index, previous_->geom, previous_->index, dt);
    }
    previous_ = Sample{geom, target_index};
    return rates;
}

}  // namespace rllp
