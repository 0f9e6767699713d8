#include "rllp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rllp/error.hpp"
#include "rllp/guidance.hpp"
#include "rllp/kernels.hpp"
#include "rllp/qp.hpp"

namespace rllp::sim {

std::string_view to_string(Controller c) {
    switch (c) {
        case Controller::Rllp: return "rllp";
        case Controller::RllpFixedComp: return "rllp_fixed_comp";
        case Controller::RllpOptimal: return "rllp_optimal";
    }
    return "unknown";
}

std::optional<Controller> parse_controller(std::string_view name) {
    for (Controller c : {Controller::Rllp, Controller::RllpFixedComp, Controller::RllpOptimal}) {
        if (name == to_string(c)) return c;
    }
    return std::nullopt;
}

std::string_view to_string(GainSource s) {
    switch (s) {
        case GainSource::None: return "none";
        case GainSource::Qp: return "optimal";
        case GainSource::QpReducedKq: return "kq_reduced";
        case GainSource::FallbackFixed: return "fallback_fixed";
        case GainSource::FallbackNone: return "fallback_none";
    }
    return "unknown";
}

void Scenario::validate() const {
    cfg.validate();
    auto fail = [](const std::string& what) { throw Error(ErrorCode::Config, what); };
    if (!(dt > 0.0)) fail("dt must be > 0");
    if (!(duration > 0.0)) fail("duration must be > 0");
    if (disturbance_hold < 1) fail("disturbance_hold must be >= 1");
    if (!(L_d >= 0.0)) fail("L_d must be >= 0");
    if (!(initial_state.v_g > 0.0)) fail("v_g must be > 0");
    if (!(std::abs(initial_state.gamma) < kPi / 2.0 - 1e-6)) fail("initial gamma must satisfy |gamma| < pi/2");
}

UavState state_at_path_start(const WaypointPath& path, double v_g) {
    const Vec3 d = path[1] - path[0];
    UavState s;
    s.x_p = path[0].x;
    s.y_p = path[0].y;
    s.z_p = path[0].z;
    s.chi = std::atan2(d.y, d.x);
    s.gamma = std::atan2(d.z, std::hypot(d.x, d.y));
    s.v_g = v_g;
    return s;
}

namespace {

struct TickCommand {
    AccelCommand command;
    double k1 = 0.0;
    double k2 = 0.0;
    double k_q = 0.0;
    GainSource source = GainSource::None;
    bool clipped = false;
};

TickCommand compensated(const LookaheadGeometry& geom, const UavState& state, const GuidanceConfig& cfg,
                        const LosRates& rates, CompensationGains gains, GainSource source) {
    const AxisCompensation comp = typical_compensation(geom, gains);
    if (comp.singular_chi && comp.singular_gamma && source != GainSource::None) {
        source = GainSource::FallbackNone;
    }
    const AccelCommand base = base_law(geom, state, cfg);
    const AssembledCommand out = clip_and_assemble(base, comp.f_chi, comp.f_gamma, rates, state, geom, cfg);
    return {out.command, gains.k1, gains.k2, cfg.k_q, source, out.terms.clipped};
}

class OptimalGainScheduler {
public:
    TickCommand command(const LookaheadGeometry& geom, const UavState& state, const GuidanceConfig& cfg,
                        const LosRates& rates, double dt) {
        const CompensationGains fallback{std::max(cfg.k1, (1.0 + cfg.epsilon) * cfg.L_d / 2.0),
                                         std::max(cfg.k2, (1.0 + cfg.epsilon) * cfg.L_d / 2.0)};
        std::optional<qp::QpBuild> build;
        try {
            build = qp::build_problem(geom, state, cfg, rates, previous_, dt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularTheta) throw;
            previous_.reset();
            return compensated(geom, state, cfg, rates, fallback, GainSource::FallbackFixed);
        }
        const qp::QpSolution sol = qp::solve(build->problem);
        if (sol.status == qp::QpStatus::Optimal) {
            previous_ = build->map;
            return compensated(geom, state, cfg, rates, {sol.k(0), sol.k(1)}, GainSource::Qp);
        }

        const KqSearchResult search = decremental_kq_search(geom, state, cfg, rates);
        if (search.feasible && search.k_q < cfg.k_q) {
            GuidanceConfig reduced = cfg;
            reduced.k_q = search.k_q;
            const qp::QpBuild retry = qp::build_problem(geom, state, reduced, rates, previous_, dt);
            const qp::QpSolution sol2 = qp::solve(retry.problem);
            if (sol2.status == qp::QpStatus::Optimal) {
                previous_ = retry.map;
                return compensated(geom, state, reduced, rates, {sol2.k(0), sol2.k(1)},
                                   GainSource::QpReducedKq);
            }
        }
        previous_ = build->map;
        return compensated(geom, state, cfg, rates, fallback, GainSource::FallbackFixed);
    }

    void reset() { previous_.reset(); }

private:
    std::optional<qp::CommandAffineMap> previous_;
};

}  // namespace

RunResult run(const Scenario& scenario) {
    scenario.validate();
    GuidanceConfig cfg = scenario.cfg;
    cfg.L_d = scenario.L_d;
    const WaypointPath& path = scenario.path;

    RunResult result;
    kinematics::Rng rng(scenario.seed);
    UavState state = scenario.initial_state;
    std::size_t prev_index = 0;
    LosDifferentiator differentiator;
    OptimalGainScheduler scheduler;
    DisturbanceSample dist;

    const auto ticks = static_cast<long>(std::llround(scenario.duration / scenario.dt));
    result.records.reserve(static_cast<std::size_t>(ticks));
    for (long i = 0; i < ticks; ++i) {
        if (i % scenario.disturbance_hold == 0) {
            dist = kinematics::sample_disturbance(rng, scenario.L_d, scenario.disturbance_mode);
        }

        TargetSelection sel;
        try {
            sel = select_target_constrained(state, path, cfg, prev_index);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PathExhausted) throw;
            result.termination = Termination::PathComplete;
            break;
        }
        if (sel.source == SelectionSource::NoneAhead) {
            if (prev_index + 1 == path.size()) {
                // Final waypoint passed outside the capture radius.
                result.termination = Termination::PathComplete;
                break;
            }
            // Nothing ahead mid-path (overshoot): keep chasing the current target.
            sel.index = prev_index;
            sel.point = path[prev_index];
        }
        prev_index = sel.index;

        const LookaheadGeometry geom = compute_geometry(state, sel.point);
        const LosRates rates = differentiator.update(geom, sel.index, scenario.dt);

        TickCommand tc;
        switch (scenario.controller) {
            case Controller::Rllp:
                tc.command = base_law(geom, state, cfg);
                tc.k_q = cfg.k_q;
                break;
            case Controller::RllpFixedComp:
                tc = compensated(geom, state, cfg, rates, {cfg.k1, cfg.k2}, GainSource::None);
                break;
            case Controller::RllpOptimal:
                tc = scheduler.command(geom, state, cfg, rates, scenario.dt);
                break;
        }

        TickRecord rec;
        rec.t = static_cast<double>(i) * scenario.dt;
        rec.state = state;
        rec.target = sel;
        rec.eta_lat = geom.eta_lat;
        rec.eta_lon = geom.eta_lon;
        rec.command = tc.command;
        rec.e_d = distance(state.position(), sel.point);
        rec.k1 = tc.k1;
        rec.k2 = tc.k2;
        rec.k_q = tc.k_q;
        rec.gain_source = tc.source;
        rec.clipped = tc.clipped;
        rec.disturbance = dist;
        result.records.push_back(rec);

        state = kinematics::step(state, tc.command, dist, scenario.dt);
    }
    if (!result.records.empty()) result.metrics = compute_metrics(result.records);
    return result;
}

namespace {

SeriesStats stats_of(const std::vector<double>& v) {
    const kernels::Moments m = kernels::moments(v);
    return {m.mean, m.stddev, m.min, m.max};
}

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunMetrics compute_metrics(std::span<const TickRecord> records, std::optional<TimeWindow> window) {
    std::vector<const TickRecord*> sel;
    sel.reserve(records.size());
    for (const TickRecord& r : records) {
        if (!window || (r.t >= window->begin - 1e-9 && r.t <= window->end + 1e-9)) sel.push_back(&r);
    }
    if (sel.empty()) throw Error(ErrorCode::EmptyRun, "no records to summarize");

    std::vector<double> eta_lon, eta_lat, a_yc, a_zc;
    for (auto* vec : {&eta_lon, &eta_lat, &a_yc, &a_zc}) vec->reserve(sel.size());
    for (const TickRecord* r : sel) {
        eta_lon.push_back(r->eta_lon);
        eta_lat.push_back(r->eta_lat);
        a_yc.push_back(r->command.a_yc);
        a_zc.push_back(r->command.a_zc);
    }
    RunMetrics m;
    m.eta_lon = stats_of(eta_lon);
    m.eta_lat = stats_of(eta_lat);
    m.a_yc = stats_of(a_yc);
    m.a_zc = stats_of(a_zc);
    m.ticks = sel.size();

    // Per-leg e_d convergence. Leg boundaries are target switches.
    std::vector<double> times;
    std::size_t start = 0;
    while (start < sel.size()) {
        std::size_t end = start;
        while (end < sel.size() && sel[end]->target.index == sel[start]->target.index) ++end;
        const double t0 = sel[start]->t;
        const double threshold = 0.05 * sel[start]->e_d;
        std::optional<double> hit;
        for (std::size_t j = start; j < end; ++j) {
            if (sel[j]->e_d < threshold) {
                hit = sel[j]->t - t0;
                break;
            }
        }
        // A leg that ends before reaching the threshold never converged.
        times.push_back(hit ? *hit : std::numeric_limits<double>::infinity());
        if (hit) ++m.converged_legs;
        start = end;
    }
    m.legs = times.size();
    m.ed_convergence_median = median(std::move(times));
    return m;
}

std::vector<TickRecord> pursue_fixed_target(const FixedTargetRun& run) {
    run.cfg.validate();
    if (!(run.dt > 0.0) || !(run.duration > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "dt and duration must be positive");
    }
    std::vector<TickRecord> out;
    UavState state = run.initial_state;
    const DisturbanceSample none{};
    const auto ticks = static_cast<long>(std::llround(run.duration / run.dt));
    for (long i = 0; i <= ticks; ++i) {
        TickRecord rec;
        rec.t = static_cast<double>(i) * run.dt;
        rec.state = state;
        rec.target.point = run.target;
        rec.target.feasible = true;
        rec.target.source = SelectionSource::Constrained;
        rec.e_d = distance(state.position(), run.target);
        if (rec.e_d < run.stop_radius) {
            out.push_back(rec);
            break;
        }
        const LookaheadGeometry geom = compute_geometry(state, run.target);
        rec.eta_lat = geom.eta_lat;
        rec.eta_lon = geom.eta_lon;
        rec.command = base_law(geom, state, run.cfg);
        rec.k_q = run.cfg.k_q;
        out.push_back(rec);
        if (i == ticks) break;
        state = kinematics::step(state, rec.command, none, run.dt);
    }
    return out;
}

}  // namespace rllp::sim
