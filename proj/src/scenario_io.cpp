#include "rllp/scenario_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "rllp/error.hpp"

namespace rllp::io {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    double parse() {
        const double v = sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return v;
    }

private:
    double sum() {
        double v = product();
        for (;;) {
            if (accept('+')) v += product();
            else if (accept('-')) v -= product();
            else return v;
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            if (accept('*')) v *= unary();
            else if (accept('/')) v /= unary();
            else return v;
        }
    }

    double unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return primary();
    }

    double primary() {
        skip_space();
        if (accept('(')) {
            const double v = sum();
            if (!accept(')')) fail("missing ')'");
            return v;
        }
        if (text_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return kPi;
        }
        const std::string rest(text_.substr(pos_));
        const char* begin = rest.c_str();
        char* end = nullptr;
        if (rest.empty() || !(std::isdigit(static_cast<unsigned char>(rest[0])) || rest[0] == '.')) {
            fail("expected a number");
        }
        const double v = std::strtod(begin, &end);
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        config_error("bad expression '" + std::string(text_) + "': " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double number(const std::string& key, const std::string& value) {
    const double v = evaluate_expression(value);
    if (!std::isfinite(v)) config_error(key + " is not finite");
    return v;
}

long integer(const std::string& key, const std::string& value) {
    const double v = number(key, value);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) config_error(key + " must be an integer");
    return static_cast<long>(v);
}

}  // namespace

double evaluate_expression(std::string_view text) { return ExpressionParser(text).parse(); }

sim::Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir,
                             std::set<std::string>* keys) {
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) config_error("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty() || value.empty()) config_error("line " + std::to_string(line_no) + ": empty key or value");
        if (!kv.emplace(key, value).second) config_error("duplicate key '" + key + "'");
    }

    sim::Scenario sc(WaypointPath({{0, 0, 0}, {1, 0, 0}}));
    SyntheticPathOptions gen;
    std::optional<std::filesystem::path> path_file;
    std::optional<double> x0, y0, z0, chi0, gamma0;
    double v_g = 25.0;
    GuidanceConfig& c = sc.cfg;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto real = [](double& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = number(k, v); };
    };
    auto opt_real = [](std::optional<double>& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = number(k, v); };
    };
    const std::map<std::string, Setter> setters = {
        {"path", [&](const std::string&, const std::string& v) { path_file = base_dir / v; }},
        {"path_seed", [&](const std::string& k, const std::string& v) {
             const long s = integer(k, v);
             if (s < 0) config_error(k + " must be >= 0");
             gen.seed = static_cast<std::uint64_t>(s);
         }},
        {"path_segments", [&](const std::string& k, const std::string& v) { gen.segments = static_cast<int>(integer(k, v)); }},
        {"path_leg_min", real(gen.leg_min)},
        {"path_leg_max", real(gen.leg_max)},
        {"path_turn_min", real(gen.turn_min)},
        {"path_turn_max", real(gen.turn_max)},
        {"path_climb_max", real(gen.climb_max)},
        {"path_spacing", real(gen.spacing)},
        {"controller", [&](const std::string& k, const std::string& v) {
             const auto ctl = sim::parse_controller(v);
             if (!ctl) config_error(k + ": unknown controller '" + v + "'");
             sc.controller = *ctl;
         }},
        {"L_d", real(sc.L_d)},
        {"seed", [&](const std::string& k, const std::string& v) {
             const long s = integer(k, v);
             if (s < 0) config_error(k + " must be >= 0");
             sc.seed = static_cast<std::uint64_t>(s);
         }},
        {"dt", real(sc.dt)},
        {"disturbance_hold", [&](const std::string& k, const std::string& v) { sc.disturbance_hold = static_cast<int>(integer(k, v)); }},
        {"duration", real(sc.duration)},
        {"disturbance_mode", [&](const std::string& k, const std::string& v) {
             if (v == "box") sc.disturbance_mode = kinematics::DisturbanceMode::Box;
             else if (v == "std_matched") sc.disturbance_mode = kinematics::DisturbanceMode::StdMatched;
             else config_error(k + ": expected box or std_matched, got '" + v + "'");
         }},
        {"v_g", real(v_g)},
        {"x0", opt_real(x0)},
        {"y0", opt_real(y0)},
        {"z0", opt_real(z0)},
        {"chi0", opt_real(chi0)},
        {"gamma0", opt_real(gamma0)},
        {"k_q", real(c.k_q)},
        {"delta", real(c.delta)},
        {"tau_hat", real(c.tau_hat)},
        {"q_L", real(c.q_L)},
        {"a_yc_min", real(c.a_yc_min)},
        {"a_yc_max", real(c.a_yc_max)},
        {"a_zc_min", real(c.a_zc_min)},
        {"a_zc_max", real(c.a_zc_max)},
        {"u_dot_min", real(c.u_dot_min)},
        {"u_dot_max", real(c.u_dot_max)},
        {"epsilon", real(c.epsilon)},
        {"r_weight", real(c.r_weight)},
        {"k_q_floor", real(c.k_q_floor)},
        {"k_q_decay", real(c.k_q_decay)},
        {"k1", real(c.k1)},
        {"k2", real(c.k2)},
        {"capture_radius", real(c.capture_radius)},
    };

    for (const auto& [key, value] : kv) {
        if (keys) keys->insert(key);
        const auto it = setters.find(key);
        if (it == setters.end()) config_error("unknown key '" + key + "'");
        it->second(key, value);
    }

    try {
        sc.path = path_file ? WaypointPath::load_csv(*path_file) : generate_synthetic_path(gen);
    } catch (const Error& e) {
        config_error(std::string("path: ") + e.what());
    }
    if (!(v_g > 0.0)) config_error("v_g must be > 0");
    sc.initial_state = sim::state_at_path_start(sc.path, v_g);
    if (x0) sc.initial_state.x_p = *x0;
    if (y0) sc.initial_state.y_p = *y0;
    if (z0) sc.initial_state.z_p = *z0;
    if (chi0) sc.initial_state.chi = *chi0;
    if (gamma0) sc.initial_state.gamma = *gamma0;
    c.L_d = sc.L_d;
    sc.validate();
    return sc;
}

sim::Scenario load_scenario(const std::filesystem::path& file, std::set<std::string>* keys) {
    std::ifstream in(file);
    if (!in) config_error("cannot open config file " + file.string());
    return parse_scenario(in, file.parent_path(), keys);
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_log_csv(std::ostream& out, std::span<const sim::TickRecord> records) {
    out << kLogHeader << '\n';
    for (const sim::TickRecord& r : records) {
        const double fields[] = {r.t, r.state.x_p, r.state.y_p, r.state.z_p, r.state.chi, r.state.gamma};
        for (double f : fields) out << format_number(f) << ',';
        out << r.target.index << ',';
        const double rest[] = {r.eta_lat, r.eta_lon, r.command.a_yc, r.command.a_zc, r.e_d, r.k1, r.k2};
        for (double f : rest) out << format_number(f) << ',';
        out << sim::to_string(r.gain_source) << ',' << (r.clipped ? 1 : 0) << '\n';
    }
}

void write_disturbance_csv(std::ostream& out, std::span<const sim::TickRecord> records) {
    out << "t,d_chi,d_gamma\n";
    for (const sim::TickRecord& r : records) {
        out << format_number(r.t) << ',' << format_number(r.disturbance.d_chi) << ','
            << format_number(r.disturbance.d_gamma) << '\n';
    }
}

namespace {

nlohmann::json stats_json(const sim::SeriesStats& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

nlohmann::json metrics_to_json(const sim::RunMetrics& m) {
    return {
        {"eta_lon", stats_json(m.eta_lon)},
        {"eta_lat", stats_json(m.eta_lat)},
        {"a_yc", stats_json(m.a_yc)},
        {"a_zc", stats_json(m.a_zc)},
        {"ed_convergence", {{"median", m.ed_convergence_median}, {"legs", m.legs}, {"converged_legs", m.converged_legs}}},
        {"ticks", m.ticks},
    };
}

std::string sweep_header() {
    std::string h = "L_d";
    for (const char* series : {"eta_lon", "eta_lat", "a_yc", "a_zc"}) {
        for (const char* stat : {"mean", "std", "min", "max"}) {
            h += ',';
            h += series;
            h += '_';
            h += stat;
        }
    }
    return h + ",ed_convergence_median,legs,converged_legs,ticks";
}

std::string sweep_row(double L_d, const sim::RunMetrics& m) {
    std::ostringstream row;
    row << format_number(L_d);
    for (const sim::SeriesStats* s : {&m.eta_lon, &m.eta_lat, &m.a_yc, &m.a_zc}) {
        for (double v : {s->mean, s->std, s->min, s->max}) row << ',' << format_number(v);
    }
    row << ',' << format_number(m.ed_convergence_median) << ',' << m.legs << ',' << m.converged_legs << ','
        << m.ticks;
    return row.str();
}

}  // namespace rllp::io
