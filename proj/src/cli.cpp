#include "rllp/cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rllp/error.hpp"
#include "rllp/path_gen.hpp"
#include "rllp/scenario_io.hpp"
#include "rllp/sim.hpp"

namespace rllp::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCompareDefaultLd = "pi/15";

struct Abort : std::runtime_error {
    int code;
    Abort(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<long long> seed;
    std::string controller;
    std::string ld;
    std::string window;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_controller) {
    cmd->add_option("--config", o.config, "scenario config file")->required();
    cmd->add_option("--out", o.out, "output directory")->required();
    cmd->add_option("--seed", o.seed, "override the config seed");
    if (with_controller) cmd->add_option("--controller", o.controller, "rllp | rllp_fixed_comp | rllp_optimal");
    cmd->add_flag("--force", o.force, "overwrite existing outputs");
}

sim::Scenario load(const CommonOptions& o, std::set<std::string>* keys = nullptr) {
    if (!fs::exists(o.config)) throw Abort(kExitConfig, "config file not found: " + o.config);
    sim::Scenario sc = io::load_scenario(o.config, keys);
    if (o.seed) {
        if (*o.seed < 0) throw Abort(kExitConfig, "--seed must be >= 0");
        sc.seed = static_cast<std::uint64_t>(*o.seed);
    }
    if (!o.controller.empty()) {
        const auto c = sim::parse_controller(o.controller);
        if (!c) throw Abort(kExitConfig, "unknown controller '" + o.controller + "'");
        sc.controller = *c;
    }
    if (!o.ld.empty()) sc.L_d = io::evaluate_expression(o.ld);
    sc.cfg.L_d = sc.L_d;
    sc.validate();
    return sc;
}

std::optional<sim::TimeWindow> parse_window(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Abort(kExitConfig, "--window expects begin:end, got '" + text + "'");
    const sim::TimeWindow w{io::evaluate_expression(text.substr(0, colon)),
                            io::evaluate_expression(text.substr(colon + 1))};
    if (!(w.end >= w.begin)) throw Abort(kExitConfig, "--window end must not precede begin");
    return w;
}

/// Creates the directory and refuses to clobber any of `files` unless forced.
void prepare_outputs(const fs::path& dir, const std::vector<fs::path>& files, bool force) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Abort(kExitConfig, "cannot create " + dir.string() + ": " + ec.message());
    if (force) return;
    for (const fs::path& f : files) {
        if (fs::exists(dir / f)) {
            throw Abort(kExitConfig, (dir / f).string() + " exists; pass --force to overwrite");
        }
    }
}

void write_file(const fs::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Abort(kExitAbort, "cannot write " + file.string());
}

std::string log_text(const sim::RunResult& r) {
    std::ostringstream s;
    io::write_log_csv(s, r.records);
    return s.str();
}

std::string disturbance_text(const sim::RunResult& r) {
    std::ostringstream s;
    io::write_disturbance_csv(s, r.records);
    return s.str();
}

sim::RunResult simulate(const sim::Scenario& sc) {
    try {
        return sim::run(sc);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw Abort(kExitConfig, e.what());
        throw Abort(kExitAbort, std::string("simulation aborted: ") + e.what());
    }
}

sim::RunMetrics windowed(const sim::RunResult& r, std::optional<sim::TimeWindow> w) {
    if (!w) return r.metrics;
    try {
        return sim::compute_metrics(r.records, w);
    } catch (const Error& e) {
        throw Abort(kExitConfig, std::string("--window: ") + e.what());
    }
}

int run_command(const CommonOptions& o) {
    const sim::Scenario sc = load(o);
    const auto window = parse_window(o.window);
    const fs::path dir(o.out);
    prepare_outputs(dir, {"run.csv", "metrics.json"}, o.force);
    const sim::RunResult r = simulate(sc);
    write_file(dir / "run.csv", log_text(r));
    write_file(dir / "metrics.json", io::metrics_to_json(windowed(r, window)).dump(2) + "\n");
    return kExitOk;
}

int compare_command(CommonOptions o) {
    std::set<std::string> keys;
    if (o.ld.empty() && fs::exists(o.config)) {
        io::load_scenario(o.config, &keys);
        if (!keys.count("L_d")) o.ld = kCompareDefaultLd;
    }
    const sim::Scenario base = load(o);
    const auto window = parse_window(o.window);
    const fs::path dir(o.out);
    const sim::Controller variants[] = {sim::Controller::Rllp, sim::Controller::RllpFixedComp,
                                        sim::Controller::RllpOptimal};
    std::vector<fs::path> files{"compare.json"};
    for (sim::Controller c : variants) {
        files.emplace_back(std::string(sim::to_string(c)) + ".csv");
        files.emplace_back(std::string(sim::to_string(c)) + "_disturbance.csv");
    }
    prepare_outputs(dir, files, o.force);

    nlohmann::json doc;
    doc["L_d"] = base.L_d;
    doc["seed"] = base.seed;
    doc["window"] = window ? nlohmann::json::array({window->begin, window->end}) : nlohmann::json(nullptr);
    for (sim::Controller c : variants) {
        sim::Scenario sc = base;
        sc.controller = c;
        const sim::RunResult r = simulate(sc);
        const std::string name(sim::to_string(c));
        write_file(dir / (name + ".csv"), log_text(r));
        write_file(dir / (name + "_disturbance.csv"), disturbance_text(r));
        doc["variants"][name] = io::metrics_to_json(windowed(r, window));
    }
    write_file(dir / "compare.json", doc.dump(2) + "\n");
    return kExitOk;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) out.push_back(item);
    return out;
}

int sweep_command(const CommonOptions& o, const std::string& levels_text, int jobs) {
    const sim::Scenario base = load(o);
    std::vector<double> levels;
    for (const std::string& item : split_list(levels_text)) levels.push_back(io::evaluate_expression(item));
    if (levels.empty()) throw Abort(kExitConfig, "--ld needs at least one level");
    if (jobs < 1) throw Abort(kExitConfig, "--jobs must be >= 1");
    std::vector<sim::Scenario> scenarios;
    for (double ld : levels) {
        sim::Scenario sc = base;
        sc.L_d = ld;
        sc.cfg.L_d = ld;
        sc.validate();
        scenarios.push_back(std::move(sc));
    }

    const fs::path dir(o.out);
    std::vector<fs::path> files{"sweep.csv"};
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const fs::path sub = "ld_" + std::to_string(i);
        files.push_back(sub / "run.csv");
        files.push_back(sub / "metrics.json");
    }
    prepare_outputs(dir, files, o.force);

    std::vector<std::optional<sim::RunMetrics>> metrics(levels.size());
    std::vector<std::string> failures(levels.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < levels.size(); i = next++) {
            try {
                const sim::RunResult r = simulate(scenarios[i]);
                const fs::path sub = dir / ("ld_" + std::to_string(i));
                fs::create_directories(sub);
                write_file(sub / "run.csv", log_text(r));
                write_file(sub / "metrics.json", io::metrics_to_json(r.metrics).dump(2) + "\n");
                metrics[i] = r.metrics;
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto n = static_cast<std::size_t>(jobs) < levels.size() ? static_cast<std::size_t>(jobs) : levels.size();
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    bool failed = false;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!failures[i].empty()) {
            std::cerr << "rllp: level " << i << " (L_d=" << io::format_number(levels[i]) << "): " << failures[i] << '\n';
            failed = true;
        }
    }
    if (failed) return kExitAbort;

    std::string table = io::sweep_header() + "\n";
    for (std::size_t i = 0; i < levels.size(); ++i) table += io::sweep_row(levels[i], *metrics[i]) + "\n";
    write_file(dir / "sweep.csv", table);
    return kExitOk;
}

int gen_path_command(const std::string& out, const SyntheticPathOptions& opts, bool force) {
    const fs::path file(out);
    if (file.has_parent_path()) prepare_outputs(file.parent_path(), {}, true);
    if (!force && fs::exists(file)) throw Abort(kExitConfig, file.string() + " exists; pass --force to overwrite");
    WaypointPath path = [&] {
        try {
            return generate_synthetic_path(opts);
        } catch (const Error& e) {
            throw Abort(kExitConfig, e.what());
        }
    }();
    std::ostringstream s;
    s << "# synthetic path, seed " << opts.seed << ", " << opts.segments << " segments\n";
    path.write_csv(s);
    write_file(file, s.str());
    return kExitOk;
}

}  // namespace

int main(int argc, const char* const* argv) {
    CLI::App app{"Look-ahead pursuit path-following simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "simulate one scenario");
    add_common(run, run_opts, true);
    run->add_option("--ld", run_opts.ld, "override L_d (expression, e.g. pi/15)");
    run->add_option("--window", run_opts.window, "metrics window begin:end in seconds");

    CommonOptions cmp_opts;
    CLI::App* compare = app.add_subcommand("compare", "run all three controller variants on one seed");
    add_common(compare, cmp_opts, false);
    compare->add_option("--ld", cmp_opts.ld, "L_d (expression); defaults to the config value, else pi/15");
    compare->add_option("--window", cmp_opts.window, "metrics window begin:end in seconds");

    CommonOptions sweep_opts;
    std::string levels = "0,pi/40,pi/30,pi/20,pi/15,pi/10";
    int jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "run one scenario per disturbance level");
    add_common(sweep, sweep_opts, true);
    sweep->add_option("--ld", levels, "comma-separated L_d levels")->capture_default_str();
    sweep->add_option("--jobs", jobs, "levels simulated concurrently")->capture_default_str();

    std::string path_out;
    SyntheticPathOptions gen;
    bool gen_force = false;
    CLI::App* gen_path = app.add_subcommand("gen-path", "write a synthetic non-smooth waypoint path");
    gen_path->add_option("--out", path_out, "output CSV file")->required();
    gen_path->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
    gen_path->add_option("--segments", gen.segments, "number of legs")->capture_default_str();
    gen_path->add_option("--leg-min", gen.leg_min, "shortest leg, m")->capture_default_str();
    gen_path->add_option("--leg-max", gen.leg_max, "longest leg, m")->capture_default_str();
    gen_path->add_option("--turn-max", gen.turn_max, "largest corner angle, rad")->capture_default_str();
    gen_path->add_option("--climb-max", gen.climb_max, "steepest climb or glide, rad")->capture_default_str();
    gen_path->add_option("--spacing", gen.spacing, "waypoint spacing, m")->capture_default_str();
    gen_path->add_flag("--force", gen_force, "overwrite an existing file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return run_command(run_opts);
        if (*compare) return compare_command(cmp_opts);
        if (*sweep) return sweep_command(sweep_opts, levels, jobs);
        if (*gen_path) return gen_path_command(path_out, gen, gen_force);
    } catch (const Abort& e) {
        std::cerr << "rllp: " << e.what() << '\n';
        return e.code;
    } catch (const Error& e) {
        std::cerr << "rllp: " << e.what() << '\n';
        return e.code() == ErrorCode::Config ? kExitConfig : kExitAbort;
    } catch (const std::exception& e) {
        std::cerr << "rllp: " << e.what() << '\n';
        return kExitAbort;
    }
    return kExitConfig;
}

}  // namespace rllp::cli
