#pragma once

// Scenario config files and run outputs (tick log CSV, disturbance CSV, metrics JSON).
//
// Config format: one `key = value` per line, `#` starts a comment. Numeric values accept
// arithmetic expressions over `pi` (e.g. `L_d = pi/15`). Angles are in radians.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rllp/path_gen.hpp"
#include "rllp/sim.hpp"

namespace rllp::io {

/// Evaluates `+ - * /`, unary minus, parentheses, decimal literals and `pi`.
/// Throws Error(Config) on malformed input.
double evaluate_expression(std::string_view text);

/// Keys:
///   path                  waypoint CSV, relative to the config file's directory
///   path_seed, path_segments, path_leg_min, path_leg_max, path_turn_min, path_turn_max,
///   path_climb_max, path_spacing
///                         synthetic path options, used when `path` is absent
///   controller            rllp | rllp_fixed_comp | rllp_optimal
///   L_d, seed, dt, disturbance_hold, duration
///   disturbance_mode      box | std_matched
///   v_g                   m/s
///   x0, y0, z0, chi0, gamma0
///                         initial state; defaults to the first waypoint heading at the second
///   k_q, delta, tau_hat, q_L, a_yc_min, a_yc_max, a_zc_min, a_zc_max, u_dot_min, u_dot_max,
///   epsilon, r_weight, k_q_floor, k_q_decay, k1, k2, capture_radius
///                         guidance tunables
/// Throws Error(Config) naming the offending line or key. When `keys` is given it receives
/// the keys present in the file.
sim::Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {},
                             std::set<std::string>* keys = nullptr);
sim::Scenario load_scenario(const std::filesystem::path& file, std::set<std::string>* keys = nullptr);

/// Column order of the tick log.
inline constexpr std::string_view kLogHeader =
    "t,x,y,z,chi,gamma,target_idx,eta_lat,eta_lon,a_yc,a_zc,e_d,k1,k2,qp_status,clipped";

/// Floats with 9 significant digits.
std::string format_number(double v);

void write_log_csv(std::ostream& out, std::span<const sim::TickRecord> records);
/// `t,d_chi,d_gamma` per tick.
void write_disturbance_csv(std::ostream& out, std::span<const sim::TickRecord> records);

nlohmann::json metrics_to_json(const sim::RunMetrics& m);

/// Header of the combined sweep table; one row per L_d level.
std::string sweep_header();
std::string sweep_row(double L_d, const sim::RunMetrics& m);

}  // namespace rllp::io
