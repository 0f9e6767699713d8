#pragma once

// Two-variable convex QP used to pick the compensation gains (k1, k2) each control tick:
//
//   minimize 1/2 k' H k + c' k   subject to   G k <= h.
//
// solve() is a primal-dual interior-point method with a phase-1 slack maximization for
// infeasibility detection. brute_force_oracle() enumerates active sets and is exact in 2-D.

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rllp/config.hpp"
#include "rllp/path.hpp"
#include "rllp/types.hpp"

namespace rllp::qp {

using ConstraintMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

inline constexpr double kRidge = 1e-8;

struct QpProblem {
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
    Eigen::Vector2d linear = Eigen::Vector2d::Zero();
    ConstraintMatrix constraint_matrix;
    Eigen::VectorXd constraint_rhs;

    std::size_t rows() const { return static_cast<std::size_t>(constraint_rhs.size()); }
    double objective(const Eigen::Vector2d& k) const;
    /// Throws Error(InvalidArgument) on asymmetric hessian, shape mismatch, no rows or NaN/Inf.
    void validate() const;
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };
std::string_view to_string(QpStatus status);

struct QpSolution {
    Eigen::Vector2d k = Eigen::Vector2d::Zero();
    double objective = 0.0;
    QpStatus status = QpStatus::Infeasible;
    Eigen::VectorXd multipliers;      // one per constraint row, when available
    int iterations = 0;               // phase-2 iterations
    std::vector<double> gap_history;  // phase-2 duality gap s'z per iteration
};

struct SolveOptions {
    double tolerance = 1e-9;
    int max_iterations = 200;
};

QpSolution solve(const QpProblem& problem, const SolveOptions& options = {});

/// Exact minimizer by enumerating every active set of at most two rows.
QpSolution brute_force_oracle(const QpProblem& problem);

/// Exhaustive evaluation on a (resolution x resolution) grid over the given box; a coarse
/// cross-check for the active-set oracle.
QpSolution grid_oracle(const QpProblem& problem, const Eigen::Vector2d& lower,
                       const Eigen::Vector2d& upper, int resolution);

struct KktResiduals {
    double stationarity = 0.0;     // |H k + c + G' lambda|_inf
    double complementarity = 0.0;  // max |lambda_i (h_i - G_i k)|
    double primal = 0.0;           // max(G k - h, 0)
    double dual = 0.0;             // max(-lambda, 0)
};
KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution);

/// Affine map from gains to the compensated command, u = b + A k.
struct CommandAffineMap {
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
};

/// Throws Error(SingularTheta) unless |sin theta| and |cos theta| are both >= 1e-6.
CommandAffineMap command_affine_map(const LookaheadGeometry& geom, const UavState& state,
                                    const GuidanceConfig& cfg, const LosRates& c_dots);

struct QpBuild {
    QpProblem problem;
    CommandAffineMap map;  // keep for the next tick's rate rows
    bool first_tick = false;
};

/// Per-tick gain problem. Rows: A k <= u_max - b; -A k <= b - u_min; then, when `previous`
/// is given, dA k <= u_dot_max dt - db and -dA k <= db - u_dot_min dt; finally
/// -(k1 + k2) <= -(1 + eps) L_d. Hessian dA' R dA + ridge, linear dA' R db. Without
/// `previous` the rate rows are omitted and the objective is the ridge alone.
QpBuild build_problem(const LookaheadGeometry& geom, const UavState& state, const GuidanceConfig& cfg,
                      const LosRates& c_dots, const std::optional<CommandAffineMap>& previous,
                      double dt);

}  // namespace rllp::qp
