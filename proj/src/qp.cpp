#include "rllp/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rllp/error.hpp"
#include "rllp/guidance.hpp"

namespace rllp::qp {

namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// Rows are compared after scaling to unit normal, so feasibility is measured in k-space.
constexpr double kFeasTol = 1e-9;
constexpr double kRowNormFloor = 1e-12;
constexpr double kPhaseOneBox = 1e6;

struct NormalizedRows {
    MatrixXd G;                // kept rows, unit norm
    VectorXd h;
    std::vector<Eigen::Index> source;  // original row of each kept row
    VectorXd norms;
    bool contradictory = false;  // a zero row with negative rhs
};

NormalizedRows normalize_rows(const QpProblem& p) {
    NormalizedRows out;
    const Eigen::Index m = p.constraint_matrix.rows();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double n = p.constraint_matrix.row(i).norm();
        if (n < kRowNormFloor) {
            if (p.constraint_rhs(i) < -kFeasTol) out.contradictory = true;
            continue;
        }
        keep.push_back(i);
    }
    const auto kept = static_cast<Eigen::Index>(keep.size());
    out.G.resize(kept, 2);
    out.h.resize(kept);
    out.norms.resize(kept);
    for (Eigen::Index r = 0; r < kept; ++r) {
        const Eigen::Index i = keep[static_cast<std::size_t>(r)];
        const double n = p.constraint_matrix.row(i).norm();
        out.G.row(r) = p.constraint_matrix.row(i) / n;
        out.h(r) = p.constraint_rhs(i) / n;
        out.norms(r) = n;
    }
    out.source = std::move(keep);
    return out;
}

double max_violation(const NormalizedRows& rows, const Vector2d& k) {
    if (rows.G.rows() == 0) return -std::numeric_limits<double>::infinity();
    return (rows.G * k - rows.h).maxCoeff();
}

// Dense primal-dual path-following method for min 1/2 x'Qx + c'x s.t. Gx <= h with an
// infeasible start. Step lengths are backtracked so the gap s'z never increases.
struct IpmProblem {
    MatrixXd Q;
    VectorXd c;
    MatrixXd G;
    VectorXd h;
    double primal_scale = 1.0;
    double dual_scale = 1.0;
};

struct IpmResult {
    VectorXd x;
    VectorXd s;
    VectorXd z;
    bool converged = false;
    int iterations = 0;
    std::vector<double> gaps;
};

double max_step(const VectorXd& v, const VectorXd& dv) {
    double alpha = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
    }
    return alpha;
}

IpmResult run_ipm(const IpmProblem& p, VectorXd x, double tol, int max_iterations) {
    const Eigen::Index m = p.h.size();
    IpmResult r;
    VectorXd s = (p.h - p.G * x).cwiseMax(1.0);
    VectorXd z = VectorXd::Ones(m);
    const double md = static_cast<double>(m);

    for (int it = 0; it <= max_iterations; ++it) {
        const VectorXd rd = p.Q * x + p.c + p.G.transpose() * z;
        const VectorXd rp = p.G * x + s - p.h;
        const double gap = s.dot(z);
        r.gaps.push_back(gap);
        const double obj = 0.5 * x.dot(p.Q * x) + p.c.dot(x);
        if (rp.lpNorm<Eigen::Infinity>() <= tol * p.primal_scale &&
            rd.lpNorm<Eigen::Infinity>() <= tol * p.dual_scale && gap <= tol * (1.0 + std::abs(obj))) {
            r.converged = true;
            r.iterations = it;
            break;
        }
        if (it == max_iterations) {
            r.iterations = it;
            break;
        }

        const VectorXd w = z.cwiseQuotient(s);
        const MatrixXd M = p.Q + p.G.transpose() * w.asDiagonal() * p.G;
        const Eigen::LDLT<MatrixXd> ldlt(M);

        VectorXd dx, ds, dz;
        auto direction = [&](const VectorXd& rc) {
            const VectorXd rhs = -rd + p.G.transpose() * (rc - z.cwiseProduct(rp)).cwiseQuotient(s);
            dx = ldlt.solve(rhs);
            ds = -rp - p.G * dx;
            dz = (-rc - z.cwiseProduct(ds)).cwiseQuotient(s);
        };

        const double mu = gap / md;
        direction(s.cwiseProduct(z));
        const double a_aff = std::min(1.0, std::min(max_step(s, ds), max_step(z, dz)));
        const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / md;
        const double sigma = std::min(std::pow(mu_aff / mu, 3.0), 0.5);

        direction(s.cwiseProduct(z).array() - sigma * mu);
        double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
        for (int b = 0; b < 60 && (s + alpha * ds).dot(z + alpha * dz) > gap; ++b) alpha *= 0.5;

        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
    }
    r.x = std::move(x);
    r.s = std::move(s);
    r.z = std::move(z);
    return r;
}

QpSolution unconstrained_solution(const QpProblem& p) {
    QpSolution sol;
    const Eigen::LDLT<Eigen::Matrix2d> ldlt(p.hessian);
    sol.k = ldlt.solve(-p.linear);
    sol.objective = p.objective(sol.k);
    sol.status = QpStatus::Optimal;
    sol.multipliers = VectorXd::Zero(static_cast<Eigen::Index>(p.rows()));
    return sol;
}

}  // namespace

double QpProblem::objective(const Eigen::Vector2d& k) const {
    return 0.5 * k.dot(hessian * k) + linear.dot(k);
}

void QpProblem::validate() const {
    if (constraint_rhs.size() < 1 || constraint_matrix.rows() != constraint_rhs.size()) {
        throw Error(ErrorCode::InvalidArgument, "constraint matrix / rhs shape mismatch or no rows");
    }
    if (!hessian.allFinite() || !linear.allFinite() || !constraint_matrix.allFinite() ||
        !constraint_rhs.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "QP data contains NaN or Inf");
    }
    if (std::abs(hessian(0, 1) - hessian(1, 0)) > 1e-12 * (1.0 + hessian.cwiseAbs().maxCoeff())) {
        throw Error(ErrorCode::InvalidArgument, "hessian is not symmetric");
    }
}

std::string_view to_string(QpStatus status) {
    switch (status) {
        case QpStatus::Optimal: return "optimal";
        case QpStatus::Infeasible: return "infeasible";
        case QpStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

QpSolution solve(const QpProblem& problem, const SolveOptions& options) {
    problem.validate();
    const NormalizedRows rows = normalize_rows(problem);
    QpSolution sol;
    if (rows.contradictory) {
        sol.status = QpStatus::Infeasible;
        return sol;
    }
    if (rows.G.rows() == 0) return unconstrained_solution(problem);
    const Eigen::Index m = rows.G.rows();

    // Phase 1: minimize t subject to G k - t <= h, t >= -1, |k_j| <= box.
    IpmProblem p1;
    p1.Q = MatrixXd::Zero(3, 3);
    p1.c = Eigen::Vector3d(0.0, 0.0, 1.0);
    p1.G = MatrixXd::Zero(m + 5, 3);
    p1.h = VectorXd::Zero(m + 5);
    p1.G.topLeftCorner(m, 2) = rows.G;
    p1.G.col(2).head(m).setConstant(-1.0);
    p1.h.head(m) = rows.h;
    p1.G(m, 2) = -1.0;
    p1.h(m) = 1.0;
    for (int j = 0; j < 2; ++j) {
        p1.G(m + 1 + 2 * j, j) = 1.0;
        p1.G(m + 2 + 2 * j, j) = -1.0;
        p1.h(m + 1 + 2 * j) = kPhaseOneBox;
        p1.h(m + 2 + 2 * j) = kPhaseOneBox;
    }
    p1.primal_scale = 1.0 + rows.h.lpNorm<Eigen::Infinity>();
    p1.dual_scale = 1.0;
    const double t0 = std::max((-rows.h).maxCoeff(), -1.0) + 1.0;
    const IpmResult r1 = run_ipm(p1, Eigen::Vector3d(0.0, 0.0, t0), options.tolerance, options.max_iterations);
    if (!r1.converged) {
        sol.status = QpStatus::MaxIterations;
        sol.iterations = r1.iterations;
        return sol;
    }
    const double t_star = r1.x(2);
    if (t_star > kFeasTol) {
        sol.status = QpStatus::Infeasible;
        return sol;
    }

    // Phase 2 from the most interior point found. A feasible set without interior is
    // widened by the feasibility tolerance.
    IpmProblem p2;
    p2.Q = problem.hessian;
    p2.c = problem.linear;
    p2.G = rows.G;
    p2.h = rows.h;
    if (t_star > -kFeasTol) p2.h.array() += std::max(t_star, 0.0) + kFeasTol;
    p2.primal_scale = 1.0 + rows.h.lpNorm<Eigen::Infinity>();
    p2.dual_scale = 1.0 + std::max(problem.linear.lpNorm<Eigen::Infinity>(),
                                   problem.hessian.lpNorm<Eigen::Infinity>());
    const IpmResult r2 = run_ipm(p2, r1.x.head(2), options.tolerance, options.max_iterations);
    sol.k = r2.x;
    sol.objective = problem.objective(sol.k);
    sol.iterations = r2.iterations;
    sol.gap_history = r2.gaps;
    sol.multipliers = VectorXd::Zero(static_cast<Eigen::Index>(problem.rows()));
    for (Eigen::Index r = 0; r < m; ++r) {
        sol.multipliers(rows.source[static_cast<std::size_t>(r)]) = r2.z(r) / rows.norms(r);
    }
    sol.status = r2.converged ? QpStatus::Optimal : QpStatus::MaxIterations;
    return sol;
}

QpSolution brute_force_oracle(const QpProblem& problem) {
    problem.validate();
    const NormalizedRows rows = normalize_rows(problem);
    QpSolution best;
    best.status = QpStatus::Infeasible;
    if (rows.contradictory) return best;
    const Eigen::Index m = rows.G.rows();
    bool found = false;

    auto consider = [&](const Vector2d& k) {
        if (!k.allFinite() || max_violation(rows, k) > kFeasTol) return;
        const double obj = problem.objective(k);
        if (!found || obj < best.objective) {
            found = true;
            best.k = k;
            best.objective = obj;
        }
    };

    // No active rows.
    {
        const Eigen::FullPivLU<Eigen::Matrix2d> lu(problem.hessian);
        if (lu.isInvertible()) consider(lu.solve(-problem.linear));
    }
    // One active row: stationarity plus the row as an equality.
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Matrix3d kkt = Eigen::Matrix3d::Zero();
        kkt.topLeftCorner<2, 2>() = problem.hessian;
        kkt.block<2, 1>(0, 2) = rows.G.row(i).transpose();
        kkt.block<1, 2>(2, 0) = rows.G.row(i);
        const Eigen::Vector3d rhs(-problem.linear(0), -problem.linear(1), rows.h(i));
        const Eigen::FullPivLU<Eigen::Matrix3d> lu(kkt);
        if (lu.isInvertible()) consider(lu.solve(rhs).head<2>());
    }
    // Two active rows pin the point in 2-D.
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            Eigen::Matrix2d a;
            a.row(0) = rows.G.row(i);
            a.row(1) = rows.G.row(j);
            if (std::abs(a.determinant()) < 1e-12) continue;
            consider(a.partialPivLu().solve(Vector2d(rows.h(i), rows.h(j))));
        }
    }
    if (m == 0 && !found) return unconstrained_solution(problem);
    if (found) best.status = QpStatus::Optimal;
    return best;
}

QpSolution grid_oracle(const QpProblem& problem, const Eigen::Vector2d& lower,
                       const Eigen::Vector2d& upper, int resolution) {
    if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 2");
    problem.validate();
    const NormalizedRows rows = normalize_rows(problem);
    QpSolution best;
    best.status = QpStatus::Infeasible;
    if (rows.contradictory) return best;
    bool found = false;
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const Vector2d k(lower(0) + (upper(0) - lower(0)) * i / (resolution - 1),
                             lower(1) + (upper(1) - lower(1)) * j / (resolution - 1));
            if (max_violation(rows, k) > kFeasTol) continue;
            const double obj = problem.objective(k);
            if (!found || obj < best.objective) {
                found = true;
                best.k = k;
                best.objective = obj;
            }
        }
    }
    if (found) best.status = QpStatus::Optimal;
    return best;
}

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution) {
    KktResiduals r;
    const VectorXd& lambda = solution.multipliers;
    if (lambda.size() != static_cast<Eigen::Index>(problem.rows())) {
        throw Error(ErrorCode::InvalidArgument, "solution carries no multipliers");
    }
    const VectorXd slack = problem.constraint_rhs - problem.constraint_matrix * solution.k;
    r.stationarity = (problem.hessian * solution.k + problem.linear +
                      problem.constraint_matrix.transpose() * lambda)
                         .lpNorm<Eigen::Infinity>();
    r.complementarity = lambda.cwiseProduct(slack).lpNorm<Eigen::Infinity>();
    r.primal = std::max(0.0, (-slack).maxCoeff());
    r.dual = std::max(0.0, (-lambda).maxCoeff());
    return r;
}

CommandAffineMap command_affine_map(const LookaheadGeometry& geom, const UavState& state,
                                    const GuidanceConfig& cfg, const LosRates& c_dots) {
    if (!geom.theta_defined || std::abs(geom.sin_theta) < kThetaGuard ||
        std::abs(geom.cos_theta) < kThetaGuard) {
        throw Error(ErrorCode::SingularTheta, "constraint normal aligned with an axis");
    }
    const double eta_lat = std::clamp(geom.eta_lat, -cfg.delta, cfg.delta);
    const double eta_lon = std::clamp(geom.eta_lon, -cfg.delta, cfg.delta);
    const double cg = std::cos(state.gamma);
    CommandAffineMap map;
    map.b(0) = (cfg.k_q * std::sin(eta_lat) + c_dots.c1_dot) * state.v_g * cg;
    map.b(1) = (cfg.k_q * std::sin(eta_lon) + c_dots.c2_dot) * state.v_g + kGravity * cg;
    map.A(0, 0) = state.v_g * cg / geom.sin_theta;
    map.A(1, 1) = state.v_g / geom.cos_theta;
    return map;
}

QpBuild build_problem(const LookaheadGeometry& geom, const UavState& state, const GuidanceConfig& cfg,
                      const LosRates& c_dots, const std::optional<CommandAffineMap>& previous,
                      double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    QpBuild out;
    out.map = command_affine_map(geom, state, cfg, c_dots);
    out.first_tick = !previous.has_value();
    const Eigen::Matrix2d& A = out.map.A;
    const Vector2d& b = out.map.b;
    const Vector2d u_min(cfg.a_yc_min, cfg.a_zc_min);
    const Vector2d u_max(cfg.a_yc_max, cfg.a_zc_max);

    const Eigen::Index m = out.first_tick ? 5 : 9;
    QpProblem& p = out.problem;
    p.constraint_matrix.resize(m, 2);
    p.constraint_rhs.resize(m);
    p.constraint_matrix.topRows<2>() = A;
    p.constraint_rhs.head<2>() = u_max - b;
    p.constraint_matrix.middleRows<2>(2) = -A;
    p.constraint_rhs.segment<2>(2) = b - u_min;
    p.hessian = kRidge * Eigen::Matrix2d::Identity();
    p.linear.setZero();
    if (!out.first_tick) {
        const Eigen::Matrix2d dA = A - previous->A;
        const Vector2d db = b - previous->b;
        const Vector2d du_max(cfg.u_dot_max * dt, cfg.u_dot_max * dt);
        const Vector2d du_min(cfg.u_dot_min * dt, cfg.u_dot_min * dt);
        p.constraint_matrix.middleRows<2>(4) = dA;
        p.constraint_rhs.segment<2>(4) = du_max - db;
        p.constraint_matrix.middleRows<2>(6) = -dA;
        p.constraint_rhs.segment<2>(6) = db - du_min;
        const Eigen::Matrix2d R = cfg.r_weight * Eigen::Matrix2d::Identity();
        p.hessian += dA.transpose() * R * dA;
        p.linear = dA.transpose() * R * db;
    }
    p.constraint_matrix.row(m - 1) << -1.0, -1.0;
    p.constraint_rhs(m - 1) = -(1.0 + cfg.epsilon) * cfg.L_d;
    return out;
}

}  // namespace rllp::qp
