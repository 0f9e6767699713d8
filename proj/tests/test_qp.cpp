#include <doctest.h>

#include <array>
#include <cmath>
#include <optional>
#include <random>

#include "qp_cases.hpp"
#include "rllp/error.hpp"
#include "rllp/qp.hpp"

using namespace rllp;
using namespace rllp::qp;

using qp_cases::angles;
using qp_cases::random_gain_problem;

namespace {

QpProblem make(Eigen::Matrix2d H, Eigen::Vector2d c, std::initializer_list<std::array<double, 3>> rows) {
    QpProblem p;
    p.hessian = H;
    p.linear = c;
    p.constraint_matrix.resize(static_cast<Eigen::Index>(rows.size()), 2);
    p.constraint_rhs.resize(static_cast<Eigen::Index>(rows.size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        p.constraint_matrix(i, 0) = r[0];
        p.constraint_matrix(i, 1) = r[1];
        p.constraint_rhs(i) = r[2];
        ++i;
    }
    return p;
}

}  // namespace

TEST_CASE("solve examples") {
    SUBCASE("projection onto a half-plane") {
        const auto p = make(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), {{{-1, -1, -1}}});
        const auto s = solve(p);
        REQUIRE(s.status == QpStatus::Optimal);
        CHECK(s.k(0) == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(s.k(1) == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(s.objective == doctest::Approx(0.25).epsilon(1e-7));
        CHECK(s.multipliers(0) == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("interior minimum") {
        const auto p = make(Eigen::Matrix2d::Identity(), Eigen::Vector2d(-1, -1), {{{1, 1, 10}}});
        const auto s = solve(p);
        REQUIRE(s.status == QpStatus::Optimal);
        CHECK(s.k(0) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(s.k(1) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(std::abs(s.multipliers(0)) < 1e-7);
    }
    SUBCASE("contradictory rows") {
        const auto p = make(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), {{{1, 0, -1}}, {{-1, 0, -1}}});
        CHECK(solve(p).status == QpStatus::Infeasible);
        CHECK(brute_force_oracle(p).status == QpStatus::Infeasible);
    }
    SUBCASE("zero row with negative rhs") {
        const auto p = make(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), {{{0, 0, -1}}});
        CHECK(solve(p).status == QpStatus::Infeasible);
    }
    SUBCASE("degenerate feasible set is a point") {
        const auto p = make(Eigen::Matrix2d::Identity() * 1e-8, Eigen::Vector2d::Zero(),
                            {{{1, 0, 2}}, {{-1, 0, -2}}, {{0, 1, 3}}, {{0, -1, -3}}});
        const auto s = solve(p);
        REQUIRE(s.status == QpStatus::Optimal);
        CHECK(s.k(0) == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(s.k(1) == doctest::Approx(3.0).epsilon(1e-6));
    }
}

TEST_CASE("problem validation") {
    auto p = make(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), {{{1, 0, 1}}});
    SUBCASE("asymmetric hessian") {
        p.hessian(0, 1) = 1.0;
        CHECK_THROWS_AS(solve(p), Error);
    }
    SUBCASE("nan") {
        p.linear(0) = NAN;
        CHECK_THROWS_AS(solve(p), Error);
    }
    SUBCASE("no rows") {
        p.constraint_matrix.resize(0, 2);
        p.constraint_rhs.resize(0);
        CHECK_THROWS_AS(solve(p), Error);
    }
    SUBCASE("grid resolution") {
        CHECK_THROWS_AS(grid_oracle(p, {-1, -1}, {1, 1}, 1), Error);
    }
}

TEST_CASE("build_problem") {
    GuidanceConfig cfg;
    cfg.L_d = kPi / 15.0;
    UavState s;
    const auto g = angles(0.3, 0.3);
    REQUIRE(g.sin_theta == doctest::Approx(std::sqrt(0.5)));
    const LosRates r{};

    SUBCASE("first tick") {
        const auto b = build_problem(g, s, cfg, r, std::nullopt, 0.1);
        CHECK(b.first_tick);
        REQUIRE(b.problem.rows() == 5);
        CHECK(b.problem.hessian.isApprox(1e-8 * Eigen::Matrix2d::Identity()));
        CHECK(b.problem.linear.isZero());
        CHECK(b.map.A(0, 0) == doctest::Approx(25.0 * std::sqrt(2.0)));
        CHECK(b.map.A(1, 1) == doctest::Approx(25.0 * std::sqrt(2.0)));
        CHECK(b.map.A(0, 1) == 0.0);
        CHECK(b.problem.constraint_rhs(4) == doctest::Approx(-1.1 * kPi / 15.0));
        CHECK(b.problem.constraint_matrix(4, 0) == -1.0);
        CHECK(b.problem.constraint_matrix(4, 1) == -1.0);
        CHECK(b.map.b(0) == doctest::Approx(25.0 * std::sin(0.3)));
        CHECK(b.map.b(1) == doctest::Approx(25.0 * std::sin(0.3) + 9.81));
        CHECK(b.problem.constraint_rhs(0) == doctest::Approx(25.0 - b.map.b(0)));
        CHECK(b.problem.constraint_rhs(3) == doctest::Approx(b.map.b(1) + 14.12));
    }
    SUBCASE("no disturbance") {
        cfg.L_d = 0.0;
        const auto b = build_problem(g, s, cfg, r, std::nullopt, 0.1);
        CHECK(b.problem.constraint_rhs(4) == 0.0);
    }
    SUBCASE("rate rows") {
        const auto first = build_problem(g, s, cfg, r, std::nullopt, 0.1);
        const auto b = build_problem(angles(0.25, 0.35), s, cfg, r, first.map, 0.1);
        CHECK_FALSE(b.first_tick);
        REQUIRE(b.problem.rows() == 9);
        const Eigen::Matrix2d dA = b.map.A - first.map.A;
        const Eigen::Vector2d db = b.map.b - first.map.b;
        CHECK(b.problem.constraint_matrix.middleRows<2>(4).isApprox(dA));
        CHECK(b.problem.constraint_rhs(4) == doctest::Approx(4.0 - db(0)));
        CHECK(b.problem.constraint_rhs(7) == doctest::Approx(db(1) + 4.0));
        CHECK(b.problem.hessian.isApprox(0.1 * dA.transpose() * dA + 1e-8 * Eigen::Matrix2d::Identity()));
        CHECK(b.problem.linear.isApprox(0.1 * dA.transpose() * db));
    }
    SUBCASE("singular theta") {
        CHECK_THROWS_AS(build_problem(angles(0.3, 0.0), s, cfg, r, std::nullopt, 0.1), Error);
        CHECK_THROWS_AS(build_problem(angles(0.0, 0.0), s, cfg, r, std::nullopt, 0.1), Error);
        try {
            build_problem(angles(0.0, 0.3), s, cfg, r, std::nullopt, 0.1);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SingularTheta);
        }
    }
    SUBCASE("dt") {
        CHECK_THROWS_AS(build_problem(g, s, cfg, r, std::nullopt, 0.0), Error);
    }
}

TEST_CASE("kkt residuals and gap history on gain problems") {
    std::mt19937_64 rng(7);
    int optimal = 0;
    for (int n = 0; n < 200; ++n) {
        const QpProblem p = random_gain_problem(rng);
        const auto s = solve(p);
        if (s.status != QpStatus::Optimal) continue;
        ++optimal;
        const double scale = 1.0 + p.constraint_matrix.cwiseAbs().maxCoeff();
        const auto r = kkt_residuals(p, s);
        CHECK(r.stationarity < 1e-7 * scale);
        CHECK(r.primal < 1e-7 * scale);
        CHECK(r.dual < 1e-7);
        CHECK(r.complementarity < 1e-7 * scale);
        for (std::size_t i = 1; i < s.gap_history.size(); ++i) CHECK(s.gap_history[i] <= s.gap_history[i - 1]);
    }
    CHECK(optimal > 50);
    QpSolution bare;
    CHECK_THROWS_AS(kkt_residuals(make(Eigen::Matrix2d::Identity(), {0, 0}, {{{1, 0, 1}}}), bare), Error);
}

TEST_CASE("solution is invariant to scaling the objective") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 50; ++n) {
        QpProblem p = random_gain_problem(rng);
        const auto a = solve(p);
        p.hessian *= 10.0;
        p.linear *= 10.0;
        const auto b = solve(p);
        REQUIRE(a.status == b.status);
        if (a.status != QpStatus::Optimal) continue;
        CHECK(std::abs(b.objective - 10.0 * a.objective) <= 1e-6 * (1.0 + std::abs(10.0 * a.objective)));
    }
}

TEST_CASE("solver agrees with the active-set oracle") {
    std::mt19937_64 rng(3);
    int infeasible = 0;
    for (int n = 0; n < 300; ++n) {
        const QpProblem p = random_gain_problem(rng);
        const auto s = solve(p);
        const auto o = brute_force_oracle(p);
        REQUIRE(s.status == o.status);
        if (o.status == QpStatus::Infeasible) {
            ++infeasible;
            continue;
        }
        CHECK(std::abs(s.objective - o.objective) <= 1e-6 * (1.0 + std::abs(o.objective)));
    }
    CHECK(infeasible < 300);
}

TEST_CASE("active-set oracle agrees with a grid search") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 40; ++n) {
        Eigen::Matrix2d L;
        L << 1.0 + u(rng), 0.0, u(rng), 1.0 + u(rng);
        QpProblem p;
        p.hessian = L * L.transpose() + 0.1 * Eigen::Matrix2d::Identity();
        p.linear = Eigen::Vector2d(2.0 * u(rng), 2.0 * u(rng));
        p.constraint_matrix.resize(4, 2);
        p.constraint_rhs.resize(4);
        for (int i = 0; i < 4; ++i) {
            p.constraint_matrix(i, 0) = u(rng);
            p.constraint_matrix(i, 1) = u(rng);
            p.constraint_rhs(i) = 0.5 + u(rng);
        }
        const auto o = brute_force_oracle(p);
        const auto g = grid_oracle(p, {-3, -3}, {3, 3}, 601);
        if (o.status != QpStatus::Optimal || std::abs(o.k(0)) > 2.9 || std::abs(o.k(1)) > 2.9) continue;
        REQUIRE(g.status == QpStatus::Optimal);
        // The grid can only do worse, by at most the objective change over one cell.
        CHECK(g.objective >= o.objective - 1e-9);
        CHECK(g.objective - o.objective < 0.05);
        const auto s = solve(p);
        CHECK(s.objective == doctest::Approx(o.objective).epsilon(1e-6).scale(1.0));
    }
}
