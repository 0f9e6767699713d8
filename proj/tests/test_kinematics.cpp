#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rllp/error.hpp"
#include "rllp/kinematics.hpp"

using namespace rllp;
using namespace rllp::kinematics;

namespace {

UavState level(double chi = 0.0) {
    UavState s;
    s.chi = chi;
    return s;
}

double state_error(const UavState& a, const UavState& b) {
    return std::abs(a.x_p - b.x_p) + std::abs(a.y_p - b.y_p) + std::abs(a.z_p - b.z_p) +
           std::abs(wrap_angle(a.chi - b.chi)) + std::abs(a.gamma - b.gamma);
}

}  // namespace

TEST_CASE("gravity-compensated level flight goes straight") {
    const UavState s = step(level(), {0.0, kGravity}, {}, 0.1);
    CHECK(s.x_p == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(std::abs(s.y_p) < 1e-12);
    CHECK(std::abs(s.z_p) < 1e-12);
    CHECK(std::abs(s.chi) < 1e-12);
    CHECK(std::abs(s.gamma) < 1e-12);
}

TEST_CASE("constant track-rate disturbance matches the closed-form turn") {
    const UavState s = step(level(), {0.0, kGravity}, {0.1, 0.0}, 0.1);
    const auto ref = oracle::level_turn(25.0, 0.1, 0.1);
    CHECK(s.chi == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(s.y_p == doctest::Approx(0.0125).epsilon(1e-4));
    CHECK(std::abs(s.x_p - ref.x) < 1e-9);
    CHECK(std::abs(s.y_p - ref.y) < 1e-9);
}

TEST_CASE("longer turn still tracks the closed form") {
    UavState s = level();
    for (int i = 0; i < 100; ++i) s = step(s, {0.0, kGravity}, {0.3, 0.0}, 0.1);
    const auto ref = oracle::level_turn(25.0, 0.3, 10.0);
    CHECK(std::abs(s.x_p - ref.x) < 1e-6);
    CHECK(std::abs(s.y_p - ref.y) < 1e-6);
    CHECK(std::abs(wrap_angle(s.chi - ref.chi)) < 1e-12);
}

TEST_CASE("tiny step is continuous") {
    UavState s;
    s.x_p = 10.0;
    s.y_p = -4.0;
    s.z_p = 100.0;
    s.chi = 0.7;
    s.gamma = 0.1;
    const UavState out = step(s, {3.0, 11.0}, {0.05, -0.02}, 1e-9);
    CHECK(state_error(s, out) < 1e-7);
    CHECK(out.z_p == doctest::Approx(s.z_p).epsilon(1e-9));
}

TEST_CASE("non-positive dt is rejected") {
    CHECK_THROWS_AS(step(level(), {0.0, kGravity}, {}, 0.0), Error);
    CHECK_THROWS_AS(step(level(), {0.0, kGravity}, {}, -0.1), Error);
}

TEST_CASE("vertical flight raises DegenerateGamma") {
    UavState s;
    s.gamma = kPi / 2.0;
    try {
        step(s, {0.0, 0.0}, {}, 0.1);
        FAIL("expected DegenerateGamma");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateGamma);
    }
}

TEST_CASE("chi stays wrapped") {
    UavState s = level(kPi - 0.001);
    s = step(s, {0.0, kGravity}, {0.1, 0.0}, 0.1);
    CHECK(s.chi > -kPi);
    CHECK(s.chi <= kPi);
    CHECK(s.chi == doctest::Approx(-kPi + 0.009).epsilon(1e-9));
}

TEST_CASE("speed is preserved on any trajectory") {
    UavState s;
    s.gamma = 0.2;
    for (int i = 0; i < 50; ++i) {
        const UavState before = s;
        s = step(s, {5.0 * std::sin(0.3 * i), kGravity + 2.0 * std::cos(0.2 * i)}, {0.02, -0.01}, 0.1);
        const double rate = distance(before.position(), s.position()) / 0.1;
        CHECK(rate <= 25.0 + 1e-9);
        const StateRate d = derivative(s, {1.0, 2.0}, {});
        CHECK(std::hypot(d.x_dot, d.y_dot, d.z_dot) == doctest::Approx(25.0).epsilon(1e-13));
    }
}

TEST_CASE("rk4 converges at fourth order") {
    UavState s;
    s.chi = 0.4;
    s.gamma = 0.3;
    const AccelCommand cmd{18.0, -6.0};
    const DisturbanceSample dist{0.2, -0.15};
    const double dt = 1.0;
    const UavState ref = step(s, cmd, dist, dt, 40);
    const double e1 = state_error(step(s, cmd, dist, dt, 1), ref);
    const double e2 = state_error(step(s, cmd, dist, dt, 2), ref);
    const double e4 = state_error(step(s, cmd, dist, dt, 4), ref);
    CHECK(e1 / e2 >= 8.0);
    CHECK(e2 / e4 >= 8.0);
}

TEST_CASE("attitude conversion") {
    SUBCASE("pure vertical") {
        const AttitudeCommand a = command_to_attitude({0.0, 9.81});
        CHECK(a.a_bzc == doctest::Approx(9.81));
        CHECK(a.phi_c == doctest::Approx(kPi / 2.0));
    }
    SUBCASE("diagonal") {
        const AttitudeCommand a = command_to_attitude({9.81, 9.81});
        CHECK(a.a_bzc == doctest::Approx(9.81 * std::sqrt(2.0)).epsilon(1e-14));
        CHECK(a.phi_c == doctest::Approx(kPi / 4.0).epsilon(1e-14));
    }
    SUBCASE("zero command") {
        try {
            command_to_attitude({0.0, 0.0});
            FAIL("expected ZeroCommand");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ZeroCommand);
        }
    }
    SUBCASE("out of range") {
        try {
            command_to_attitude({25.0, 25.0});
            FAIL("expected AttitudeOutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AttitudeOutOfRange);
        }
    }
    SUBCASE("round trip") {
        Rng rng(7);
        for (int i = 0; i < 1000; ++i) {
            const AccelCommand c{50.0 * uniform01(rng) - 25.0, 28.24 * uniform01(rng) - 14.12};
            if (std::hypot(c.a_yc, c.a_zc) > 30.0 || std::hypot(c.a_yc, c.a_zc) < 1e-3) continue;
            const AccelCommand back = attitude_to_command(command_to_attitude(c));
            CHECK(std::abs(back.a_yc - c.a_yc) < 1e-12);
            CHECK(std::abs(back.a_zc - c.a_zc) < 1e-12);
        }
    }
}

TEST_CASE("disturbance sampling") {
    SUBCASE("zero bound gives zero") {
        Rng rng(1);
        for (int i = 0; i < 100; ++i) {
            const DisturbanceSample d = sample_disturbance(rng, 0.0);
            CHECK(d.d_chi == 0.0);
            CHECK(d.d_gamma == 0.0);
        }
    }
    SUBCASE("joint bound holds in both modes") {
        Rng rng(3);
        for (auto mode : {DisturbanceMode::Box, DisturbanceMode::StdMatched}) {
            for (int i = 0; i < 20000; ++i) {
                const DisturbanceSample d = sample_disturbance(rng, kPi / 15.0, mode);
                CHECK(std::hypot(d.d_chi, d.d_gamma) <= kPi / 15.0 * (1.0 + 1e-15));
            }
        }
    }
    SUBCASE("box moments at seed 42") {
        Rng rng(42);
        std::vector<double> chi, gamma;
        for (int i = 0; i < 100000; ++i) {
            const DisturbanceSample d = sample_disturbance(rng, 1.0);
            chi.push_back(d.d_chi);
            gamma.push_back(d.d_gamma);
        }
        const double expected = oracle::uniform_std(1.0 / std::sqrt(2.0));
        CHECK(expected == doctest::Approx(1.0 / std::sqrt(6.0)));
        for (const auto* v : {&chi, &gamma}) {
            const auto st = oracle::population_stats(*v);
            CHECK(std::abs(st.mean) < 0.01);
            CHECK(std::abs(st.std - expected) < 0.01);
        }
    }
    SUBCASE("stream position does not depend on the bound") {
        Rng a(9), b(9);
        sample_disturbance(a, 0.0);
        sample_disturbance(b, 0.5);
        CHECK(a() == b());
    }
    SUBCASE("deterministic in the seed") {
        Rng a(11), b(11);
        for (int i = 0; i < 10; ++i) {
            const auto x = sample_disturbance(a, 0.3);
            const auto y = sample_disturbance(b, 0.3);
            CHECK(x.d_chi == y.d_chi);
            CHECK(x.d_gamma == y.d_gamma);
        }
    }
    SUBCASE("negative bound rejected") {
        Rng rng(1);
        CHECK_THROWS_AS(sample_disturbance(rng, -0.1), Error);
    }
}
