#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cadence/odeint.hpp"

using namespace cadence;
using namespace cadence::ode;

namespace {

const VectorField zero_field = [](VecView z, double, MutVecView dz) {
    for (std::size_t d = 0; d < z.size(); ++d) dz[d] = 0.0;
};

const VectorField exp_field = [](VecView z, double, MutVecView dz) {
    dz[0] = z[0];
};

const VectorField harmonic = [](VecView z, double, MutVecView dz) {
    dz[0] = z[1];
    dz[1] = -z[0];
};

} // namespace

TEST_CASE("zero field keeps the state constant at every reported time") {
    IntegrationSpec spec;
    spec.t_start = 0.0;
    spec.t_end = 3.0;
    spec.step_count = 30;
    spec.dense_output_times = {0.5, 1.0, 2.5, 3.0};
    const std::vector<double> z0{1.5, -2.0};
    auto out = integrate(zero_field, z0, spec);
    REQUIRE(out.size() == 4);
    for (const auto& ts : out) {
        CHECK(ts.state[0] == 1.5);
        CHECK(ts.state[1] == -2.0);
    }
}

TEST_CASE("dz/dt = z reproduces e within 1e-8 at 100 fixed steps") {
    IntegrationSpec spec{0.0, 1.0, 100, std::nullopt, {}};
    auto out = integrate(exp_field, std::vector<double>{1.0}, spec);
    CHECK(std::abs(out.back().state[0] - std::exp(1.0)) < 1e-8);
}

TEST_CASE("harmonic oscillator returns to start after one period") {
    IntegrationSpec spec{0.0, 2.0 * M_PI, 1000, std::nullopt, {}};
    auto out = integrate(harmonic, std::vector<double>{1.0, 0.0}, spec);
    CHECK(std::abs(out.back().state[0] - 1.0) < 1e-6);
    CHECK(std::abs(out.back().state[1]) < 1e-6);
}

TEST_CASE("order probe shows fourth-order convergence") {
    const std::vector<double> z0{1.0};
    double e100 = order_probe(exp_field, z0, 1.0, 100);
    double e200 = order_probe(exp_field, z0, 1.0, 200);
    CHECK(e100 / e200 > 12.0);
    CHECK(e100 / e200 < 20.0);

    const std::vector<double> h0{1.0, 0.0};
    double h100 = order_probe(harmonic, h0, 2.0, 100);
    double h200 = order_probe(harmonic, h0, 2.0, 200);
    CHECK(h100 / h200 > 12.0);
    CHECK(h100 / h200 < 20.0);
}

TEST_CASE("order probe on the zero field is exactly zero") {
    CHECK(order_probe(zero_field, std::vector<double>{2.0, 3.0}, 5.0, 10) == 0.0);
}

TEST_CASE("backward integration supported and inverts forward") {
    IntegrationSpec fwd{0.0, 2.0, 400, std::nullopt, {}};
    auto mid = integrate(harmonic, std::vector<double>{1.0, 0.0}, fwd);
    IntegrationSpec bwd{2.0, 0.0, 400, std::nullopt, {}};
    auto back = integrate(harmonic, mid.back().state, bwd);
    const double one_way = order_probe(harmonic, std::vector<double>{1.0, 0.0}, 2.0, 400);
    CHECK(std::abs(back.back().state[0] - 1.0) < 10.0 * one_way + 1e-14);
    CHECK(std::abs(back.back().state[1] - 0.0) < 10.0 * one_way + 1e-14);
}

TEST_CASE("adaptive mode agrees with a fine fixed-step run") {
    const double tol = 1e-8;
    IntegrationSpec ad{0.0, 5.0, 0, tol, {}};
    IntegrationSpec fine{0.0, 5.0, 20000, std::nullopt, {}};
    for (const auto* f : {&exp_field, &harmonic}) {
        std::vector<double> z0 = (f == &exp_field) ? std::vector<double>{1.0}
                                                   : std::vector<double>{1.0, 0.0};
        auto a = integrate(*f, z0, ad);
        auto b = integrate(*f, z0, fine);
        for (std::size_t d = 0; d < z0.size(); ++d)
            CHECK(std::abs(a.back().state[d] - b.back().state[d]) <
                  10.0 * tol * (1.0 + std::abs(b.back().state[d])));
    }
}

TEST_CASE("divergence raises an error carrying the last valid time") {
    const VectorField blowup = [](VecView z, double, MutVecView dz) {
        dz[0] = z[0] * z[0];
    };
    IntegrationSpec spec{0.0, 3.0, 3000, std::nullopt, {}};
    try {
        integrate(blowup, std::vector<double>{1.0}, spec);
        FAIL("expected DivergedError");
    } catch (const DivergedError& e) {
        CHECK(e.last_valid_time > 0.0);
        CHECK(e.last_valid_time < 3.0);
    }
}

TEST_CASE("dense output times must lie inside the interval and be sorted") {
    IntegrationSpec spec{0.0, 1.0, 10, std::nullopt, {0.5, 0.2}};
    CHECK_THROWS_AS(integrate(zero_field, std::vector<double>{0.0}, spec),
                    InvalidArgumentError);
    spec.dense_output_times = {1.5};
    CHECK_THROWS_AS(integrate(zero_field, std::vector<double>{0.0}, spec),
                    InvalidArgumentError);
}

TEST_CASE("backward dense output on the reversed interval") {
    IntegrationSpec spec{1.0, 0.0, 100, std::nullopt, {0.7, 0.3, 0.0}};
    auto out = integrate(exp_field, std::vector<double>{std::exp(1.0)}, spec);
    REQUIRE(out.size() == 3);
    CHECK(std::abs(out[0].state[0] - std::exp(0.7)) < 1e-8);
    CHECK(std::abs(out[2].state[0] - 1.0) < 1e-8);
}
