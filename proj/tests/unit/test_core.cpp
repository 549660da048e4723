#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phaseslide/core.hpp"
#include "phaseslide/potentials.hpp"

using namespace phaseslide;

TEST_CASE("build_grid: node counts, spacing, measure") {
    const Grid g = build_grid(1, {256}, {1.0});
    CHECK(g.node_count() == 257);
    CHECK(g.spacing[0] == doctest::Approx(1.0 / 256));
    CHECK(g.measure == doctest::Approx(1.0));

    const Grid g2 = build_grid(2, {8, 4}, {2.0, 1.0});
    CHECK(g2.nodes(0) == 9);
    CHECK(g2.nodes(1) == 5);
    CHECK(g2.node_count() == 45);
    CHECK(g2.measure == doctest::Approx(2.0));
    CHECK(g2.spacing[0] == doctest::Approx(0.25));
    CHECK(g2.spacing[1] == doctest::Approx(0.25));
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(3, {8, 8, 8}, {1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(build_grid(1, {3}, {1.0}), ConfigError);
    CHECK_THROWS_AS(build_grid(1, {8}, {0.0}), ConfigError);
    CHECK_THROWS_AS(build_grid(1, {8}, {-1.0}), ConfigError);
    CHECK_THROWS_AS(build_grid(2, {8}, {1.0}), ConfigError);
}

TEST_CASE("index helpers round trip") {
    const Grid g = build_grid(2, {6, 5}, {1.0, 1.0});
    for (std::size_t k = 0; k < g.node_count(); ++k) CHECK(g.index(g.ix(k), g.jy(k)) == k);
    CHECK(g.boundary_nodes().size() == 2 * 7 + 2 * 6 - 4);
    CHECK(build_grid(1, {10}, {1.0}).boundary_nodes().size() == 2);
    CHECK(g.is_boundary(0));
    CHECK_FALSE(g.is_boundary(g.index(1, 1)));
}

TEST_CASE("quadrature weights sum to the measure and integrate bilinear fields exactly") {
    for (const Grid& g : {build_grid(1, {17}, {2.5}), build_grid(2, {7, 9}, {1.5, 0.5})}) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.node_count(); ++k) s += g.weight(k);
        CHECK(s == doctest::Approx(g.measure).epsilon(1e-14));
        const auto f = ScalarField::sample(g, [](double x, double y) { return 1.0 + 2.0 * x + 3.0 * x * y; });
        const double lx = g.extent[0], ly = g.dim == 2 ? g.extent[1] : 1.0;
        const double exact = g.dim == 2 ? lx * ly + lx * lx * ly + 0.75 * lx * lx * ly * ly : lx + lx * lx;
        CHECK(integral(f) == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("quadrature converges at second order on a smooth integrand") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const Grid g = build_grid(1, {n}, {1.0});
        const double err = std::abs(integral(ScalarField::sample(g, [](double x, double) { return std::exp(x); })) -
                                    (std::exp(1.0) - 1.0));
        if (prev > 0.0) CHECK(std::log2(prev / err) > 1.95);
        prev = err;
    }
}

TEST_CASE("field arithmetic and norms") {
    const Grid g = build_grid(1, {4}, {1.0});
    ScalarField a(g, 2.0), b(g, -3.0);
    CHECK(sup_norm(a - b) == 5.0);
    CHECK(sup_norm(2.0 * b) == 6.0);
    CHECK(l2_norm(a) == doctest::Approx(2.0));
    CHECK(inner(a, b) == doctest::Approx(-6.0));
    a += b;
    CHECK(a.max() == -1.0);
    CHECK(a.min() == -1.0);
    CHECK(a.all_finite());
    a[2] = NAN;
    CHECK_FALSE(a.all_finite());
}

TEST_CASE("fields on different grids do not mix") {
    ScalarField a(build_grid(1, {4}, {1.0}));
    ScalarField b(build_grid(1, {8}, {1.0}));
    CHECK_THROWS_AS(a + b, GridMismatch);
    CHECK_THROWS_AS(inner(a, b), GridMismatch);
    CHECK_THROWS_AS(ScalarField(build_grid(1, {4}, {1.0}), std::vector<double>(3)), GridMismatch);
}

TEST_CASE("make_time_config") {
    const TimeConfig t = make_time_config(1.0, 1e-3);
    CHECK(t.steps == 1000);
    CHECK(make_time_config(0.2, 0.05).steps == 4);
    CHECK_THROWS_AS(make_time_config(1.0, 0.3), ConfigError);
    CHECK_THROWS_AS(make_time_config(0.0, 0.1), ConfigError);
    CHECK_THROWS_AS(make_time_config(1.0, -0.1), ConfigError);
}

TEST_CASE("validate_initial_data") {
    const Grid g = build_grid(1, {8}, {1.0});
    const ScalarField sigma(g, 0.5);
    const ScalarField target(g, -0.9);

    SUBCASE("reference data is admissible") {
        ScalarField phi = ScalarField::sample(g, [](double x, double) { return 0.9 - 1.8 * x; });
        CHECK(validate_initial_data(phi, sigma, target, make_obstacle_potential(1.0)).ok());
    }
    SUBCASE("obstacle: phi0 outside [-1, 1]") {
        ScalarField phi(g, 0.0);
        phi[3] = 1.2;
        const auto r = validate_initial_data(phi, sigma, target, make_obstacle_potential(1.0));
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].field == "phi0");
        CHECK(r.violations[0].node == 3);
    }
    SUBCASE("obstacle: phi0 = 1 is allowed, target = 1 is not") {
        ScalarField phi(g, 1.0);
        const auto r = validate_initial_data(phi, sigma, ScalarField(g, 1.0), make_obstacle_potential(1.0));
        CHECK(r.violations.size() == g.node_count());
        for (const auto& v : r.violations) CHECK(v.field == "phistar");
    }
    SUBCASE("logarithmic: margin away from +-1") {
        ScalarField phi(g, 0.0);
        phi[0] = 1.0 - 1e-9;
        CHECK_FALSE(validate_initial_data(phi, sigma, target, make_logarithmic_potential(1.5), 1e-6).ok());
        phi[0] = 1.0 - 1e-3;
        CHECK(validate_initial_data(phi, sigma, target, make_logarithmic_potential(1.5), 1e-6).ok());
    }
    SUBCASE("regular: anything finite") {
        ScalarField phi(g, 7.0);
        CHECK(validate_initial_data(phi, sigma, ScalarField(g, 3.0), make_regular_potential()).ok());
    }
    SUBCASE("non-finite sigma0") {
        ScalarField s(g, 0.5);
        s[1] = INFINITY;
        const auto r = validate_initial_data(ScalarField(g), s, target, make_obstacle_potential(1.0));
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].field == "sigma0");
        CHECK(r.summary().find("sigma0[1]") != std::string::npos);
    }
}
