#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phaseslide/errors.hpp"
#include "phaseslide/potentials.hpp"

using namespace phaseslide;

namespace {

// inverse of beta; well conditioned even where J_eps(r) is within rounding of +-1
double beta_inverse(const PotentialSpec& p, double b) {
    return p.kind == PotentialKind::regular ? std::cbrt(b) : std::tanh(0.5 * b);
}

// golden section on the convex Moreau objective
double moreau_oracle(const PotentialSpec& p, double eps, double r) {
    auto obj = [&](double y) { return beta_hat(p, y) + (r - y) * (r - y) / (2.0 * eps); };
    double a = r - 10.0, b = r + 10.0;
    if (p.kind != PotentialKind::regular) {
        a = -1.0 + 1e-15;
        b = 1.0 - 1e-15;
        if (p.kind == PotentialKind::obstacle) a = -1.0, b = 1.0;
    }
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int k = 0; k < 300; ++k) {
        if (obj(c) < obj(d)) b = d; else a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return obj(0.5 * (a + b));
}

const PotentialSpec kPots[] = {make_regular_potential(), make_logarithmic_potential(1.5),
                               make_obstacle_potential(1.0)};

} // namespace

TEST_CASE("potential kinds parse and print") {
    CHECK(potential_kind_from_string("regular") == PotentialKind::regular);
    CHECK(potential_kind_from_string("logarithmic") == PotentialKind::logarithmic);
    CHECK(potential_kind_from_string("obstacle") == PotentialKind::obstacle);
    CHECK(to_string(PotentialKind::obstacle) == "obstacle");
    CHECK_THROWS_AS(potential_kind_from_string("quartic"), ConfigError);
}

TEST_CASE("constructor constraints on c0") {
    CHECK_THROWS_AS(make_logarithmic_potential(1.0), ConfigError);
    CHECK_THROWS_AS(make_obstacle_potential(0.0), ConfigError);
    CHECK_NOTHROW(make_logarithmic_potential(1.01));
}

TEST_CASE("smooth part and its Lipschitz constant") {
    const auto reg = make_regular_potential();
    CHECK(pi_smooth(reg, 0.3) == doctest::Approx(-0.3));
    CHECK(pi_hat(reg, 0.0) == doctest::Approx(0.25));
    CHECK(reg.lipschitz_pi() == 1.0);
    const auto obs = make_obstacle_potential(2.0);
    CHECK(pi_smooth(obs, 0.5) == doctest::Approx(-2.0));
    CHECK(pi_prime(obs, 0.1) == doctest::Approx(-4.0));
    CHECK(obs.lipschitz_pi() == 4.0);
    // regular double well: F(+-1) = 0
    CHECK(beta_hat(reg, 1.0) + pi_hat(reg, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("minimal section") {
    const auto obs = make_obstacle_potential(1.0);
    CHECK(beta_min_section(obs, 0.3) == 0.0);
    CHECK(beta_min_section(obs, 1.0) == 0.0);
    CHECK(beta_min_section(obs, -1.0) == 0.0);
    CHECK_THROWS_AS(beta_min_section(obs, 1.0001), DomainError);
    const auto lg = make_logarithmic_potential(1.5);
    CHECK(beta_min_section(lg, 0.5) == doctest::Approx(std::log(3.0)));
    CHECK_THROWS_AS(beta_min_section(lg, 1.0), DomainError);
    CHECK(beta_min_section(make_regular_potential(), -2.0) == doctest::Approx(-8.0));
    CHECK(std::isinf(beta_hat(obs, 1.5)));
    CHECK(beta_hat(lg, 1.0) == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("resolvent solves y + eps beta(y) = r") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ur(-5.0, 5.0), ue(1e-3, 1.0);
    for (const auto& p : kPots) {
        for (int k = 0; k < 300; ++k) {
            const double r = ur(rng), eps = ue(rng);
            const double y = resolvent(p, eps, r);
            if (p.kind == PotentialKind::obstacle) {
                CHECK(y == std::clamp(r, -1.0, 1.0));
            } else {
                const double b = yosida_beta(p, eps, r);
                CHECK(beta_inverse(p, b) + eps * b == doctest::Approx(r).epsilon(1e-10));
                CHECK(std::abs(y - (r - eps * b)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("yosida examples") {
    const auto obs = make_obstacle_potential(1.0);
    CHECK(yosida_beta(obs, 0.1, 0.5) == 0.0);
    CHECK(yosida_beta(obs, 0.1, 1.5) == doctest::Approx(5.0));
    CHECK(yosida_beta(obs, 0.1, -1.2) == doctest::Approx(-2.0));
    CHECK(beta_hat_eps(obs, 0.1, 1.5) == doctest::Approx(0.25 / 0.2));
    CHECK(yosida_beta_prime(obs, 0.1, 1.0) == 0.0);
    CHECK(yosida_beta_prime(obs, 0.1, 1.2) == doctest::Approx(10.0));
}

TEST_CASE("yosida derivative matches finite differences") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ur(-3.0, 3.0);
    for (const auto& p : kPots) {
        for (double eps : {0.01, 0.1, 0.5}) {
            for (int k = 0; k < 100; ++k) {
                const double r = ur(rng), h = 1e-6;
                if (p.kind == PotentialKind::obstacle && std::abs(std::abs(r) - 1.0) < 1e-4) continue;
                const double fd = (yosida_beta(p, eps, r + h) - yosida_beta(p, eps, r - h)) / (2 * h);
                CHECK(yosida_beta_prime(p, eps, r) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
}

TEST_CASE("Moreau envelope: matches direct minimization, derivative is beta_eps") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ur(-2.5, 2.5);
    for (const auto& p : kPots) {
        for (double eps : {0.02, 0.2}) {
            for (int k = 0; k < 40; ++k) {
                const double r = ur(rng);
                CHECK(beta_hat_eps(p, eps, r) == doctest::Approx(moreau_oracle(p, eps, r)).epsilon(1e-8).scale(1.0));
                const double h = 1e-5;
                const double fd = (beta_hat_eps(p, eps, r + h) - beta_hat_eps(p, eps, r - h)) / (2 * h);
                CHECK(yosida_beta(p, eps, r) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
}

TEST_CASE("regularization inequalities hold exactly") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ur(-3.0, 3.0), ue(1e-4, 1.0);
    int bad = 0;
    for (int k = 0; k < 3000; ++k) {
        const auto& p = kPots[k % 3];
        const double eps = ue(rng), r = ur(rng);
        bad += !(abs_eps(eps, r) >= 0.0 && abs_eps(eps, r) <= std::abs(r));
        if (p.in_domain(r)) bad += !(std::abs(yosida_beta(p, eps, r)) <= std::abs(beta_min_section(p, r)));
        bad += !(beta_hat_eps(p, eps, r) <= beta_hat(p, r));
    }
    CHECK(bad == 0);
}

TEST_CASE("yosida regularization is monotone and 1/eps Lipschitz") {
    for (const auto& p : kPots) {
        const double eps = 0.05;
        double prev_r = -3.0, prev = yosida_beta(p, eps, prev_r);
        for (int k = 1; k <= 600; ++k) {
            const double r = -3.0 + 6.0 * k / 600;
            const double v = yosida_beta(p, eps, r);
            CHECK(v >= prev);
            CHECK(v - prev <= (r - prev_r) / eps + 1e-9);
            prev = v;
            prev_r = r;
        }
    }
}

TEST_CASE("sign_eps, abs_eps, clamp") {
    CHECK(sign_eps(0.1, 0.05) == doctest::Approx(0.5));
    CHECK(sign_eps(0.1, -2.0) == -1.0);
    CHECK(sign_eps(0.1, 0.0) == 0.0);
    CHECK(sign_eps_prime(0.1, 0.05) == doctest::Approx(10.0));
    CHECK(sign_eps_prime(0.1, 0.1) == 0.0);
    CHECK(sign_eps_prime(0.1, 0.3) == 0.0);
    CHECK(abs_eps(0.1, 0.05) == doctest::Approx(0.0125));
    CHECK(abs_eps(0.1, -1.0) == doctest::Approx(0.95));
    CHECK(clamp_Ieps(0.5, 3.0) == 2.0);
    CHECK(clamp_Ieps(0.5, -3.0) == -2.0);
    CHECK(clamp_Ieps(0.5, 1.0) == 1.0);
    for (double r = -1.0; r <= 1.0; r += 0.013) {
        const double h = 1e-7;
        CHECK(sign_eps(0.2, r) == doctest::Approx((abs_eps(0.2, r + h) - abs_eps(0.2, r - h)) / (2 * h)).epsilon(1e-6));
    }
}
