#include "phaseslide/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phaseslide/errors.hpp"

namespace phaseslide {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualTol = 1e-12;
constexpr int kMaxIter = 100;

/// Root of an increasing function f on [lo, hi] with f(lo) <= 0 <= f(hi).
/// Newton steps, falling back to bisection whenever a step leaves the bracket.
template <class F, class DF>
double bracketed_newton(F f, DF df, double lo, double hi, double x, double scale) {
    const double tol = kResidualTol * std::max(1.0, scale);
    for (int it = 0; it < kMaxIter; ++it) {
        const double fx = f(x);
        if (std::abs(fx) <= tol) return x;
        if (fx > 0.0) hi = x; else lo = x;
        double next = x - fx / df(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x || hi - lo <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            return next;
        x = next;
    }
    throw SolverError("scalar resolvent solve did not converge");
}

/// u with tanh(u) + 2 eps u = r, i.e. the logarithmic resolvent written as J = tanh(u).
double log_resolvent_u(double eps, double r) {
    if (r == 0.0) return 0.0;
    const double s = r > 0.0 ? 1.0 : -1.0;
    const double a = std::abs(r);
    auto f = [&](double u) { return std::tanh(u) + 2.0 * eps * u - a; };
    auto df = [&](double u) {
        const double e = std::exp(-2.0 * std::abs(u));
        return 4.0 * e / ((1.0 + e) * (1.0 + e)) + 2.0 * eps;
    };
    double lo = std::max(0.0, (a - 1.0) / (2.0 * eps));
    double hi = (a + 1.0) / (2.0 * eps);
    if (a < 1.0) hi = std::min(hi, std::atanh(a));
    double u = bracketed_newton(f, df, lo, hi, 0.5 * (lo + hi), a);
    // J(r) never exceeds r in modulus.
    if (a < 1.0) u = std::min(u, std::atanh(a));
    return s * std::max(u, 0.0);
}

/// beta_hat(tanh(u)) evaluated without forming 1 - tanh(u).
double log_beta_hat_of_u(double u) {
    const double au = std::abs(u);
    const double a = std::exp(-2.0 * au);
    return 2.0 * std::log(2.0) - 2.0 * std::log1p(a) - 4.0 * au * a / (1.0 + a);
}

double regular_resolvent(double eps, double r) {
    if (r == 0.0) return 0.0;
    const double s = r > 0.0 ? 1.0 : -1.0;
    const double a = std::abs(r);
    auto f = [&](double y) { return y + eps * y * y * y - a; };
    auto df = [&](double y) { return 1.0 + 3.0 * eps * y * y; };
    // Cube-root guess is accurate when eps y^3 dominates.
    const double guess = std::min(a, std::cbrt(a / eps));
    const double y = bracketed_newton(f, df, 0.0, a, guess, a);
    return s * std::clamp(y, 0.0, a);
}

} // namespace

std::string to_string(PotentialKind kind) {
    switch (kind) {
    case PotentialKind::regular: return "regular";
    case PotentialKind::logarithmic: return "logarithmic";
    case PotentialKind::obstacle: return "obstacle";
    }
    return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name) {
    if (name == "regular") return PotentialKind::regular;
    if (name == "logarithmic") return PotentialKind::logarithmic;
    if (name == "obstacle") return PotentialKind::obstacle;
    throw ConfigError("potential.kind", "unknown potential '" + name +
                                            "' (expected regular, logarithmic or obstacle)");
}

double PotentialSpec::domain_lower() const { return kind == PotentialKind::regular ? -kInf : -1.0; }
double PotentialSpec::domain_upper() const { return kind == PotentialKind::regular ? kInf : 1.0; }

bool PotentialSpec::in_domain(double r) const {
    switch (kind) {
    case PotentialKind::regular: return std::isfinite(r);
    case PotentialKind::logarithmic: return r > -1.0 && r < 1.0;
    case PotentialKind::obstacle: return r >= -1.0 && r <= 1.0;
    }
    return false;
}

PotentialSpec make_regular_potential() { return {PotentialKind::regular, 1.0}; }

PotentialSpec make_logarithmic_potential(double c0) {
    if (!(c0 > 1.0))
        throw ConfigError("potential.c0", "logarithmic potential needs c0 > 1 to form a double well");
    return {PotentialKind::logarithmic, c0};
}

PotentialSpec make_obstacle_potential(double c0) {
    if (!(c0 > 0.0)) throw ConfigError("potential.c0", "obstacle potential needs c0 > 0");
    return {PotentialKind::obstacle, c0};
}

double beta_hat(const PotentialSpec& pot, double r) {
    switch (pot.kind) {
    case PotentialKind::regular: return 0.25 * r * r * r * r;
    case PotentialKind::logarithmic: {
        const double a = std::abs(r);
        if (a > 1.0) return kInf;
        if (a == 1.0) return 2.0 * std::log(2.0);
        return (1.0 + a) * std::log1p(a) + (1.0 - a) * std::log1p(-a);
    }
    case PotentialKind::obstacle: return std::abs(r) <= 1.0 ? 0.0 : kInf;
    }
    return kInf;
}

double beta_min_section(const PotentialSpec& pot, double r) {
    auto fail = [&](const char* domain) {
        std::ostringstream os;
        os << "r = " << r << " is outside D(beta) = " << domain;
        throw DomainError(os.str());
    };
    switch (pot.kind) {
    case PotentialKind::regular:
        if (!std::isfinite(r)) fail("(-inf, inf)");
        return r * r * r;
    case PotentialKind::logarithmic:
        if (!(std::abs(r) < 1.0)) fail("(-1, 1)");
        return 2.0 * std::atanh(r);
    case PotentialKind::obstacle:
        // Minimal-modulus element of the normal cone, also at the endpoints.
        if (!(std::abs(r) <= 1.0)) fail("[-1, 1]");
        return 0.0;
    }
    return 0.0;
}

double beta_prime(const PotentialSpec& pot, double r) {
    switch (pot.kind) {
    case PotentialKind::regular: return 3.0 * r * r;
    case PotentialKind::logarithmic: return 2.0 / (1.0 - r * r);
    case PotentialKind::obstacle: return 0.0;
    }
    return 0.0;
}

double pi_hat(const PotentialSpec& pot, double r) {
    if (pot.kind == PotentialKind::regular) return 0.25 - 0.5 * r * r;
    return -pot.c0 * r * r;
}

double pi_smooth(const PotentialSpec& pot, double r) {
    if (pot.kind == PotentialKind::regular) return -r;
    return -2.0 * pot.c0 * r;
}

double pi_prime(const PotentialSpec& pot, double) {
    if (pot.kind == PotentialKind::regular) return -1.0;
    return -2.0 * pot.c0;
}

double resolvent(const PotentialSpec& pot, double eps, double r) {
    switch (pot.kind) {
    case PotentialKind::regular: return regular_resolvent(eps, r);
    case PotentialKind::logarithmic: return std::tanh(log_resolvent_u(eps, r));
    case PotentialKind::obstacle: return std::clamp(r, -1.0, 1.0);
    }
    return r;
}

double yosida_beta(const PotentialSpec& pot, double eps, double r) {
    switch (pot.kind) {
    case PotentialKind::regular: {
        const double y = regular_resolvent(eps, r);
        return y * y * y;
    }
    case PotentialKind::logarithmic: return 2.0 * log_resolvent_u(eps, r);
    case PotentialKind::obstacle: return (r - std::clamp(r, -1.0, 1.0)) / eps;
    }
    return 0.0;
}

double yosida_beta_prime(const PotentialSpec& pot, double eps, double r) {
    switch (pot.kind) {
    case PotentialKind::regular: {
        const double y = regular_resolvent(eps, r);
        const double d = 3.0 * y * y;
        return d / (1.0 + eps * d);
    }
    case PotentialKind::logarithmic: {
        // beta'(tanh u) = 2 cosh^2 u, so beta_eps' = 1 / (sech^2(u)/2 + eps).
        const double u = log_resolvent_u(eps, r);
        const double e = std::exp(-2.0 * std::abs(u));
        const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        return 1.0 / (0.5 * sech2 + eps);
    }
    case PotentialKind::obstacle: return std::abs(r) > 1.0 ? 1.0 / eps : 0.0;
    }
    return 0.0;
}

double beta_hat_eps(const PotentialSpec& pot, double eps, double r) {
    // The envelope is a minimum over y; y = r is always a candidate.
    const double at_r = beta_hat(pot, r);
    double at_j = 0.0;
    switch (pot.kind) {
    case PotentialKind::regular: {
        const double y = regular_resolvent(eps, r);
        const double b = y * y * y;
        at_j = 0.25 * y * y * y * y + 0.5 * eps * b * b;
        break;
    }
    case PotentialKind::logarithmic: {
        const double u = log_resolvent_u(eps, r);
        at_j = log_beta_hat_of_u(u) + 2.0 * eps * u * u;
        break;
    }
    case PotentialKind::obstacle: {
        const double d = r - std::clamp(r, -1.0, 1.0);
        at_j = d * d / (2.0 * eps);
        break;
    }
    }
    return std::max(0.0, std::min(at_j, at_r));
}

double sign_eps(double eps, double r) { return r / std::max(eps, std::abs(r)); }

double sign_eps_prime(double eps, double r) { return std::abs(r) < eps ? 1.0 / eps : 0.0; }

double abs_eps(double eps, double r) {
    const double a = std::abs(r);
    return a <= eps ? r * r / (2.0 * eps) : a - 0.5 * eps;
}

double clamp_Ieps(double eps, double r) { return std::max(-1.0 / eps, std::min(r, 1.0 / eps)); }

} // namespace phaseslide
