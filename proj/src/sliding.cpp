#include "phaseslide/sliding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace phaseslide {

SlidingConstants compute_constants(const ScalarField& phi0, const ScalarField& phistar,
                                   const BoundaryData& mu_gamma, const PotentialSpec& pot,
                                   std::optional<double> laplacian_override) {
    require_same_grid(phi0, phistar);
    const Grid& g = phistar.grid();
    for (std::size_t k = 0; k < phistar.size(); ++k) {
        const double v = phistar[k];
        if (!(v > pot.domain_lower() && v < pot.domain_upper()))
            throw DomainError("target value " + std::to_string(v) + " at node " + std::to_string(k) +
                              " is not strictly inside the domain of beta");
    }

    SlidingConstants c;
    c.xi_star = ScalarField(g);
    for (std::size_t k = 0; k < phistar.size(); ++k) c.xi_star[k] = beta_min_section(pot, phistar[k]);
    c.laplacian_phistar = laplacian_override
                              ? std::abs(*laplacian_override)
                              : sup_norm(LaplacianOperator(g, BoundaryKind::neumann).apply(phistar));
    c.M = mu_gamma.sup_norm() + c.laplacian_phistar + sup_norm(c.xi_star);
    c.M0 = sup_norm(phi0 - phistar);

    // pi is affine for every built-in potential: the sup over |r| <= M0 sits at an endpoint.
    double m = 0.0;
    for (std::size_t k = 0; k < phistar.size(); ++k)
        for (double r : {-c.M0, c.M0}) m = std::max(m, std::abs(pi_smooth(pot, phistar[k] + r)));
    c.M_pi = m;
    return c;
}

double sampled_pi_bound(const ScalarField& phistar, double M0, const std::function<double(double)>& pi,
                        double lipschitz) {
    constexpr int kSamples = 101;
    double m = 0.0;
    for (std::size_t k = 0; k < phistar.size(); ++k) {
        for (int s = 0; s < kSamples; ++s) {
            const double r = -M0 + 2.0 * M0 * s / (kSamples - 1);
            m = std::max(m, std::abs(pi(phistar[k] + r)));
        }
    }
    return m + lipschitz * (2.0 * M0 / (kSamples - 1));
}

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::estimated: return "estimated";
    case Provenance::user_supplied: return "user-supplied";
    case Provenance::empirical_pilot: return "empirical-from-pilot";
    }
    return "unknown";
}

SlidingCertificate certificate(const SlidingConstants& constants, double C_sh, Provenance C_sh_source,
                               double C_hat, Provenance C_hat_source, double tau, double horizon,
                               double measure, double rho) {
    if (!(tau > 0.0 && horizon > 0.0 && measure > 0.0))
        throw ConfigError("certificate", "tau, T and |Omega| must be positive");
    SlidingCertificate c;
    c.C_sh = C_sh;
    c.C_sh_source = C_sh_source;
    c.C_hat = C_hat;
    c.C_hat_source = C_hat_source;
    c.M = constants.M;
    c.M0 = constants.M0;
    c.M_pi = constants.M_pi;
    c.tau = tau;
    c.horizon = horizon;
    c.measure = measure;
    c.rho = rho;
    c.C_sys = C_sh * 2.0 * std::pow(measure, 2.0 / 3.0) / tau;
    c.A_rho = c.C_sys * rho + C_hat + c.M + c.M_pi;
    if (c.C_sys < 1.0) {
        c.rho_star = (C_hat + c.M + c.M_pi + tau / horizon * c.M0) / (1.0 - c.C_sys);
        if (rho > *c.rho_star) c.T_star = tau * c.M0 / (rho - c.A_rho);
    }
    return c;
}

std::string serialize(const SlidingCertificate& c) {
    std::ostringstream os;
    auto num = [&](const char* key, double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << key << " = " << buf << '\n';
    };
    num("C_sh", c.C_sh);
    os << "C_sh_source = " << to_string(c.C_sh_source) << '\n';
    num("C_sys", c.C_sys);
    num("C_hat", c.C_hat);
    os << "C_hat_source = " << to_string(c.C_hat_source) << '\n';
    num("M", c.M);
    num("M0", c.M0);
    num("M_pi_star", c.M_pi);
    num("tau", c.tau);
    num("T", c.horizon);
    num("measure", c.measure);
    num("rho", c.rho);
    num("A_rho", c.A_rho);
    if (c.rho_star) num("rho_star", *c.rho_star); else os << "rho_star = none\n";
    if (c.T_star) num("T_star", *c.T_star); else os << "T_star = none\n";
    os << "smallness = " << (c.smallness_ok() ? "satisfied" : "violated") << '\n';
    return os.str();
}

double comparison_w(const SlidingCertificate& cert, double t) {
    if (!cert.T_star) throw Error("comparison envelope needs a certificate with T* (rho > rho*, C_sys < 1)");
    return std::max(0.0, cert.M0 - (cert.rho - cert.A_rho) / cert.tau * t);
}

std::optional<double> detect_reaching(const TimeSeries& series, double delta_slide) {
    if (!(delta_slide > 0.0)) throw ConfigError("sliding.delta", "must be positive");
    std::optional<double> first;
    for (const auto& row : series.rows) {
        if (row.sup_dev <= delta_slide) {
            if (!first) first = row.t;
        } else {
            first.reset();
        }
    }
    return first;
}

EnvelopeReport verify_envelope(const TimeSeries& series, const SlidingCertificate& cert, double tol) {
    EnvelopeReport report;
    report.worst_excess = -std::numeric_limits<double>::infinity();
    for (const auto& row : series.rows) {
        const double w = comparison_w(cert, row.t);
        report.worst_excess = std::max(report.worst_excess, row.sup_dev - w);
        if (row.sup_dev > w + tol) report.violations.push_back({row.step, row.t, row.sup_dev, w});
    }
    return report;
}

double estimate_Chat(const TimeSeries& pilot, double C_sys, double rho_pilot) {
    double c = 0.0;
    for (const auto& row : pilot.rows) c = std::max(c, row.mu_inf - C_sys * rho_pilot);
    return c;
}

} // namespace phaseslide
