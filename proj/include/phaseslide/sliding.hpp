#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phaseslide/core.hpp"
#include "phaseslide/elliptic.hpp"
#include "phaseslide/potentials.hpp"
#include "phaseslide/timeseries.hpp"

namespace phaseslide {

struct SlidingConstants {
    double M = 0.0;      ///< ||mu_Gamma||_inf + ||Delta phistar||_inf + ||xi*||_inf
    double M0 = 0.0;     ///< ||phi0 - phistar||_inf
    double M_pi = 0.0;   ///< sup |pi(phistar(x) + r)| over x and |r| <= M0
    double laplacian_phistar = 0.0;
    ScalarField xi_star; ///< beta°(phistar)
};

/// If `laplacian_override` is set it replaces the discrete Neumann ||Delta phistar||_inf.
SlidingConstants compute_constants(const ScalarField& phi0, const ScalarField& phistar,
                                   const BoundaryData& mu_gamma, const PotentialSpec& pot,
                                   std::optional<double> laplacian_override = std::nullopt);

/// Sampled bound on sup |pi(phistar(x) + r)|, |r| <= M0, for a general Lipschitz pi:
/// 101 samples per node plus the slack L * (2 M0 / 100).
double sampled_pi_bound(const ScalarField& phistar, double M0, const std::function<double(double)>& pi,
                        double lipschitz);

enum class Provenance { estimated, user_supplied, empirical_pilot };
std::string to_string(Provenance p);

struct SlidingCertificate {
    double C_sh = 0.0;
    Provenance C_sh_source = Provenance::estimated;
    double C_sys = 0.0;
    double C_hat = 0.0;
    Provenance C_hat_source = Provenance::user_supplied;
    double M = 0.0;
    double M0 = 0.0;
    double M_pi = 0.0;
    double tau = 0.0;
    double horizon = 0.0;
    double measure = 0.0;
    double rho = 0.0;
    double A_rho = 0.0;
    std::optional<double> rho_star;  ///< present when C_sys < 1
    std::optional<double> T_star;    ///< present when C_sys < 1 and rho > rho_star

    bool smallness_ok() const { return C_sys < 1.0; }
};

SlidingCertificate certificate(const SlidingConstants& constants, double C_sh, Provenance C_sh_source,
                               double C_hat, Provenance C_hat_source, double tau, double horizon,
                               double measure, double rho);

/// Flat `key = value` listing.
std::string serialize(const SlidingCertificate& cert);

/// w(t) = max(0, M0 - (rho - A_rho) t / tau). Throws if the certificate has no T*.
double comparison_w(const SlidingCertificate& cert, double t);

/// First recorded time from which ||phi - phistar||_inf stays <= delta until the end.
std::optional<double> detect_reaching(const TimeSeries& series, double delta_slide);

struct EnvelopeViolation {
    long step = 0;
    double t = 0.0;
    double deviation = 0.0;
    double bound = 0.0;
};

struct EnvelopeReport {
    std::vector<EnvelopeViolation> violations;
    double worst_excess = 0.0;  ///< max over steps of deviation - w
    bool passed() const { return violations.empty(); }
};

EnvelopeReport verify_envelope(const TimeSeries& series, const SlidingCertificate& cert, double tol);

/// max over steps of (||mu||_inf - C_sys * rho_pilot), floored at 0.
double estimate_Chat(const TimeSeries& pilot, double C_sys, double rho_pilot);

} // namespace phaseslide
