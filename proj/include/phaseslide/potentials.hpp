#pragma once

#include <string>

namespace phaseslide {

enum class PotentialKind { regular, logarithmic, obstacle };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// Double-well potential F = beta_hat + pi_hat.
///
/// regular:      beta_hat = r^4/4,                        pi_hat = 1/4 - r^2/2
/// logarithmic:  beta_hat = (1+r)ln(1+r) + (1-r)ln(1-r),  pi_hat = -c0 r^2  (c0 > 1)
/// obstacle:     beta_hat = indicator of [-1, 1],         pi_hat = -c0 r^2  (c0 > 0)
struct PotentialSpec {
    PotentialKind kind = PotentialKind::regular;
    double c0 = 1.0;

    /// Lipschitz constant of pi.
    double lipschitz_pi() const { return kind == PotentialKind::regular ? 1.0 : 2.0 * c0; }
    /// Closed domain bounds of beta_hat (infinite for the regular potential).
    double domain_lower() const;
    double domain_upper() const;
    /// True when r belongs to D(beta).
    bool in_domain(double r) const;
};

PotentialSpec make_regular_potential();
PotentialSpec make_logarithmic_potential(double c0);
PotentialSpec make_obstacle_potential(double c0);

/// Convex part; +infinity outside its effective domain.
double beta_hat(const PotentialSpec& pot, double r);

/// Element of beta(r) with minimum modulus. Throws DomainError outside D(beta).
double beta_min_section(const PotentialSpec& pot, double r);

/// Derivative of beta where it exists (0 on the interior of the obstacle set).
double beta_prime(const PotentialSpec& pot, double r);

double pi_hat(const PotentialSpec& pot, double r);
double pi_smooth(const PotentialSpec& pot, double r);
double pi_prime(const PotentialSpec& pot, double r);

/// Resolvent J_eps(r): the solution y of y + eps * beta(y) = r.
double resolvent(const PotentialSpec& pot, double eps, double r);

/// Yosida regularization (r - J_eps(r)) / eps.
double yosida_beta(const PotentialSpec& pot, double eps, double r);

/// Derivative of the Yosida regularization. At the obstacle kinks the inner
/// (smaller) one-sided value is returned.
double yosida_beta_prime(const PotentialSpec& pot, double eps, double r);

/// Moreau envelope min_y { beta_hat(y) + (r - y)^2 / (2 eps) }.
double beta_hat_eps(const PotentialSpec& pot, double eps, double r);

/// r / max(eps, |r|)
double sign_eps(double eps, double r);
/// 1/eps strictly inside (-eps, eps), 0 otherwise (inner value at |r| = eps).
double sign_eps_prime(double eps, double r);
/// Primitive of sign_eps vanishing at 0.
double abs_eps(double eps, double r);
/// Clamp to [-1/eps, 1/eps].
double clamp_Ieps(double eps, double r);

} // namespace phaseslide
