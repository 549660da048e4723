#pragma once

#include <functional>
#include <optional>

#include "phaseslide/core.hpp"
#include "phaseslide/elliptic.hpp"
#include "phaseslide/potentials.hpp"
#include "phaseslide/timeseries.hpp"

namespace phaseslide {

struct ModelParams {
    double gamma1 = 1.0;  ///< proliferation rate
    double gamma2 = 0.5;  ///< apoptosis rate
    double gamma3 = 1.0;  ///< nutrient consumption rate
    double gamma4 = 1.0;  ///< nutrient supply rate
    double tau = 4.0;     ///< viscosity
    double sigma_s = 1.0; ///< nutrient level of the vasculature
    double p_max = 1.0;

    void validate() const;
    /// p(r) = p_max * clamp((1 + r)/2, 0, 1)
    double proliferation(double r) const;

    bool operator==(const ModelParams&) const = default;
};

/// max{ ||sigma_s + g/gamma4||_inf, ||sigma0||_inf }
double sigma_star(const ModelParams& params, const ScalarField& g, const ScalarField& sigma0);

struct SimulationSetup {
    Grid grid;
    TimeConfig time;
    ModelParams params;
    PotentialSpec potential;
    double epsilon = 5e-2;
    double rho = 0.0;
    ScalarField phi0;
    ScalarField phistar;
    ScalarField sigma0;
    ScalarField source;  ///< g, time independent
    BoundaryData mu_gamma;
    double domain_margin = 1e-6;
};

struct SimulationState {
    long step = 0;
    double t = 0.0;
    ScalarField phi;
    ScalarField phi_prev;
    ScalarField sigma;
    ScalarField mu;
    ScalarField mu_h;
    ScalarField xi;    ///< beta_eps(phi)
    ScalarField zeta;  ///< sign_eps(phi - phistar)
};

struct PhiStep {
    ScalarField phi;
    int newton_iterations = 0;
    double residual = 0.0;
};

/// Implicit Euler stepper for the regularized system, written in reduced form so
/// that mu never enters the nonlinear solve:
///
///   D(dphi) + tau dphi - Delta phi + beta_eps(phi) + pi(phi) + rho sign_eps(phi - phistar) - mu_H
///     = D((gamma1 I_eps(sigma) - gamma2) p(phi_old)),     dphi = (phi - phi_old)/dt,
///
/// with sigma advanced first (lagged phase) and mu recovered afterwards.
class PhaseFieldStepper {
public:
    explicit PhaseFieldStepper(SimulationSetup setup);

    const SimulationSetup& setup() const noexcept { return setup_; }
    /// Regularization actually used: the configured value capped at 1/sigma_star.
    double epsilon() const noexcept { return eps_; }
    double sigma_star() const noexcept { return sigma_star_; }
    double dt() const noexcept { return setup_.time.dt; }

    SimulationState initial_state() const;

    ScalarField step_sigma(const SimulationState& state) const;
    ScalarField proliferation_source(const ScalarField& phi_old, const ScalarField& sigma_next) const;

    ScalarField residual_phi(const ScalarField& candidate, const SimulationState& state,
                             const ScalarField& sigma_next, const ScalarField& mu_h_next) const;
    /// Generalized Jacobian of residual_phi at `at`, applied to `direction`.
    ScalarField jacobian_apply(const ScalarField& at, const ScalarField& direction) const;
    PhiStep step_phi(const SimulationState& state, const ScalarField& sigma_next,
                     const ScalarField& mu_h_next) const;

    /// mu = D(source - dphi): vanishes on the boundary.
    ScalarField recover_mu(const SimulationState& state, const ScalarField& phi_next,
                           const ScalarField& sigma_next) const;
    /// mu read off the chemical-potential relation, the second route to the same field.
    ScalarField chemical_relation(const ScalarField& phi_prev, const ScalarField& phi_next,
                                  const ScalarField& mu_h_next) const;

    struct StepInfo {
        int newton_iterations = 0;
        double mu_route_gap = 0.0;
    };
    SimulationState advance(const SimulationState& state, StepInfo* info = nullptr) const;

    /// 1/2 int |grad phi|^2 + int (B_eps(phi) + pi_hat(phi) + rho |phi - phistar|_eps)
    double energy(const ScalarField& phi) const;

    TimeSeriesRow diagnostics(const SimulationState& state, int newton_iterations,
                              const std::function<double(double)>& envelope) const;

private:
    ScalarField nonlinear_terms(const ScalarField& phi) const;
    std::vector<double> jacobian_diagonal(const ScalarField& at) const;

    SimulationSetup setup_;
    LaplacianOperator neumann_;
    double eps_;
    double sigma_star_;
};

struct RunOptions {
    /// Comparison envelope w(t); fills the w_bound column when set.
    std::function<double(double)> envelope;
    /// Called with the initial state and after every step.
    std::function<void(const SimulationState&)> observer;
};

struct RunResult {
    TimeSeries series;
    SimulationState final_state;
    std::vector<double> mu_route_gap;
    double epsilon = 0.0;
    double sigma_star = 0.0;
};

/// A step failed. Holds the diagnostics recorded up to the failure.
class RunAborted : public SolverError {
public:
    RunAborted(const std::string& what, TimeSeries partial)
        : SolverError(what), partial_(std::move(partial)) {}
    const TimeSeries& partial() const noexcept { return partial_; }

private:
    TimeSeries partial_;
};

RunResult run(const SimulationSetup& setup, const RunOptions& options = {});

} // namespace phaseslide
