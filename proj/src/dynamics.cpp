#include "phaseslide/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseslide/linear_solvers.hpp"

namespace phaseslide {

namespace {

constexpr int kNewtonCap = 50;
constexpr int kLineSearchHalvings = 30;
constexpr double kNewtonTol = 1e-10;
constexpr double kLinearTol = 1e-12;

struct WeightedDot {
    const std::vector<double>* w;
    double operator()(std::span<const double> a, std::span<const double> b) const {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += (*w)[k] * a[k] * b[k];
        return s;
    }
};

std::vector<double> weights_of(const Grid& g) {
    std::vector<double> w(g.node_count());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = g.weight(k);
    return w;
}

/// Solves (diag(shift) + A_N) x = rhs for the 1D Neumann operator.
std::vector<double> solve_shifted_neumann_1d(const Grid& g, std::span<const double> shift,
                                             std::span<const double> rhs) {
    const std::size_t n = g.node_count();
    const double ih2 = 1.0 / (g.spacing[0] * g.spacing[0]);
    std::vector<double> lo(n, -ih2), di(n), up(n, -ih2);
    for (std::size_t k = 0; k < n; ++k) di[k] = 2.0 * ih2 + shift[k];
    up[0] = -2.0 * ih2;
    lo[n - 1] = -2.0 * ih2;
    return solve_tridiagonal(lo, di, up, rhs);
}

} // namespace

void ModelParams::validate() const {
    auto nonneg = [](double v, const char* key) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError(key, "rates gamma1..gamma3 must be nonnegative (structural assumption on the constants)");
    };
    nonneg(gamma1, "model.gamma1");
    nonneg(gamma2, "model.gamma2");
    nonneg(gamma3, "model.gamma3");
    if (!(gamma4 > 0.0) || !std::isfinite(gamma4))
        throw ConfigError("model.gamma4", "supply rate must be positive (structural assumption: gamma4, tau > 0)");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw ConfigError("model.tau", "viscosity must be positive (structural assumption: gamma4, tau > 0)");
    if (!std::isfinite(sigma_s)) throw ConfigError("model.sigma_s", "must be finite");
    if (!(p_max > 0.0) || !std::isfinite(p_max))
        throw ConfigError("model.p_max", "proliferation cap must be positive (p bounded, nonnegative, Lipschitz)");
}

double ModelParams::proliferation(double r) const { return p_max * std::clamp(0.5 * (1.0 + r), 0.0, 1.0); }

double sigma_star(const ModelParams& params, const ScalarField& g, const ScalarField& sigma0) {
    double a = 0.0;
    for (double v : g.values()) a = std::max(a, std::abs(params.sigma_s + v / params.gamma4));
    return std::max(a, sup_norm(sigma0));
}

PhaseFieldStepper::PhaseFieldStepper(SimulationSetup setup)
    : setup_(std::move(setup)), neumann_(setup_.grid, BoundaryKind::neumann) {
    setup_.params.validate();
    for (const ScalarField* f : {&setup_.phi0, &setup_.phistar, &setup_.sigma0, &setup_.source})
        if (!(f->grid() == setup_.grid) || f->size() != setup_.grid.node_count())
            throw GridMismatch("simulation fields must live on the simulation grid");
    const auto report = validate_initial_data(setup_.phi0, setup_.sigma0, setup_.phistar, setup_.potential,
                                              setup_.domain_margin);
    if (!report.ok()) throw ConfigError("initial data", report.summary());
    if (!setup_.source.all_finite()) throw ConfigError("source", "g must be finite");
    setup_.mu_gamma.validate(setup_.grid);
    if (!(setup_.epsilon > 0.0 && setup_.epsilon <= 1.0))
        throw ConfigError("regularization.epsilon", "must lie in (0, 1]");
    if (!(setup_.rho >= 0.0) || !std::isfinite(setup_.rho))
        throw ConfigError("control.rho", "must be nonnegative");
    if (!(setup_.params.tau / setup_.time.dt > setup_.potential.lipschitz_pi()))
        throw ConfigError("time.dt", "tau/dt must exceed the Lipschitz constant of pi");

    sigma_star_ = phaseslide::sigma_star(setup_.params, setup_.source, setup_.sigma0);
    eps_ = setup_.epsilon;
    if (sigma_star_ > 0.0) eps_ = std::min(eps_, 1.0 / sigma_star_);
}

ScalarField PhaseFieldStepper::nonlinear_terms(const ScalarField& phi) const {
    ScalarField out(setup_.grid);
    const auto& pot = setup_.potential;
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = yosida_beta(pot, eps_, phi[k]) + pi_smooth(pot, phi[k]) +
                 setup_.rho * sign_eps(eps_, phi[k] - setup_.phistar[k]);
    return out;
}

std::vector<double> PhaseFieldStepper::jacobian_diagonal(const ScalarField& at) const {
    std::vector<double> d(at.size());
    const auto& pot = setup_.potential;
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = yosida_beta_prime(pot, eps_, at[k]) + pi_prime(pot, at[k]) +
               setup_.rho * sign_eps_prime(eps_, at[k] - setup_.phistar[k]);
    return d;
}

ScalarField PhaseFieldStepper::proliferation_source(const ScalarField& phi_old, const ScalarField& sigma_next) const {
    const auto& p = setup_.params;
    ScalarField s(setup_.grid);
    for (std::size_t k = 0; k < s.size(); ++k)
        s[k] = (p.gamma1 * clamp_Ieps(eps_, sigma_next[k]) - p.gamma2) * p.proliferation(phi_old[k]);
    return s;
}

SimulationState PhaseFieldStepper::initial_state() const {
    const Grid& g = setup_.grid;
    SimulationState st;
    st.step = 0;
    st.t = 0.0;
    st.phi = setup_.phi0;
    st.phi_prev = setup_.phi0;
    st.sigma = setup_.sigma0;
    st.mu_h = harmonic_extension(g, setup_.mu_gamma, 0.0);
    st.xi = ScalarField(g);
    st.zeta = ScalarField(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        st.xi[k] = yosida_beta(setup_.potential, eps_, st.phi[k]);
        st.zeta[k] = sign_eps(eps_, st.phi[k] - setup_.phistar[k]);
    }

    // The reduced equation at t = 0 gives (D + tau) dphi(0) = D(source) - N(phi0).
    const ScalarField source = proliferation_source(st.phi, st.sigma);
    ScalarField rhs = solve_dirichlet(g, source);
    rhs -= neumann_.apply(st.phi) + nonlinear_terms(st.phi) - st.mu_h;

    const auto w = weights_of(g);
    const double tau = setup_.params.tau;
    std::vector<double> tmp(g.node_count());
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        solve_dirichlet(g, x, y);
        for (std::size_t k = 0; k < y.size(); ++k) y[k] += tau * x[k];
    };
    auto precond = [&](const std::vector<double>& r, std::vector<double>& z) {
        for (std::size_t k = 0; k < r.size(); ++k) z[k] = r[k] / tau;
    };
    std::vector<double> v(g.node_count(), 0.0);
    const auto res = pcg(apply, precond, rhs.values(), v, WeightedDot{&w}, kLinearTol,
                         static_cast<int>(10 * g.node_count()));
    if (!res.converged) throw SolverError("time-zero identity solve did not converge", res.history);

    ScalarField dphi0(g, std::move(v));
    st.mu = solve_dirichlet(g, source - dphi0);
    return st;
}

ScalarField PhaseFieldStepper::step_sigma(const SimulationState& state) const {
    const Grid& g = setup_.grid;
    const auto& p = setup_.params;
    const double dt = setup_.time.dt;
    const std::size_t n = g.node_count();
    std::vector<double> shift(n), rhs(n);
    for (std::size_t k = 0; k < n; ++k) {
        shift[k] = 1.0 / dt + p.gamma4 + p.gamma3 * p.proliferation(state.phi[k]);
        rhs[k] = state.sigma[k] / dt + p.gamma4 * p.sigma_s + setup_.source[k];
    }
    if (g.dim == 1) return ScalarField(g, solve_shifted_neumann_1d(g, shift, rhs));

    const auto w = weights_of(g);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        neumann_.apply(x, y);
        for (std::size_t k = 0; k < n; ++k) y[k] += shift[k] * x[k];
    };
    auto precond = [&](const std::vector<double>& r, std::vector<double>& z) {
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / (shift[k] + neumann_.diagonal(k));
    };
    std::vector<double> x(state.sigma.values().begin(), state.sigma.values().end());
    const auto res = pcg(apply, precond, std::span<const double>(rhs), x, WeightedDot{&w}, kLinearTol,
                         static_cast<int>(10 * n));
    if (!res.converged) throw SolverError("nutrient step did not converge", res.history);
    return ScalarField(g, std::move(x));
}

ScalarField PhaseFieldStepper::residual_phi(const ScalarField& candidate, const SimulationState& state,
                                            const ScalarField& sigma_next, const ScalarField& mu_h_next) const {
    const Grid& g = setup_.grid;
    const double dt = setup_.time.dt;
    ScalarField rate = candidate - state.phi;
    rate *= 1.0 / dt;
    // D(rate) - D(source) folded into one solve.
    ScalarField r = solve_dirichlet(g, rate - proliferation_source(state.phi, sigma_next));
    const ScalarField lap = neumann_.apply(candidate);
    const ScalarField nl = nonlinear_terms(candidate);
    const double tau = setup_.params.tau;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += tau * rate[k] + lap[k] + nl[k] - mu_h_next[k];
    return r;
}

ScalarField PhaseFieldStepper::jacobian_apply(const ScalarField& at, const ScalarField& direction) const {
    const double dt = setup_.time.dt;
    const double tau = setup_.params.tau;
    ScalarField out = solve_dirichlet(setup_.grid, direction);
    out *= 1.0 / dt;
    const ScalarField lap = neumann_.apply(direction);
    const auto d = jacobian_diagonal(at);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += (tau / dt + d[k]) * direction[k] + lap[k];
    return out;
}

PhiStep PhaseFieldStepper::step_phi(const SimulationState& state, const ScalarField& sigma_next,
                                    const ScalarField& mu_h_next) const {
    const Grid& g = setup_.grid;
    const std::size_t n = g.node_count();
    const double dt = setup_.time.dt;
    const double tau = setup_.params.tau;
    const auto w = weights_of(g);
    const WeightedDot dot{&w};
    const double tol = kNewtonTol * (1.0 + sup_norm(state.phi));

    ScalarField phi = state.phi;
    ScalarField res = residual_phi(phi, state, sigma_next, mu_h_next);
    double res_sup = sup_norm(res);
    std::vector<double> history{res_sup};

    for (int it = 0; it < kNewtonCap; ++it) {
        if (res_sup <= tol) return {std::move(phi), it, res_sup};

        const auto d = jacobian_diagonal(phi);
        std::vector<double> shift(n);
        for (std::size_t k = 0; k < n; ++k) shift[k] = tau / dt + d[k];

        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            solve_dirichlet(g, x, y);
            std::vector<double> lap(n);
            neumann_.apply(x, lap);
            for (std::size_t k = 0; k < n; ++k) y[k] = y[k] / dt + shift[k] * x[k] + lap[k];
        };
        // Sparse part of the Jacobian: exact in 1D, its diagonal in 2D.
        auto precond = [&](const std::vector<double>& r, std::vector<double>& z) {
            if (g.dim == 1) {
                z = solve_shifted_neumann_1d(g, shift, r);
            } else {
                for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / (shift[k] + neumann_.diagonal(k));
            }
        };
        std::vector<double> rhs(n);
        for (std::size_t k = 0; k < n; ++k) rhs[k] = -res[k];
        std::vector<double> delta(n, 0.0);
        const auto lin = pcg(apply, precond, std::span<const double>(rhs), delta, dot, kLinearTol,
                             static_cast<int>(10 * n));
        if (!lin.converged) throw SolverError("Newton linear solve did not converge", lin.history);

        const double merit = std::sqrt(dot(res.values(), res.values()));
        double lambda = 1.0;
        ScalarField trial(g);
        ScalarField trial_res;
        for (int h = 0; h <= kLineSearchHalvings; ++h) {
            for (std::size_t k = 0; k < n; ++k) trial[k] = phi[k] + lambda * delta[k];
            trial_res = residual_phi(trial, state, sigma_next, mu_h_next);
            if (std::sqrt(dot(trial_res.values(), trial_res.values())) < merit || sup_norm(trial_res) <= tol)
                break;
            lambda *= 0.5;
        }
        phi = std::move(trial);
        res = std::move(trial_res);
        res_sup = sup_norm(res);
        history.push_back(res_sup);
    }
    if (res_sup <= tol) return {std::move(phi), kNewtonCap, res_sup};
    std::ostringstream os;
    os << "Newton iteration cap (" << kNewtonCap << ") exceeded, last residual " << res_sup;
    throw SolverError(os.str(), history);
}

ScalarField PhaseFieldStepper::recover_mu(const SimulationState& state, const ScalarField& phi_next,
                                          const ScalarField& sigma_next) const {
    ScalarField rate = phi_next - state.phi;
    rate *= 1.0 / setup_.time.dt;
    return solve_dirichlet(setup_.grid, proliferation_source(state.phi, sigma_next) - rate);
}

ScalarField PhaseFieldStepper::chemical_relation(const ScalarField& phi_prev, const ScalarField& phi_next,
                                                 const ScalarField& mu_h_next) const {
    const double c = setup_.params.tau / setup_.time.dt;
    ScalarField out = neumann_.apply(phi_next) + nonlinear_terms(phi_next) - mu_h_next;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * (phi_next[k] - phi_prev[k]);
    return out;
}

SimulationState PhaseFieldStepper::advance(const SimulationState& state, StepInfo* info) const {
    const Grid& g = setup_.grid;
    SimulationState next;
    next.step = state.step + 1;
    next.t = static_cast<double>(next.step) * setup_.time.dt;
    next.mu_h = harmonic_extension(g, setup_.mu_gamma, next.t);
    next.sigma = step_sigma(state);
    auto phi_step = step_phi(state, next.sigma, next.mu_h);
    next.phi = std::move(phi_step.phi);
    next.phi_prev = state.phi;
    next.mu = recover_mu(state, next.phi, next.sigma);
    next.xi = ScalarField(g);
    next.zeta = ScalarField(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        next.xi[k] = yosida_beta(setup_.potential, eps_, next.phi[k]);
        next.zeta[k] = sign_eps(eps_, next.phi[k] - setup_.phistar[k]);
    }
    if (info) {
        info->newton_iterations = phi_step.newton_iterations;
        info->mu_route_gap = sup_norm(next.mu - chemical_relation(state.phi, next.phi, next.mu_h));
    }
    return next;
}

double PhaseFieldStepper::energy(const ScalarField& phi) const {
    ScalarField density(setup_.grid);
    const auto& pot = setup_.potential;
    for (std::size_t k = 0; k < density.size(); ++k)
        density[k] = beta_hat_eps(pot, eps_, phi[k]) + pi_hat(pot, phi[k]) +
                     setup_.rho * abs_eps(eps_, phi[k] - setup_.phistar[k]);
    return 0.5 * gradient_energy(phi) + integral(density);
}

TimeSeriesRow PhaseFieldStepper::diagnostics(const SimulationState& state, int newton_iterations,
                                             const std::function<double(double)>& envelope) const {
    TimeSeriesRow row;
    row.step = state.step;
    row.t = state.t;
    const ScalarField dev = state.phi - setup_.phistar;
    row.sup_dev = sup_norm(dev);
    row.l2_dev = l2_norm(dev);
    row.mu_inf = sup_norm(state.mu);
    row.sigma_min = state.sigma.min();
    row.sigma_max = state.sigma.max();
    row.energy = energy(state.phi);
    row.newton_iters = newton_iterations;
    if (envelope) row.w_bound = envelope(state.t);
    row.max_principle_margin = sigma_star_ - sup_norm(state.sigma);
    return row;
}

RunResult run(const SimulationSetup& setup, const RunOptions& options) {
    const PhaseFieldStepper stepper(setup);
    RunResult result;
    result.epsilon = stepper.epsilon();
    result.sigma_star = stepper.sigma_star();

    SimulationState state = stepper.initial_state();
    result.series.rows.push_back(stepper.diagnostics(state, 0, options.envelope));
    result.mu_route_gap.push_back(0.0);
    if (options.observer) options.observer(state);

    for (long n = 0; n < setup.time.steps; ++n) {
        PhaseFieldStepper::StepInfo info;
        try {
            state = stepper.advance(state, &info);
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "step " << (n + 1) << " failed: " << e.what();
            throw RunAborted(os.str(), result.series);
        }
        result.series.rows.push_back(stepper.diagnostics(state, info.newton_iterations, options.envelope));
        result.mu_route_gap.push_back(info.mu_route_gap);
        if (options.observer) options.observer(state);
    }
    result.final_state = std::move(state);
    return result;
}

} // namespace phaseslide
