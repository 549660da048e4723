#include "phaseslide/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "phaseslide/io.hpp"

namespace phaseslide {

RunConfig reference_scenario() { return RunConfig{}; }

double estimate_csh(const RunConfig& config) {
    return estimate_embedding_constant(build_grid(config.dim, config.cells, config.extent));
}

Calibration calibrate(const RunConfig& config) {
    const SimulationSetup setup = build_setup(config);
    const PhaseFieldStepper probe(setup);

    Calibration cal;
    cal.constants = compute_constants(setup.phi0, setup.phistar, setup.mu_gamma, setup.potential,
                                      config.laplacian_phistar);
    if (config.csh_estimate) {
        cal.C_sh = estimate_embedding_constant(setup.grid);
        cal.C_sh_source = Provenance::estimated;
    } else {
        cal.C_sh = config.csh_value;
        cal.C_sh_source = Provenance::user_supplied;
    }
    cal.tau = config.model.tau;
    cal.horizon = config.horizon;
    cal.measure = setup.grid.measure;
    cal.epsilon = probe.epsilon();
    cal.C_sys = cal.C_sh * 2.0 * std::pow(cal.measure, 2.0 / 3.0) / cal.tau;
    cal.rho_pilot = config.rho_pilot;

    if (config.chat_pilot) {
        SimulationSetup pilot_setup = setup;
        pilot_setup.rho = config.rho_pilot;
        cal.pilot = run(pilot_setup).series;
        cal.C_hat = estimate_Chat(*cal.pilot, cal.C_sys, config.rho_pilot);
        cal.C_hat_source = Provenance::empirical_pilot;
    } else {
        cal.C_hat = config.chat_value;
        cal.C_hat_source = Provenance::user_supplied;
    }
    return cal;
}

SlidingCertificate certificate_for(const Calibration& cal, double rho) {
    return certificate(cal.constants, cal.C_sh, cal.C_sh_source, cal.C_hat, cal.C_hat_source, cal.tau,
                       cal.horizon, cal.measure, rho);
}

double reaching_tolerance(const RunConfig& config, const Calibration& cal, const SlidingCertificate& cert) {
    if (config.delta_slide) return *config.delta_slide;
    const double base = 1e-3 * cert.M0;
    if (cert.T_star && cert.rho > 0.0) return std::max(base, cal.epsilon * cert.A_rho / cert.rho);
    return base > 0.0 ? base : 1e-12;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) throw Error("cannot write " + path.string());
}

std::string summary_text(const SimulationOutcome& o) {
    std::ostringstream os;
    os << "rho = " << format_double(o.certificate.rho) << '\n';
    os << "epsilon_effective = " << format_double(o.result.epsilon) << '\n';
    os << "sigma_star = " << format_double(o.result.sigma_star) << '\n';
    os << "delta_slide = " << format_double(o.delta_slide) << '\n';
    os << "t_num = " << (o.t_num ? format_double(*o.t_num) : std::string("none")) << '\n';
    os << "T_star = " << (o.certificate.T_star ? format_double(*o.certificate.T_star) : std::string("none")) << '\n';
    if (o.envelope) {
        os << "envelope_tol = " << format_double(o.envelope_tol) << '\n';
        os << "envelope = " << (o.envelope->passed() ? "passed" : "violated") << '\n';
        os << "envelope_worst_excess = " << format_double(o.envelope->worst_excess) << '\n';
        os << "envelope_violations = " << o.envelope->violations.size() << '\n';
    } else {
        os << "envelope = none\n";
    }
    os << "mu_bound_excess = " << format_double(o.mu_bound_excess) << '\n';
    os << "final_sup_dev = " << format_double(o.result.series.rows.back().sup_dev) << '\n';
    double gap = 0.0;
    for (double g : o.result.mu_route_gap) gap = std::max(gap, g);
    os << "mu_route_gap = " << format_double(gap) << '\n';
    return os.str();
}

} // namespace

SimulationOutcome simulate(const RunConfig& config, const Calibration& cal, double rho,
                           const std::optional<std::filesystem::path>& out_dir) {
    SimulationSetup setup = build_setup(config);
    setup.rho = rho;

    SimulationOutcome out;
    out.certificate = certificate_for(cal, rho);
    out.delta_slide = reaching_tolerance(config, cal, out.certificate);

    RunOptions opt;
    if (out.certificate.T_star) {
        const SlidingCertificate cert = out.certificate;
        opt.envelope = [cert](double t) { return comparison_w(cert, t); };
    }
    const long stride = config.snapshot_stride;
    const long last = setup.time.steps;
    if (out_dir && stride > 0) {
        const std::filesystem::path dir = *out_dir / "snapshots";
        const bool pgm = config.write_pgm;
        opt.observer = [dir, stride, last, pgm](const SimulationState& s) {
            if (s.step % stride != 0 && s.step != last) return;
            for (const auto& [name, field] : {std::pair<const char*, const ScalarField*>{"phi", &s.phi},
                                              {"sigma", &s.sigma},
                                              {"mu", &s.mu}}) {
                emit_snapshot(*field, dir / snapshot_name(name, s.step, "csv"));
                if (pgm) emit_pgm(*field, dir / snapshot_name(name, s.step, "pgm"));
            }
        };
    }

    out.result = run(setup, opt);
    out.t_num = detect_reaching(out.result.series, out.delta_slide);
    if (out.certificate.T_star) {
        out.envelope_tol = 1e-2 * out.certificate.M0;
        out.envelope = verify_envelope(out.result.series, out.certificate, out.envelope_tol);
    }
    const double bound = cal.C_sys * rho + cal.C_hat;
    out.mu_bound_excess = -bound;
    for (const auto& r : out.result.series.rows) out.mu_bound_excess = std::max(out.mu_bound_excess, r.mu_inf - bound);

    if (out_dir) {
        emit_timeseries(out.result.series, *out_dir / "timeseries.csv");
        write_text(*out_dir / "certificate.txt", serialize(out.certificate));
        write_text(*out_dir / "summary.txt", summary_text(out));
        RunConfig echo = config;
        echo.rho = rho;
        write_text(*out_dir / "config.toml", serialize_config(echo));
    }
    return out;
}

unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PHASESLIDE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

std::vector<SweepRow> sweep(const RunConfig& config, const Calibration& cal, std::vector<double> rhos,
                            unsigned threads, const std::optional<std::filesystem::path>& out_dir) {
    std::sort(rhos.begin(), rhos.end());
    std::vector<SweepRow> rows(rhos.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < rhos.size(); k = next++) {
            SweepRow& row = rows[k];
            row.rho = rhos[k];
            std::optional<std::filesystem::path> dir;
            if (out_dir) dir = *out_dir / ("rho_" + format_double(rhos[k]));
            try {
                const SimulationOutcome o = simulate(config, cal, rhos[k], dir);
                row.t_num = o.t_num;
                row.T_star = o.certificate.T_star;
                if (o.envelope) row.passed_envelope = o.envelope->passed();
                row.mu_bound_excess = o.mu_bound_excess;
                row.final_dev = o.result.series.rows.back().sup_dev;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rhos.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

void write_sweep_table(const std::vector<SweepRow>& rows, std::ostream& os) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("none"); };
    os << "rho,t_num,T_star,passed_envelope,mu_bound_excess,final_sup_dev,error\n";
    for (const auto& r : rows) {
        os << format_double(r.rho) << ',' << opt(r.t_num) << ',' << opt(r.T_star) << ','
           << (r.passed_envelope ? (*r.passed_envelope ? "true" : "false") : "none") << ','
           << format_double(r.mu_bound_excess) << ',' << format_double(r.final_dev) << ',';
        std::string e = r.error;
        std::replace(e.begin(), e.end(), ',', ';');
        std::replace(e.begin(), e.end(), '\n', ' ');
        os << e << '\n';
    }
}

// ---------------------------------------------------------------------------
// verify

namespace {

struct Reporter {
    std::ostream& os;
    bool all = true;

    void line(bool ok, const std::string& name, const std::string& detail) {
        os << (ok ? "PASS " : "FAIL ") << name << "  " << detail << std::endl;
        all = all && ok;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void check_regularization(Reporter& rep) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ueps(1e-3, 1.0), ur(-3.0, 3.0);
    const PotentialSpec pots[] = {make_regular_potential(), make_logarithmic_potential(1.5),
                                  make_obstacle_potential(1.0)};
    long bad = 0;
    for (int k = 0; k < 10000; ++k) {
        const PotentialSpec& p = pots[k % 3];
        const double eps = ueps(rng), r = ur(rng);
        const double a = abs_eps(eps, r);
        if (!(a >= 0.0 && a <= std::abs(r))) ++bad;
        if (p.in_domain(r) && !(std::abs(yosida_beta(p, eps, r)) <= std::abs(beta_min_section(p, r)))) ++bad;
        if (!(beta_hat_eps(p, eps, r) <= beta_hat(p, r))) ++bad;
    }
    rep.line(bad == 0, "regularization-inequalities", std::to_string(bad) + " violations in 10000 samples");
}

void check_elliptic(Reporter& rep) {
    for (int dim : {1, 2}) {
        const Grid g = dim == 1 ? build_grid(1, {64}, {1.0}) : build_grid(2, {24, 24}, {1.0, 1.0});
        const ScalarField f = ScalarField::sample(g, [](double x, double y) {
            return std::sin(3.0 * x) + std::cos(5.0 * y) * x * x - 0.3;
        });
        const double lhs = inner(f, solve_dirichlet(g, f));
        const double n = hminus1_norm(g, f);
        const double rel = std::abs(lhs - n * n) / std::max(1e-300, std::abs(lhs));
        rep.line(rel <= 1e-8, "hminus1-identity-" + std::to_string(dim) + "d", "relative gap " + fmt(rel));

        std::vector<double> bv;
        for (std::size_t idx : g.boundary_nodes())
            bv.push_back(std::sin(7.0 * g.coordinate(idx, 0)) + (dim == 2 ? g.coordinate(idx, 1) : 0.0));
        const ScalarField h = harmonic_extension(g, bv);
        const double lo = *std::min_element(bv.begin(), bv.end());
        const double hi = *std::max_element(bv.begin(), bv.end());
        const double excess = std::max(h.max() - hi, lo - h.min());
        rep.line(excess <= 1e-10, "harmonic-max-principle-" + std::to_string(dim) + "d", "excess " + fmt(excess));
    }
}

void check_reference(Reporter& rep) {
    const RunConfig config = reference_scenario();
    const Calibration cal = calibrate(config);
    const SlidingCertificate base = certificate_for(cal, config.rho);
    if (!base.rho_star) {
        rep.line(false, "smallness", "C_sys = " + fmt(cal.C_sys) + " >= 1");
        return;
    }
    const double rho = 1.25 * *base.rho_star;
    const SimulationOutcome o = simulate(config, cal, rho);

    double margin = INFINITY, gap = 0.0;
    for (const auto& r : o.result.series.rows) margin = std::min(margin, r.max_principle_margin);
    for (double g : o.result.mu_route_gap) gap = std::max(gap, g);
    rep.line(margin >= -1e-8, "max-principle", "min margin " + fmt(margin));
    rep.line(gap <= 1e-8, "mu-two-routes", "max gap " + fmt(gap));

    const bool reached = o.t_num && o.certificate.T_star && *o.t_num <= *o.certificate.T_star;
    rep.line(reached, "reaching-time",
             "t_num " + (o.t_num ? fmt(*o.t_num) : std::string("none")) + " T* " +
                 (o.certificate.T_star ? fmt(*o.certificate.T_star) : std::string("none")));
    rep.line(o.envelope && o.envelope->passed(), "comparison-envelope",
             o.envelope ? "worst excess " + fmt(o.envelope->worst_excess) : std::string("no certificate"));
    rep.line(o.mu_bound_excess <= 1e-6, "mu-bound", "excess " + fmt(o.mu_bound_excess));

    const SimulationOutcome again = simulate(config, cal, rho);
    rep.line(again.result.series == o.result.series, "determinism", "two identical runs compared row by row");

    const SimulationOutcome off = simulate(config, cal, 0.0);
    const double final_dev = off.result.series.rows.back().sup_dev;
    rep.line(!off.t_num && final_dev >= 0.5 * cal.constants.M0, "control-off",
             "final deviation " + fmt(final_dev) + " vs M0 " + fmt(cal.constants.M0));

    // Decoupled case: no proliferation term, so the discrete energy is a Lyapunov function.
    RunConfig dec = config;
    dec.model.gamma1 = 0.0;
    dec.model.gamma2 = 0.0;
    dec.horizon = 0.2;
    SimulationSetup ds = build_setup(dec);
    ds.rho = rho;
    const RunResult dr = run(ds);
    double worst = -INFINITY;
    for (std::size_t k = 1; k < dr.series.rows.size(); ++k) {
        const double e0 = dr.series.rows[k - 1].energy, e1 = dr.series.rows[k].energy;
        worst = std::max(worst, (e1 - e0) / (1.0 + std::abs(e0)));
    }
    rep.line(worst <= 1e-8, "energy-decay", "worst relative increase " + fmt(worst));
}

void check_2d(Reporter& rep) {
    RunConfig c;
    c.dim = 2;
    c.cells = {16, 16};
    c.extent = {1.0, 1.0};
    c.horizon = 0.05;
    c.phi0.center = {0.5, 0.5};
    c.phi0.radius = 0.3;
    c.phi0.width = 0.08;
    c.rho = 20.0;
    SimulationSetup s = build_setup(c);
    const RunResult r = run(s);
    double margin = INFINITY;
    bool finite = true;
    for (const auto& row : r.series.rows) {
        margin = std::min(margin, row.max_principle_margin);
        finite = finite && std::isfinite(row.sup_dev) && std::isfinite(row.mu_inf) && std::isfinite(row.energy);
    }
    rep.line(finite && margin >= -1e-8, "2d-smoke", "min sigma margin " + fmt(margin));
}

} // namespace

bool run_verify_suite(std::ostream& os) {
    Reporter rep{os};
    auto guarded = [&](const char* name, void (*fn)(Reporter&)) {
        try {
            fn(rep);
        } catch (const std::exception& e) {
            rep.line(false, name, std::string("exception: ") + e.what());
        }
    };
    guarded("regularization", check_regularization);
    guarded("elliptic", check_elliptic);
    guarded("reference-scenario", check_reference);
    guarded("2d", check_2d);
    return rep.all;
}

} // namespace phaseslide
