#include "phaseslide/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

#include "phaseslide/harness.hpp"
#include "phaseslide/io.hpp"

namespace phaseslide {

namespace {

void print_calibration(const Calibration& cal, std::ostream& out) {
    if (cal.pilot) {
        double peak = 0.0;
        for (const auto& r : cal.pilot->rows) peak = std::max(peak, r.mu_inf);
        out << "# pilot rho = " << format_double(cal.rho_pilot) << ", max ||mu||_inf = " << format_double(peak)
            << '\n';
    }
    out << "# epsilon_effective = " << format_double(cal.epsilon) << '\n';
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sliding-mode control of a phase-field tumor growth model"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<double> rho_override;
    std::vector<double> rhos;

    auto* sim = app.add_subcommand("simulate", "run one simulation and write its outputs");
    sim->add_option("--config", config_path, "config file")->required();
    sim->add_option("--out", out_dir, "output directory")->required();
    sim->add_option("--rho", rho_override, "override control.rho");

    auto* cert = app.add_subcommand("certify", "print the sliding certificate");
    cert->add_option("--config", config_path, "config file")->required();
    cert->add_option("--rho", rho_override, "override control.rho");

    auto* sw = app.add_subcommand("sweep", "independent runs over several control gains");
    sw->add_option("--config", config_path, "config file")->required();
    sw->add_option("--rho", rhos, "comma separated gains")->required()->delimiter(',');
    sw->add_option("--out", out_dir, "write per-run outputs below this directory");

    auto* est = app.add_subcommand("estimate-csh", "estimate the embedding constant on the config grid");
    est->add_option("--config", config_path, "config file")->required();

    auto* ver = app.add_subcommand("verify", "run the invariant suite on the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, x;
        const int code = app.exit(e, o, x);
        out << o.str();
        err << x.str();
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*ver) {
            return run_verify_suite(out) ? kExitOk : kExitInvariant;
        }
        const RunConfig config = parse_config(config_path);
        if (*est) {
            out << "C_sh = " << format_double(estimate_csh(config)) << '\n';
            return kExitOk;
        }
        const Calibration cal = calibrate(config);
        const double rho = rho_override.value_or(config.rho);
        if (*cert) {
            print_calibration(cal, out);
            out << serialize(certificate_for(cal, rho));
            return kExitOk;
        }
        if (*sim) {
            std::filesystem::path dir(out_dir);
            try {
                const SimulationOutcome o = simulate(config, cal, rho, dir);
                std::ifstream summary(dir / "summary.txt");
                out << summary.rdbuf();
            } catch (const RunAborted& e) {
                emit_timeseries(e.partial(), dir / "timeseries.partial.csv");
                throw;
            }
            return kExitOk;
        }
        if (*sw) {
            std::optional<std::filesystem::path> dir;
            if (!out_dir.empty()) dir = out_dir;
            print_calibration(cal, out);
            const auto rows = sweep(config, cal, rhos, sweep_threads(), dir);
            write_sweep_table(rows, out);
            for (const auto& r : rows)
                if (!r.error.empty()) {
                    err << "run at rho = " << format_double(r.rho) << " failed: " << r.error << '\n';
                    return kExitSolver;
                }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const GridMismatch& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitOk;
}

} // namespace phaseslide
