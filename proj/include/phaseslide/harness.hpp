#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phaseslide/config.hpp"
#include "phaseslide/dynamics.hpp"
#include "phaseslide/sliding.hpp"

namespace phaseslide {

/// rho-independent ingredients of the certificate.
struct Calibration {
    SlidingConstants constants;
    double C_sh = 0.0;
    Provenance C_sh_source = Provenance::estimated;
    double C_sys = 0.0;
    double C_hat = 0.0;
    Provenance C_hat_source = Provenance::user_supplied;
    double tau = 0.0;
    double horizon = 0.0;
    double measure = 0.0;
    double epsilon = 0.0;  ///< effective regularization
    std::optional<TimeSeries> pilot;
    double rho_pilot = 0.0;
};

double estimate_csh(const RunConfig& config);

/// Resolves C_sh and C_hat (running the pilot when the config asks for it).
Calibration calibrate(const RunConfig& config);

SlidingCertificate certificate_for(const Calibration& cal, double rho);

/// sliding.delta if given, else max(1e-3 M0, eps A_rho / rho) when the certificate has T*,
/// else 1e-3 M0. The second term is the width of the band the regularized control can hold.
double reaching_tolerance(const RunConfig& config, const Calibration& cal, const SlidingCertificate& cert);

struct SimulationOutcome {
    RunResult result;
    SlidingCertificate certificate;
    double delta_slide = 0.0;
    std::optional<double> t_num;
    std::optional<EnvelopeReport> envelope;  ///< present when the certificate has T*
    double envelope_tol = 0.0;
    double mu_bound_excess = 0.0;  ///< max_t ||mu||_inf - (C_sys rho + C_hat)
};

/// Full run at `rho`. When `out_dir` is set, writes timeseries.csv, certificate.txt,
/// summary.txt, config.toml and snapshots.
SimulationOutcome simulate(const RunConfig& config, const Calibration& cal, double rho,
                           const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct SweepRow {
    double rho = 0.0;
    std::optional<double> t_num;
    std::optional<double> T_star;
    std::optional<bool> passed_envelope;
    double mu_bound_excess = 0.0;
    double final_dev = 0.0;
    std::string error;  ///< nonempty if the run aborted

    bool operator==(const SweepRow&) const = default;
};

/// Worker cap: PHASESLIDE_THREADS if set to a positive integer, else hardware concurrency.
unsigned sweep_threads();

/// One run per rho (concurrently, `threads` workers). Rows sorted by rho.
std::vector<SweepRow> sweep(const RunConfig& config, const Calibration& cal, std::vector<double> rhos,
                            unsigned threads, const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_sweep_table(const std::vector<SweepRow>& rows, std::ostream& os);

/// Invariant checks on the built-in scenarios; one PASS/FAIL line each. True if all pass.
bool run_verify_suite(std::ostream& os);

/// The reference scenario with its defaults.
RunConfig reference_scenario();

} // namespace phaseslide
