#pragma once

#include <string>
#include <vector>

#include "rygate/krotov.hpp"
#include "rygate/metrics.hpp"
#include "rygate/noise.hpp"
#include "rygate/system.hpp"

namespace rygate {

/// One batch job, as read from a JSON config file. All physical inputs are
/// in laboratory units (MHz, kHz, ns, us, um, K); conversion to internal
/// units happens in the make_* builders below and nowhere else.
struct RunConfig {
    std::string mode = "optimize";  ///< optimize|propagate|evaluate-loss|noise-budget|sweep-T
    std::string out_dir = "out";
    unsigned long seed = 0;  ///< reserved for randomized utilities; recorded in outputs
    int store_stride = 10;   ///< trajectory sampling stride for populations.csv

    // system
    double omega_r0_mhz = 260.0;
    double omega_b0_mhz = 260.0;
    double detuning_mhz = 600.0;
    bool delta_auto = true;  ///< two-photon detuning from the Stark-shift formula
    double delta_mhz = 0.0;  ///< used only when delta_auto is false
    double c3_mhz_um3 = 3230.0;
    double lifetime_i_ns = 27.7;  ///< 0 disables the |i> decay channel
    double lifetime_r_us = 210.0; ///< 0 disables the |r> decay channel
    double trap_khz = 276.0;
    double r0_um = 4.0;
    bool trap_on_during_gate = false;
    std::string detuning_convention = "half";  ///< half|full

    // grid
    int n_r = 256;
    double grid_extent_um = 0.3;

    // time
    double duration_ns = 50.0;
    double dt_ns = 0.025;

    // optimization
    std::string variant = "standard";  ///< standard|state_constrained
    double alpha = 1.0;
    double lambda_c = 1.0;
    double stop_error = 1e-3;
    int max_iterations = 5000;
    double guess_scale = 1.0;
    std::string phased_state = "11";  ///< 00|11
    double chi = units::pi;
    int threads = 0;

    // propagate / evaluate-loss
    std::string initial_state = "11";  ///< two characters from {0,1,i,r}
    std::string fields_file;           ///< empty: use the guess pulse
    bool with_decay = false;           ///< propagate mode only

    // sweep-T
    std::vector<double> sweep_times_ns = {30, 40, 50, 60, 70, 80};

    NoiseParameters noise;
};

/// Strict parse: unknown keys, wrong types, or out-of-range values raise
/// std::invalid_argument naming the offending field.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Serialization that survives a parse round trip field-for-field.
std::string config_to_json(const RunConfig& cfg);

// Builders into internal units.
SystemParameters make_system_parameters(const RunConfig& cfg);
SpatialGrid make_grid(const RunConfig& cfg);
/// Number of propagation steps: round(duration/dt); the stored dt is then
/// duration/n_t exactly.
int make_n_t(const RunConfig& cfg);
OptimizationConfig make_optimization_config(const RunConfig& cfg);
Level parse_level(char c);

/// CSV cell format: scientific with 12 digits for 0 < |x| < 1e-3,
/// otherwise up to 12 significant digits; '.' decimal separator.
std::string fmt_number(double x);

// Output files. Every writer creates the parent directory if needed and
// terminates the file with a newline.
void write_convergence_csv(const std::string& path, const std::vector<IterationRecord>& history);
void write_fields_csv(const std::string& path, const ControlField& fields,
                      const SystemParameters& params);
void write_populations_csv(const std::string& path, const PopulationTable& table);
void write_spectrum_csv(const std::string& path, const PulseSpectrum& spec);

struct SweepRow {
    double t_ns = 0.0;
    double error_no_loss = 0.0;
    double error_with_loss = 0.0;
};
void write_table_csv(const std::string& path, const std::vector<SweepRow>& rows);

struct ResultSummary {
    double gate_error = 0.0;
    double nonlocal_phase = 0.0;
    double motional_leakage = 0.0;
    double fidelity = 0.0;
    double wall_time = 0.0;  ///< seconds
    int iterations = 0;
    bool converged = false;
};
void write_result_json(const std::string& path, const ResultSummary& summary);
void write_noise_budget_json(const std::string& path, const NoiseBudget& budget);

/// Inverse of write_fields_csv (reads the eps columns; the Omega columns
/// are redundant). Throws std::invalid_argument on malformed input.
ControlField read_fields_csv(const std::string& path);

}  // namespace rygate
