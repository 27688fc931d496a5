// Batch driver: reads a JSON config, runs one job (optimization,
// propagation, loss evaluation, noise budget, or a gate-time sweep) and
// writes the data files described in the README.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rygate/config.hpp"
#include "rygate/errors.hpp"
#include "rygate/krotov.hpp"
#include "rygate/metrics.hpp"
#include "rygate/noise.hpp"
#include "rygate/propagator.hpp"

namespace {

using namespace rygate;

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

ControlField initial_field(const RunConfig& cfg, const SystemParameters& params) {
    if (!cfg.fields_file.empty()) return read_fields_csv(cfg.fields_file);
    return make_guess_field(cfg.duration_ns, make_n_t(cfg), params, cfg.guess_scale);
}

/// Full optimization of one configuration; writes the per-run files into
/// out_dir and returns the summary.
ResultSummary run_optimize(const RunConfig& cfg, const std::string& out_dir, bool quiet) {
    const SystemParameters params = make_system_parameters(cfg);
    const SpatialGrid grid = make_grid(cfg);
    const Hamiltonian h(params, grid);
    const ControlField guess = initial_field(cfg, params);

    const auto t0 = std::chrono::steady_clock::now();
    Krotov solver(h, guess, make_optimization_config(cfg));
    OptimizationResult res = solver.optimize();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

    ResultSummary summary;
    summary.gate_error = res.gate_error;
    summary.fidelity = res.history.back().fidelity;
    summary.iterations = res.iterations;
    summary.converged = res.converged;
    summary.wall_time = elapsed.count();
    summary.motional_leakage = motional_leakage(res.final_states, solver.basis(), grid);
    try {
        summary.nonlocal_phase = nonlocal_phase(res.final_states, solver.basis(), grid);
    } catch (const std::domain_error&) {
        summary.nonlocal_phase = std::nan("");  // serialized as null
    }

    write_convergence_csv(join(out_dir, "convergence.csv"), res.history);
    write_fields_csv(join(out_dir, "fields.csv"), res.fields, params);
    write_spectrum_csv(join(out_dir, "spectrum.csv"), pulse_spectrum(res.fields, params));
    write_result_json(join(out_dir, "result.json"), summary);

    const TwoAtomState psi0 = make_register_state(grid, params, parse_level(cfg.initial_state[0]),
                                                  parse_level(cfg.initial_state[1]));
    const Trajectory traj =
        propagate(psi0, res.fields, h, ApplyMode::hermitian, std::max(1, cfg.store_stride));
    write_populations_csv(join(out_dir, "populations.csv"), population_dynamics(traj, grid));

    if (!quiet)
        std::printf("optimize T=%g ns: error %.3e after %d iterations (%s, %.1f s)\n",
                    cfg.duration_ns, summary.gate_error, summary.iterations,
                    summary.converged ? "converged" : "iteration limit", summary.wall_time);
    return summary;
}

int run_propagate(const RunConfig& cfg, bool quiet) {
    const SystemParameters params = make_system_parameters(cfg);
    const SpatialGrid grid = make_grid(cfg);
    const Hamiltonian h(params, grid);
    const ControlField fields = initial_field(cfg, params);
    const TwoAtomState psi0 = make_register_state(grid, params, parse_level(cfg.initial_state[0]),
                                                  parse_level(cfg.initial_state[1]));
    const ApplyMode mode = cfg.with_decay ? ApplyMode::with_decay : ApplyMode::hermitian;
    const Trajectory traj = propagate(psi0, fields, h, mode, std::max(1, cfg.store_stride));
    write_fields_csv(join(cfg.out_dir, "fields.csv"), fields, params);
    write_populations_csv(join(cfg.out_dir, "populations.csv"), population_dynamics(traj, grid));
    if (!quiet)
        std::printf("propagate |%s>: final norm %.12f\n", cfg.initial_state.c_str(),
                    norm(traj.states.back(), grid));
    return 0;
}

int run_evaluate_loss(const RunConfig& cfg, bool quiet) {
    const SystemParameters params = make_system_parameters(cfg);
    const SpatialGrid grid = make_grid(cfg);
    const ControlField fields = initial_field(cfg, params);
    const GateTarget target = make_optimization_config(cfg).target;

    const auto t0 = std::chrono::steady_clock::now();
    const Hamiltonian h(params, grid);
    const auto basis = make_register_basis(grid, params);
    std::array<TwoAtomState, 4> finals;
    for (int b = 0; b < 4; ++b)
        finals[b] = propagate(basis[b], fields, h, ApplyMode::with_decay).states.back();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

    ResultSummary summary;
    summary.fidelity = fidelity(finals, target, basis, grid);
    summary.gate_error = 1.0 - summary.fidelity;
    summary.motional_leakage = motional_leakage(finals, basis, grid);
    summary.wall_time = elapsed.count();
    try {
        summary.nonlocal_phase = nonlocal_phase(finals, basis, grid);
    } catch (const std::domain_error&) {
        summary.nonlocal_phase = std::nan("");
    }
    write_result_json(join(cfg.out_dir, "result.json"), summary);
    if (!quiet) std::printf("evaluate-loss: gate error %.3e\n", summary.gate_error);
    return 0;
}

int run_sweep(const RunConfig& cfg, bool quiet) {
    std::vector<SweepRow> rows;
    for (double t_ns : cfg.sweep_times_ns) {
        RunConfig point = cfg;
        point.duration_ns = t_ns;
        char name[32];
        std::snprintf(name, sizeof name, "T_%g", t_ns);
        const std::string sub = join(cfg.out_dir, name);
        const ResultSummary summary = run_optimize(point, sub, quiet);

        const SystemParameters params = make_system_parameters(point);
        const SpatialGrid grid = make_grid(point);
        const ControlField fields = read_fields_csv(join(sub, "fields.csv"));
        SweepRow row;
        row.t_ns = t_ns;
        row.error_no_loss = summary.gate_error;
        row.error_with_loss = evaluate_with_loss(fields, params, grid, params.gamma_i,
                                                 params.gamma_r,
                                                 make_optimization_config(point).target);
        rows.push_back(row);
    }
    write_table_csv(join(cfg.out_dir, "table.csv"), rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shaped-pulse optimizer for a two-atom Rydberg phase gate"};
    std::string config_path, mode_override, out_override;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON config file (defaults apply if omitted)");
    app.add_option("--mode", mode_override,
                   "override the config mode "
                   "(optimize|propagate|evaluate-loss|noise-budget|sweep-T)");
    app.add_option("--out", out_override, "override the output directory");
    app.add_flag("--quiet", quiet, "suppress progress output");
    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!mode_override.empty()) {
            cfg.mode = mode_override;
            cfg = parse_config(config_to_json(cfg));  // revalidate
        }
        if (!out_override.empty()) cfg.out_dir = out_override;

        if (cfg.mode == "optimize") {
            run_optimize(cfg, cfg.out_dir, quiet);
            return 0;
        }
        if (cfg.mode == "propagate") return run_propagate(cfg, quiet);
        if (cfg.mode == "evaluate-loss") return run_evaluate_loss(cfg, quiet);
        if (cfg.mode == "noise-budget") {
            write_noise_budget_json(join(cfg.out_dir, "noise_budget.json"),
                                    noise_budget_report(cfg.noise));
            if (!quiet) std::printf("noise-budget written to %s\n", cfg.out_dir.c_str());
            return 0;
        }
        return run_sweep(cfg, quiet);
    } catch (const monotonicity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
