#include "rygate/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace rygate {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("config: " + what); }

/// View of one JSON object that hands out typed fields and rejects
/// anything it was not asked about.
class Section {
 public:
    Section(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
        if (!j_->is_object()) fail(where("") + "must be an object");
    }

    bool has(const char* key) const { return j_->contains(key); }

    void get(const char* key, double& out) { fetch(key, out, "a number"); }
    void get(const char* key, int& out) { fetch(key, out, "an integer"); }
    void get(const char* key, unsigned long& out) { fetch(key, out, "a non-negative integer"); }
    void get(const char* key, bool& out) { fetch(key, out, "a boolean"); }
    void get(const char* key, std::string& out) { fetch(key, out, "a string"); }
    void get(const char* key, std::vector<double>& out) { fetch(key, out, "an array of numbers"); }

    /// Nested object; absent sections read as empty.
    Section sub(const char* key) {
        used_.insert(key);
        static const json empty = json::object();
        const json& child = j_->contains(key) ? (*j_)[key] : empty;
        return Section(child, path_.empty() ? key : path_ + "." + key);
    }

    /// Every key must have been consumed.
    void finish() const {
        for (const auto& item : j_->items())
            if (!used_.count(item.key())) fail(where(item.key()) + "is not a recognized field");
    }

    std::string where(const std::string& key) const {
        std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
        return p.empty() ? "top level " : "'" + p + "' ";
    }

 private:
    template <typename T>
    void fetch(const char* key, T& out, const char* kind) {
        used_.insert(key);
        if (!j_->contains(key)) return;
        const json& v = (*j_)[key];
        // json::get happily truncates 2.5 into an int; gate integral targets
        // on the JSON type so typos in integer fields cannot pass silently.
        if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!v.is_number_integer()) fail(where(key) + "must be " + kind);
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned() &&
                    v.get<long long>() < 0)
                    fail(where(key) + "must be " + kind);
            }
        }
        try {
            out = v.get<T>();
        } catch (const json::exception&) {
            fail(where(key) + "must be " + kind);
        }
    }

    const json* j_;
    std::string path_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
    if (!ok) fail(message);
}

void require_choice(const std::string& value, std::initializer_list<const char*> allowed,
                    const std::string& field) {
    for (const char* a : allowed)
        if (value == a) return;
    std::string msg = "'" + field + "' must be one of {";
    bool first = true;
    for (const char* a : allowed) {
        if (!first) msg += ", ";
        msg += a;
        first = false;
    }
    fail(msg + "}, got '" + value + "'");
}

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }

    RunConfig cfg;
    Section top(root, "");
    top.get("mode", cfg.mode);
    top.get("out_dir", cfg.out_dir);
    top.get("seed", cfg.seed);
    top.get("store_stride", cfg.store_stride);

    Section sys = top.sub("system");
    sys.get("omega_r0_mhz", cfg.omega_r0_mhz);
    sys.get("omega_b0_mhz", cfg.omega_b0_mhz);
    sys.get("detuning_mhz", cfg.detuning_mhz);
    if (sys.has("delta_mhz")) {
        cfg.delta_auto = false;
        sys.get("delta_mhz", cfg.delta_mhz);
    }
    sys.get("c3_mhz_um3", cfg.c3_mhz_um3);
    sys.get("lifetime_i_ns", cfg.lifetime_i_ns);
    sys.get("lifetime_r_us", cfg.lifetime_r_us);
    sys.get("trap_khz", cfg.trap_khz);
    sys.get("r0_um", cfg.r0_um);
    sys.get("trap_on_during_gate", cfg.trap_on_during_gate);
    sys.get("detuning_convention", cfg.detuning_convention);
    sys.finish();

    Section grid = top.sub("grid");
    grid.get("n_r", cfg.n_r);
    grid.get("extent_um", cfg.grid_extent_um);
    grid.finish();

    Section time = top.sub("time");
    time.get("duration_ns", cfg.duration_ns);
    time.get("dt_ns", cfg.dt_ns);
    time.finish();

    Section opt = top.sub("optimization");
    opt.get("variant", cfg.variant);
    opt.get("alpha", cfg.alpha);
    opt.get("lambda_c", cfg.lambda_c);
    opt.get("stop_error", cfg.stop_error);
    opt.get("max_iterations", cfg.max_iterations);
    opt.get("guess_scale", cfg.guess_scale);
    opt.get("phased_state", cfg.phased_state);
    opt.get("chi", cfg.chi);
    opt.get("threads", cfg.threads);
    opt.finish();

    Section prop = top.sub("propagate");
    prop.get("initial_state", cfg.initial_state);
    prop.get("fields_file", cfg.fields_file);
    prop.get("with_decay", cfg.with_decay);
    prop.finish();

    Section sweep = top.sub("sweep");
    sweep.get("times_ns", cfg.sweep_times_ns);
    sweep.finish();

    Section noise = top.sub("noise");
    noise.get("z_um", cfg.noise.z);
    noise.get("temperature_k", cfg.noise.temperature);
    noise.get("n_star", cfg.noise.n_star);
    noise.get("n_principal", cfg.noise.n_principal);
    noise.get("alpha_r_mhz", cfg.noise.alpha_r);
    noise.get("d_r_eab", cfg.noise.d_r);
    noise.get("s_e_ref", cfg.noise.s_e_ref);
    noise.get("z_ref_um", cfg.noise.z_ref);
    if (noise.has("f_ref_mhz")) {
        double f_ref_mhz = 1.0;
        noise.get("f_ref_mhz", f_ref_mhz);
        require(f_ref_mhz > 0, "'noise.f_ref_mhz' must be positive");
        cfg.noise.omega_ref = 2.0 * units::pi * f_ref_mhz * 1e6;
    }
    noise.get("beta", cfg.noise.beta);
    noise.get("tau_ns", cfg.noise.tau);
    noise.get("enhancement", cfg.noise.enhancement);
    noise.get("adsorbate_density_um2", cfg.noise.adsorbate_density);
    noise.get("patch_extent_um", cfg.noise.patch_extent);
    noise.finish();

    top.finish();

    require_choice(cfg.mode, {"optimize", "propagate", "evaluate-loss", "noise-budget", "sweep-T"},
                   "mode");
    require_choice(cfg.detuning_convention, {"half", "full"}, "system.detuning_convention");
    require_choice(cfg.variant, {"standard", "state_constrained"}, "optimization.variant");
    require_choice(cfg.phased_state, {"00", "11"}, "optimization.phased_state");

    require(cfg.omega_r0_mhz > 0 && cfg.omega_b0_mhz > 0, "Rabi caps must be positive");
    require(cfg.detuning_mhz != 0, "'system.detuning_mhz' must be nonzero");
    require(cfg.c3_mhz_um3 >= 0, "'system.c3_mhz_um3' must be non-negative");
    require(cfg.lifetime_i_ns >= 0 && cfg.lifetime_r_us >= 0, "lifetimes must be non-negative");
    require(cfg.trap_khz >= 0, "'system.trap_khz' must be non-negative");
    require(cfg.r0_um > 0, "'system.r0_um' must be positive");
    require(cfg.n_r >= 2, "'grid.n_r' must be at least 2");
    require(cfg.grid_extent_um > 0, "'grid.extent_um' must be positive");
    require(cfg.duration_ns > 0 && cfg.dt_ns > 0, "duration and dt must be positive");
    require(cfg.dt_ns <= cfg.duration_ns, "'time.dt_ns' must not exceed the duration");
    require(cfg.alpha > 0, "'optimization.alpha' must be positive");
    require(cfg.lambda_c >= 0, "'optimization.lambda_c' must be non-negative");
    require(cfg.stop_error >= 0, "'optimization.stop_error' must be non-negative");
    require(cfg.max_iterations >= 0, "'optimization.max_iterations' must be non-negative");
    require(cfg.guess_scale >= 0 && cfg.guess_scale <= 2,
            "'optimization.guess_scale' must lie in [0, 2]");
    require(cfg.chi > -units::pi - 1e-12 && cfg.chi <= units::pi + 1e-12,
            "'optimization.chi' must lie in (-pi, pi]");
    require(cfg.threads >= 0, "'optimization.threads' must be non-negative");
    require(cfg.store_stride >= 0, "'store_stride' must be non-negative");
    require(cfg.initial_state.size() == 2, "'propagate.initial_state' must be two characters");
    parse_level(cfg.initial_state[0]);
    parse_level(cfg.initial_state[1]);
    for (double t : cfg.sweep_times_ns)
        require(t > 0, "'sweep.times_ns' entries must be positive");
    require(cfg.noise.z > 0 && cfg.noise.z_ref > 0, "noise distances must be positive");
    require(cfg.noise.tau > 0, "'noise.tau_ns' must be positive");
    require(cfg.noise.temperature >= 0, "'noise.temperature_k' must be non-negative");
    require(cfg.noise.enhancement >= 0, "'noise.enhancement' must be non-negative");
    require(cfg.noise.adsorbate_density >= 0, "'noise.adsorbate_density_um2' must be non-negative");
    require(cfg.noise.patch_extent >= 0, "'noise.patch_extent_um' must be non-negative");
    require(cfg.noise.n_principal >= 1, "'noise.n_principal' must be at least 1");

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["mode"] = cfg.mode;
    j["out_dir"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["store_stride"] = cfg.store_stride;

    ordered_json& sys = j["system"];
    sys["omega_r0_mhz"] = cfg.omega_r0_mhz;
    sys["omega_b0_mhz"] = cfg.omega_b0_mhz;
    sys["detuning_mhz"] = cfg.detuning_mhz;
    if (!cfg.delta_auto) sys["delta_mhz"] = cfg.delta_mhz;
    sys["c3_mhz_um3"] = cfg.c3_mhz_um3;
    sys["lifetime_i_ns"] = cfg.lifetime_i_ns;
    sys["lifetime_r_us"] = cfg.lifetime_r_us;
    sys["trap_khz"] = cfg.trap_khz;
    sys["r0_um"] = cfg.r0_um;
    sys["trap_on_during_gate"] = cfg.trap_on_during_gate;
    sys["detuning_convention"] = cfg.detuning_convention;

    ordered_json& grid = j["grid"];
    grid["n_r"] = cfg.n_r;
    grid["extent_um"] = cfg.grid_extent_um;

    ordered_json& time = j["time"];
    time["duration_ns"] = cfg.duration_ns;
    time["dt_ns"] = cfg.dt_ns;

    ordered_json& opt = j["optimization"];
    opt["variant"] = cfg.variant;
    opt["alpha"] = cfg.alpha;
    opt["lambda_c"] = cfg.lambda_c;
    opt["stop_error"] = cfg.stop_error;
    opt["max_iterations"] = cfg.max_iterations;
    opt["guess_scale"] = cfg.guess_scale;
    opt["phased_state"] = cfg.phased_state;
    opt["chi"] = cfg.chi;
    opt["threads"] = cfg.threads;

    ordered_json& prop = j["propagate"];
    prop["initial_state"] = cfg.initial_state;
    prop["fields_file"] = cfg.fields_file;
    prop["with_decay"] = cfg.with_decay;

    j["sweep"]["times_ns"] = cfg.sweep_times_ns;

    ordered_json& noise = j["noise"];
    noise["z_um"] = cfg.noise.z;
    noise["temperature_k"] = cfg.noise.temperature;
    noise["n_star"] = cfg.noise.n_star;
    noise["n_principal"] = cfg.noise.n_principal;
    noise["alpha_r_mhz"] = cfg.noise.alpha_r;
    noise["d_r_eab"] = cfg.noise.d_r;
    noise["s_e_ref"] = cfg.noise.s_e_ref;
    noise["z_ref_um"] = cfg.noise.z_ref;
    noise["f_ref_mhz"] = cfg.noise.omega_ref / (2.0 * units::pi * 1e6);
    noise["beta"] = cfg.noise.beta;
    noise["tau_ns"] = cfg.noise.tau;
    noise["enhancement"] = cfg.noise.enhancement;
    noise["adsorbate_density_um2"] = cfg.noise.adsorbate_density;
    noise["patch_extent_um"] = cfg.noise.patch_extent;

    return j.dump(2) + "\n";
}

SystemParameters make_system_parameters(const RunConfig& cfg) {
    SystemParameters p;
    p.omega_r0 = units::mhz_to_angular(cfg.omega_r0_mhz);
    p.omega_b0 = units::mhz_to_angular(cfg.omega_b0_mhz);
    p.detuning_1 = units::mhz_to_angular(cfg.detuning_mhz);
    p.detuning_2 = cfg.delta_auto ? stark_detuning(p.omega_r0, p.omega_b0, p.detuning_1)
                                  : units::mhz_to_angular(cfg.delta_mhz);
    p.c3 = units::mhz_to_angular(cfg.c3_mhz_um3);
    p.gamma_i = cfg.lifetime_i_ns > 0 ? 1.0 / cfg.lifetime_i_ns : 0.0;
    p.gamma_r = cfg.lifetime_r_us > 0 ? 1.0 / (1e3 * cfg.lifetime_r_us) : 0.0;
    p.mass = units::rb87_mass();
    p.trap_omega = units::mhz_to_angular(1e-3 * cfg.trap_khz);
    p.r0 = cfg.r0_um;
    p.trap_on_during_gate = cfg.trap_on_during_gate;
    p.convention =
        cfg.detuning_convention == "half" ? DetuningConvention::half : DetuningConvention::full;
    return p;
}

SpatialGrid make_grid(const RunConfig& cfg) {
    return build_grid(cfg.r0_um - cfg.grid_extent_um, cfg.r0_um + cfg.grid_extent_um, cfg.n_r);
}

int make_n_t(const RunConfig& cfg) {
    const int n_t = static_cast<int>(std::lround(cfg.duration_ns / cfg.dt_ns));
    return n_t < 1 ? 1 : n_t;
}

OptimizationConfig make_optimization_config(const RunConfig& cfg) {
    OptimizationConfig oc;
    oc.variant = cfg.variant == "standard" ? FunctionalVariant::standard
                                           : FunctionalVariant::state_constrained;
    oc.target.chi = cfg.chi;
    oc.target.phased = cfg.phased_state == "00" ? PhasedState::s00 : PhasedState::s11;
    oc.alpha = cfg.alpha;
    oc.lambda_c = cfg.lambda_c;
    oc.stop_error = cfg.stop_error;
    oc.max_iterations = cfg.max_iterations;
    oc.threads = cfg.threads;
    return oc;
}

Level parse_level(char c) {
    switch (c) {
        case '0': return Level::q0;
        case '1': return Level::q1;
        case 'i': return Level::i;
        case 'r': return Level::r;
        default: fail(std::string("level character must be one of 0,1,i,r, got '") + c + "'");
    }
}

std::string fmt_number(double x) {
    char buf[40];
    if (x != 0.0 && std::abs(x) < 1e-3)
        std::snprintf(buf, sizeof buf, "%.12e", x);
    else
        std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void write_convergence_csv(const std::string& path, const std::vector<IterationRecord>& history) {
    std::ofstream out = open_output(path);
    out << "iteration,J,F,constraint_avg\n";
    for (const auto& r : history)
        out << r.iteration << ',' << fmt_number(r.j_total) << ',' << fmt_number(r.fidelity) << ','
            << fmt_number(r.constraint_avg) << '\n';
}

void write_fields_csv(const std::string& path, const ControlField& fields,
                      const SystemParameters& params) {
    std::ofstream out = open_output(path);
    out << "t_ns,eps_R,eps_B,Omega_R_MHz,Omega_B_MHz\n";
    for (int n = 0; n <= fields.n_t; ++n) {
        const double wr = rabi_from_control(fields.eps_r[n], params.omega_r0);
        const double wb = rabi_from_control(fields.eps_b[n], params.omega_b0);
        out << fmt_number(n * fields.dt) << ',' << fmt_number(fields.eps_r[n]) << ','
            << fmt_number(fields.eps_b[n]) << ',' << fmt_number(units::angular_to_mhz(wr)) << ','
            << fmt_number(units::angular_to_mhz(wb)) << '\n';
    }
}

void write_populations_csv(const std::string& path, const PopulationTable& table) {
    std::ofstream out = open_output(path);
    out << "t_ns";
    for (int c = 0; c < n_channels; ++c) out << ",p" << channel_label(c);
    out << '\n';
    for (size_t m = 0; m < table.times.size(); ++m) {
        out << fmt_number(table.times[m]);
        for (int c = 0; c < n_channels; ++c) out << ',' << fmt_number(table.rows[m][c]);
        out << '\n';
    }
}

void write_spectrum_csv(const std::string& path, const PulseSpectrum& spec) {
    std::ofstream out = open_output(path);
    out << "f_MHz,amp_R,amp_B\n";
    for (size_t k = 0; k < spec.freq_mhz.size(); ++k)
        out << fmt_number(spec.freq_mhz[k]) << ',' << fmt_number(spec.amp_r[k]) << ','
            << fmt_number(spec.amp_b[k]) << '\n';
}

void write_table_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out = open_output(path);
    out << "T_ns,error_no_loss,error_with_loss\n";
    for (const auto& r : rows)
        out << fmt_number(r.t_ns) << ',' << fmt_number(r.error_no_loss) << ','
            << fmt_number(r.error_with_loss) << '\n';
}

void write_result_json(const std::string& path, const ResultSummary& summary) {
    ordered_json j;
    j["gate_error"] = summary.gate_error;
    j["nonlocal_phase"] = summary.nonlocal_phase;
    j["motional_leakage"] = summary.motional_leakage;
    j["fidelity"] = summary.fidelity;
    j["iterations"] = summary.iterations;
    j["converged"] = summary.converged;
    j["wall_time"] = summary.wall_time;
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_noise_budget_json(const std::string& path, const NoiseBudget& b) {
    ordered_json j;
    j["impurity_field_v_m"] = b.impurity_field_v_m;
    j["adsorbate_field_v_m"] = b.adsorbate_field_v_m;
    j["stark_element_mhz"] = b.stark_element_mhz;
    j["stark_shift_mhz"] = b.stark_shift_mhz;
    j["induced_dipole_eab"] = b.induced_dipole_eab;
    j["stark_exceeds_forster"] = b.stark_exceeds_forster;
    j["stark_exceeds_interaction"] = b.stark_exceeds_interaction;
    j["dephasing_variance_rad2"] = b.dephasing_variance_rad2;
    j["dephasing_rate_s"] = b.dephasing_rate_s;
    j["dephasing_error"] = b.dephasing_error;
    j["free_decay_rate_s"] = b.free_decay_rate_s;
    j["chip_decay_rate_s"] = b.chip_decay_rate_s;
    j["lifetime_free_us"] = b.lifetime_free_us;
    j["lifetime_chip_us"] = b.lifetime_chip_us;
    j["decay_error"] = b.decay_error;
    j["vdw_shift_mhz"] = b.vdw_shift_mhz;
    j["vdw_sign"] = b.vdw_sign;
    j["blackbody_free_khz"] = b.blackbody_free_khz;
    j["blackbody_total_khz"] = b.blackbody_total_khz;
    j["spacing_ghz"] = b.spacing_ghz;
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

ControlField read_fields_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read fields file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_ns,eps_R,eps_B", 0) != 0)
        fail("fields file '" + path + "' has an unexpected header");

    std::vector<double> t, er, eb;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail("fields file '" + path + "': bad number '" + cell + "'");
            }
        }
        if (vals.size() < 3) fail("fields file '" + path + "': short row");
        t.push_back(vals[0]);
        er.push_back(vals[1]);
        eb.push_back(vals[2]);
    }
    if (t.size() < 2) fail("fields file '" + path + "' needs at least two samples");

    ControlField f;
    f.n_t = static_cast<int>(t.size()) - 1;
    f.duration = t.back() - t.front();
    f.dt = f.duration / f.n_t;
    for (size_t m = 0; m < t.size(); ++m) {
        const double expected = t.front() + static_cast<double>(m) * f.dt;
        if (std::abs(t[m] - expected) > 1e-6 * (1.0 + std::abs(expected)))
            fail("fields file '" + path + "': time samples are not equidistant");
    }
    f.eps_r = std::move(er);
    f.eps_b = std::move(eb);
    return f;
}

}  // namespace rygate
