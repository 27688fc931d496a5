#include "rygate/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rygate/fft.hpp"
#include "rygate/units.hpp"

namespace rygate {

namespace {
constexpr std::complex<double> imag_unit{0.0, 1.0};
}

std::string channel_label(int c) {
    static const char names[n_levels + 1] = "01ir";
    std::string s;
    s += names[c / n_levels];
    s += names[c % n_levels];
    return s;
}

RegisterMatrix project_to_register(const std::array<TwoAtomState, 4>& finals,
                                   const std::array<TwoAtomState, 4>& basis,
                                   const SpatialGrid& grid) {
    RegisterMatrix m;
    for (int row = 0; row < 4; ++row)
        for (int col = 0; col < 4; ++col) m[row][col] = inner(basis[row], finals[col], grid);
    return m;
}

double gate_error(const RegisterMatrix& m, const GateTarget& target) {
    std::complex<double> tau = 0.0;
    for (int b = 0; b < 4; ++b) tau += std::exp(-imag_unit * target.phase_of(b)) * m[b][b];
    return 1.0 - 0.25 * std::abs(tau);
}

double gate_error(const std::array<TwoAtomState, 4>& finals, const GateTarget& target,
                  const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid) {
    return gate_error(project_to_register(finals, basis, grid), target);
}

double motional_leakage(const std::array<TwoAtomState, 4>& finals,
                        const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid) {
    double recovered = 0.0;
    for (int b = 0; b < 4; ++b) recovered += std::norm(inner(basis[b], finals[b], grid));
    return 1.0 - 0.25 * recovered;
}

PopulationTable population_dynamics(const Trajectory& traj, const SpatialGrid& grid) {
    PopulationTable table;
    table.times = traj.times;
    table.rows.reserve(traj.states.size());
    for (const auto& psi : traj.states) {
        std::array<double, n_channels> row{};
        for (int c = 0; c < n_channels; ++c) {
            const std::complex<double>* line = psi.channel(c);
            double s = 0.0;
            for (int j = 0; j < psi.n_r; ++j) s += std::norm(line[j]);
            row[c] = grid.dr * s;
        }
        table.rows.push_back(row);
    }
    return table;
}

PulseSpectrum pulse_spectrum(const ControlField& fields, const SystemParameters& params,
                             bool raw) {
    const int n = fields.n_t + 1;
    const int n_pad = 4 * n;

    std::vector<double> omega_r(n), omega_b(n);
    for (int j = 0; j < n; ++j) {
        omega_r[j] = units::angular_to_mhz(rabi_from_control(fields.eps_r[j], params.omega_r0));
        omega_b[j] = units::angular_to_mhz(rabi_from_control(fields.eps_b[j], params.omega_b0));
    }

    std::vector<double> window(n, 1.0);
    if (!raw) {
        for (auto* line : {&omega_r, &omega_b}) {
            double mean = 0.0;
            for (double v : *line) mean += v;
            mean /= n;
            for (double& v : *line) v -= mean;
        }
        for (int j = 0; j < n; ++j)
            window[j] = 0.5 * (1.0 - std::cos(2.0 * units::pi * j / (n - 1)));
    }
    double window_sum = 0.0;
    for (double w : window) window_sum += w;

    fft::Plan plan(n_pad);
    std::vector<std::complex<double>> buf(n_pad);
    PulseSpectrum spec;
    const int n_keep = n_pad / 2 + 1;
    spec.freq_mhz.resize(n_keep);
    for (int k = 0; k < n_keep; ++k)
        spec.freq_mhz[k] = 1e3 * k / (n_pad * fields.dt);

    auto transform = [&](const std::vector<double>& line, std::vector<double>& amp) {
        std::fill(buf.begin(), buf.end(), std::complex<double>{0.0, 0.0});
        for (int j = 0; j < n; ++j) buf[j] = window[j] * line[j];
        plan.forward(buf.data());
        amp.resize(n_keep);
        for (int k = 0; k < n_keep; ++k) {
            const double one_sided = (k == 0 || k == n_pad / 2) ? 1.0 : 2.0;
            amp[k] = one_sided * std::abs(buf[k]) / window_sum;
        }
    };
    transform(omega_r, spec.amp_r);
    transform(omega_b, spec.amp_b);
    return spec;
}

ForceKickReport force_kick_check(const SystemParameters& params) {
    ForceKickReport rep;
    rep.delta_p = 3.0 * units::pi / params.r0;
    rep.ground_size = std::sqrt(1.0 / (params.mass * params.trap_omega));
    rep.size_limit = std::sqrt(2.0) / (3.0 * units::pi) * params.r0;
    rep.ratio = rep.ground_size / rep.size_limit;
    rep.motional_error = rep.delta_p * rep.delta_p / (2.0 * params.mass * params.trap_omega);
    rep.condition_met = rep.ratio < 1.0;
    return rep;
}

}  // namespace rygate
