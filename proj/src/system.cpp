#include "rygate/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rygate/units.hpp"

namespace rygate {

namespace {

constexpr std::complex<double> imag_unit{0.0, 1.0};

int level_of(int c, int atom) {
    return atom == 0 ? c / n_levels : c % n_levels;
}

}  // namespace

double stark_detuning(double omega_r0, double omega_b0, double detuning_1) {
    if (detuning_1 == 0.0)
        throw std::invalid_argument("stark_detuning: one-photon detuning must be nonzero");
    return (omega_b0 * omega_b0 - omega_r0 * omega_r0) / (4.0 * detuning_1);
}

double rabi_from_control(double eps, double omega0) {
    return 0.5 * omega0 * (std::tanh(eps) + 1.0);
}

double control_from_rabi(double omega, double omega0) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("control_from_rabi: omega0 must be > 0");
    // Keep the argument strictly inside (-1, 1); the clamp bounds eps to
    // about +-10, where Omega already saturates to 9 digits.
    const double x = std::clamp(2.0 * omega / omega0 - 1.0, -1.0 + 4e-9, 1.0 - 4e-9);
    return std::atanh(x);
}

double interaction_potential(double r, double c3) {
    if (!(r > 0.0)) throw std::invalid_argument("interaction_potential: r must be positive");
    return c3 / (r * r * r);
}

ControlField make_zero_field(double duration, int n_t) {
    if (!(duration > 0.0) || n_t < 1)
        throw std::invalid_argument("make_zero_field: need duration > 0 and n_t >= 1");
    ControlField f;
    f.duration = duration;
    f.n_t = n_t;
    f.dt = duration / n_t;
    f.eps_r.assign(n_t + 1, 0.0);
    f.eps_b.assign(n_t + 1, 0.0);
    return f;
}

ControlField make_guess_field(double duration, int n_t, const SystemParameters& params,
                              double scale) {
    ControlField f = make_zero_field(duration, n_t);
    for (int j = 0; j <= n_t; ++j) {
        const double s = std::sin(units::pi * j * f.dt / duration);
        const double envelope = scale * 0.5 * s * s;
        f.eps_r[j] = control_from_rabi(envelope * params.omega_r0, params.omega_r0);
        f.eps_b[j] = control_from_rabi(envelope * params.omega_b0, params.omega_b0);
    }
    return f;
}

double norm(const TwoAtomState& psi, const SpatialGrid& grid) {
    double s = 0.0;
    for (const auto& a : psi.amp) s += std::norm(a);
    return std::sqrt(grid.dr * s);
}

std::complex<double> inner(const TwoAtomState& a, const TwoAtomState& b, const SpatialGrid& grid) {
    if (a.amp.size() != b.amp.size()) throw std::invalid_argument("inner: size mismatch");
    std::complex<double> s = 0.0;
    for (size_t j = 0; j < a.amp.size(); ++j) s += std::conj(a.amp[j]) * b.amp[j];
    return grid.dr * s;
}

TwoAtomState make_register_state(const SpatialGrid& grid, const SystemParameters& params,
                                 Level a, Level b) {
    TwoAtomState psi(grid.n_r);
    const Wavefunction1D phi0 =
        harmonic_ground_state(grid, params.trap_omega, params.mass, params.r0);
    std::copy(phi0.amp.begin(), phi0.amp.end(), psi.channel(channel_index(a, b)));
    return psi;
}

Hamiltonian::Hamiltonian(const SystemParameters& params, const SpatialGrid& grid)
    : params_(params), grid_(grid), plan_(grid.n_r, n_channels) {
    if (!(params.mass > 0.0)) throw std::invalid_argument("Hamiltonian: mass must be positive");

    kinetic_.resize(grid_.n_r);
    for (int j = 0; j < grid_.n_r; ++j)
        kinetic_[j] = grid_.k[j] * grid_.k[j] / (2.0 * params_.mass);
    kinetic_max_ = *std::max_element(kinetic_.begin(), kinetic_.end());

    rr_potential_.resize(grid_.n_r);
    for (int j = 0; j < grid_.n_r; ++j)
        rr_potential_[j] = interaction_potential(grid_.r[j], params_.c3);

    if (params_.trap_on_during_gate) {
        trap_.resize(grid_.n_r);
        for (int j = 0; j < grid_.n_r; ++j) {
            const double x = grid_.r[j] - params_.r0;
            trap_[j] = 0.5 * params_.mass * params_.trap_omega * params_.trap_omega * x * x;
        }
    }

    const double scale = params_.convention == DetuningConvention::half ? 0.5 : 1.0;
    for (int c = 0; c < n_channels; ++c) {
        double offset = 0.0;
        double decay = 0.0;
        for (int atom = 0; atom < 2; ++atom) {
            const int lv = level_of(c, atom);
            if (lv == static_cast<int>(Level::i)) {
                offset += scale * params_.detuning_1;
                decay += params_.gamma_i;
            } else if (lv == static_cast<int>(Level::r)) {
                offset += scale * params_.detuning_2;
                decay += params_.gamma_r;
            }
        }
        offset_[c] = offset;
        decay_rate_[c] = decay;
    }

    // Diagonal extremes over channels and grid points for spectral bounds.
    const double rr_max = *std::max_element(rr_potential_.begin(), rr_potential_.end());
    const double rr_min = *std::min_element(rr_potential_.begin(), rr_potential_.end());
    const double trap_max = trap_.empty() ? 0.0 : *std::max_element(trap_.begin(), trap_.end());
    diag_max_ = offset_[0];
    diag_min_ = offset_[0];
    constexpr int rr_channel = channel_index(Level::r, Level::r);
    for (int c = 0; c < n_channels; ++c) {
        double hi = offset_[c] + trap_max;
        double lo = offset_[c];
        if (c == rr_channel) {
            hi += std::max(rr_max, 0.0);
            lo += std::min(rr_min, 0.0);
        }
        diag_max_ = std::max(diag_max_, hi);
        diag_min_ = std::min(diag_min_, lo);
    }
}

void Hamiltonian::apply(const TwoAtomState& psi, double omega_r, double omega_b, ApplyMode mode,
                        Workspace& ws, TwoAtomState& out) const {
    const int n = grid_.n_r;
    if (psi.n_r != n || static_cast<int>(ws.buf.size()) != n_channels * n)
        throw std::invalid_argument("Hamiltonian::apply: size mismatch");
    if (out.n_r != n) out = TwoAtomState(n);

    // Kinetic part, all channels in one batched transform.
    std::copy(psi.amp.begin(), psi.amp.end(), ws.buf.begin());
    plan_.forward(ws.buf.data());
    for (int c = 0; c < n_channels; ++c) {
        std::complex<double>* line = ws.buf.data() + static_cast<size_t>(c) * n;
        for (int j = 0; j < n; ++j) line[j] *= kinetic_[j];
    }
    plan_.backward(ws.buf.data());
    const double inv_n = 1.0 / n;
    for (size_t j = 0; j < out.amp.size(); ++j) out.amp[j] = ws.buf[j] * inv_n;

    // Diagonal: detunings, |rr> interaction, optional trap, optional decay.
    constexpr int rr_channel = channel_index(Level::r, Level::r);
    for (int c = 0; c < n_channels; ++c) {
        const std::complex<double>* in = psi.channel(c);
        std::complex<double>* res = out.channel(c);
        std::complex<double> d{offset_[c], 0.0};
        if (mode == ApplyMode::with_decay) d -= 0.5 * imag_unit * decay_rate_[c];
        for (int j = 0; j < n; ++j) {
            double dj = 0.0;
            if (c == rr_channel) dj += rr_potential_[j];
            if (!trap_.empty()) dj += trap_[j];
            res[j] += (d + dj) * in[j];
        }
    }

    // Laser couplings: (Omega_R/2)(|0><i| + h.c.) and (Omega_B/2)(|i><r| + h.c.)
    // on each atom, diagonal in the motional coordinate.
    const double hr = 0.5 * omega_r;
    const double hb = 0.5 * omega_b;
    for (int other = 0; other < n_levels; ++other) {
        const auto lv = [&](int l) { return static_cast<Level>(l); };
        // Atom 1 transitions, atom 2 fixed in `other`.
        const int c0 = channel_index(Level::q0, lv(other));
        const int ci = channel_index(Level::i, lv(other));
        const int cr = channel_index(Level::r, lv(other));
        // Atom 2 transitions, atom 1 fixed in `other`.
        const int d0 = channel_index(lv(other), Level::q0);
        const int di = channel_index(lv(other), Level::i);
        const int dr = channel_index(lv(other), Level::r);
        for (int j = 0; j < n; ++j) {
            out.channel(c0)[j] += hr * psi.channel(ci)[j];
            out.channel(ci)[j] += hr * psi.channel(c0)[j] + hb * psi.channel(cr)[j];
            out.channel(cr)[j] += hb * psi.channel(ci)[j];
            out.channel(d0)[j] += hr * psi.channel(di)[j];
            out.channel(di)[j] += hr * psi.channel(d0)[j] + hb * psi.channel(dr)[j];
            out.channel(dr)[j] += hb * psi.channel(di)[j];
        }
    }
}

TwoAtomState apply_hamiltonian(const Hamiltonian& h, const TwoAtomState& psi, double omega_r,
                               double omega_b, ApplyMode mode) {
    Workspace ws(h.grid().n_r);
    TwoAtomState out(h.grid().n_r);
    h.apply(psi, omega_r, omega_b, mode, ws, out);
    return out;
}

}  // namespace rygate
