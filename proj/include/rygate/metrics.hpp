#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "rygate/krotov.hpp"
#include "rygate/propagator.hpp"

namespace rygate {

/// Two-character channel label, e.g. "00", "0i", "r1"; ordering follows
/// channel_index.
std::string channel_label(int c);

using RegisterMatrix = std::array<std::array<std::complex<double>, 4>, 4>;

/// m[row][col] = <phi0_row | psi_col>: overlaps of the propagated register
/// states with the register basis (qubit levels times motional ground
/// state).
RegisterMatrix project_to_register(const std::array<TwoAtomState, 4>& finals,
                                   const std::array<TwoAtomState, 4>& basis,
                                   const SpatialGrid& grid);

/// 1 - |sum_b e^{-i phase_b} m[b][b]| / 4 from a precomputed overlap matrix.
double gate_error(const RegisterMatrix& m, const GateTarget& target);

/// Convenience overload projecting first.
double gate_error(const std::array<TwoAtomState, 4>& finals, const GateTarget& target,
                  const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid);

/// Population that did not return to the register wavepackets:
/// 1 - (1/4) sum_b |<phi0_b|psi_b>|^2. Includes norm lost to decay.
double motional_leakage(const std::array<TwoAtomState, 4>& finals,
                        const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid);

/// Channel populations over time, one row per stored trajectory sample.
struct PopulationTable {
    std::vector<double> times;                          ///< ns
    std::vector<std::array<double, n_channels>> rows;   ///< p_c = dr sum_j |psi_cj|^2
};

PopulationTable population_dynamics(const Trajectory& traj, const SpatialGrid& grid);

/// One-sided amplitude spectrum of both Rabi envelopes. By default the mean
/// is removed and a Hann window applied before a 4x zero-padded transform;
/// `raw` skips the demeaning and windowing. Amplitudes are normalized so a
/// pure tone of amplitude A (in MHz) peaks near A.
struct PulseSpectrum {
    std::vector<double> freq_mhz;
    std::vector<double> amp_r;
    std::vector<double> amp_b;
};

PulseSpectrum pulse_spectrum(const ControlField& fields, const SystemParameters& params,
                             bool raw = false);

/// Photon-recoil estimate for the interaction-induced force on the relative
/// coordinate: momentum kick delta_p = 3 pi / r0, the resulting motional
/// error delta_p^2 / (2 m omega), and the wavepacket-size condition
/// sqrt(1/(m omega)) < (sqrt(2)/(3 pi)) r0 under which that error stays
/// below one.
struct ForceKickReport {
    double delta_p = 0.0;        ///< 1/um
    double ground_size = 0.0;    ///< sqrt(1/(m omega)), um
    double size_limit = 0.0;     ///< (sqrt(2)/(3 pi)) r0, um
    double ratio = 0.0;          ///< ground_size / size_limit
    double motional_error = 0.0; ///< delta_p^2 / (2 m omega)
    bool condition_met = false;
};

ForceKickReport force_kick_check(const SystemParameters& params);

}  // namespace rygate
