#pragma once

#include <array>
#include <complex>
#include <vector>

#include "rygate/fft.hpp"
#include "rygate/grid.hpp"

namespace rygate {

/// Electronic levels of one atom: the two qubit states, the intermediate
/// state reached by the red laser, and the Rydberg state reached from the
/// intermediate state by the blue laser.
enum class Level : int { q0 = 0, q1 = 1, i = 2, r = 3 };

inline constexpr int n_levels = 4;
inline constexpr int n_channels = n_levels * n_levels;

/// Two-atom electronic channel index, atom-1 major: c = 4*a + b.
inline constexpr int channel_index(Level a, Level b) {
    return n_levels * static_cast<int>(a) + static_cast<int>(b);
}

/// Placement of the laser detunings on the diagonal: `half` puts Delta/2 on
/// |i> and delta/2 on |r> per atom, `full` puts Delta and delta. The two
/// conventions differ physically; `half` is the reference choice and `full`
/// is kept switchable for comparison runs.
enum class DetuningConvention { half, full };

/// hermitian: closed-system Hamiltonian. with_decay: adds -i/2 * gamma per
/// atom in |i> (gamma_i) and |r> (gamma_r) for lossy evaluation.
enum class ApplyMode { hermitian, with_decay };

/// Physical parameters in internal units (rad/ns, ns, um; hbar = 1).
struct SystemParameters {
    double omega_r0 = 0.0;  ///< red Rabi cap (rad/ns)
    double omega_b0 = 0.0;  ///< blue Rabi cap (rad/ns)
    double detuning_1 = 0.0;  ///< one-photon detuning Delta (rad/ns)
    double detuning_2 = 0.0;  ///< two-photon detuning delta (rad/ns)
    double c3 = 0.0;          ///< |rr> interaction coefficient (rad/ns um^3)
    double gamma_i = 0.0;     ///< intermediate-state decay rate (1/ns)
    double gamma_r = 0.0;     ///< Rydberg-state decay rate (1/ns)
    double mass = 0.0;        ///< relative-motion mass (ns/um^2)
    double trap_omega = 0.0;  ///< trap angular frequency (rad/ns)
    double r0 = 0.0;          ///< trap separation (um)
    bool trap_on_during_gate = false;
    DetuningConvention convention = DetuningConvention::half;
};

/// Two-photon resonance condition: the differential Stark shift of the
/// 0 -> r transition at full driving, delta = (omega_b0^2 - omega_r0^2) /
/// (4 * detuning_1). Throws std::invalid_argument when detuning_1 == 0.
double stark_detuning(double omega_r0, double omega_b0, double detuning_1);

/// Bounded pulse parametrization Omega(eps) = omega0 * (tanh(eps) + 1) / 2,
/// mapping the unconstrained control eps to [0, omega0].
double rabi_from_control(double eps, double omega0);

/// Inverse of rabi_from_control with the argument clamped away from the
/// saturation points, so eps stays within roughly +-10.
double control_from_rabi(double omega, double omega0);

/// |rr> interaction c3/r^3. Throws std::invalid_argument for r <= 0.
double interaction_potential(double r, double c3);

/// Piecewise-linear control samples on the time grid t_j = j*dt,
/// j = 0..n_t; propagation over step j uses the midpoint value
/// (eps_j + eps_{j+1}) / 2.
struct ControlField {
    double duration = 0.0;  ///< ns
    int n_t = 0;
    double dt = 0.0;  ///< = duration / n_t
    std::vector<double> eps_r;  ///< n_t + 1 samples
    std::vector<double> eps_b;  ///< n_t + 1 samples
};

ControlField make_zero_field(double duration, int n_t);

/// Initial guess for the optimizer: physical envelopes follow the update
/// shape, Omega_lambda(t) = scale * (omega0/2) * sin^2(pi t / T), mapped
/// back through the control parametrization.
ControlField make_guess_field(double duration, int n_t, const SystemParameters& params,
                              double scale = 1.0);

inline double control_midpoint(const std::vector<double>& eps, int step) {
    return 0.5 * (eps[step] + eps[step + 1]);
}

/// Two-atom wavefunction: 16 electronic channels times n_r grid points,
/// channel-major storage amp[c * n_r + j].
struct TwoAtomState {
    int n_r = 0;
    std::vector<std::complex<double>> amp;

    TwoAtomState() = default;
    explicit TwoAtomState(int n_r_) : n_r(n_r_), amp(static_cast<size_t>(n_channels) * n_r_) {}

    std::complex<double>* channel(int c) { return amp.data() + static_cast<size_t>(c) * n_r; }
    const std::complex<double>* channel(int c) const {
        return amp.data() + static_cast<size_t>(c) * n_r;
    }
};

double norm(const TwoAtomState& psi, const SpatialGrid& grid);
std::complex<double> inner(const TwoAtomState& a, const TwoAtomState& b, const SpatialGrid& grid);

/// Register basis state |ab> x motional ground state (a, b qubit levels).
TwoAtomState make_register_state(const SpatialGrid& grid, const SystemParameters& params,
                                 Level a, Level b);

/// FFT scratch for one concurrent Hamiltonian application; one instance per
/// thread / in-flight trajectory.
struct Workspace {
    explicit Workspace(int n_r) : buf(static_cast<size_t>(n_channels) * n_r) {}
    std::vector<std::complex<double>> buf;
};

/// Matrix-free two-atom Hamiltonian on the Fourier grid:
///   - kinetic term on every channel (FFT, k^2/2m),
///   - detuning diagonal per atom in |i> / |r>,
///   - c3/r^3 on the |rr> channel,
///   - red (q0<->i) and blue (i<->r) couplings per atom with the current
///     Rabi values Omega/2,
///   - optional harmonic trap on every channel,
///   - optional non-Hermitian decay -i/2 * gamma per excited atom.
class Hamiltonian {
 public:
    Hamiltonian(const SystemParameters& params, const SpatialGrid& grid);

    /// out = H(omega_r, omega_b) psi. Aliasing psi and out is not allowed.
    void apply(const TwoAtomState& psi, double omega_r, double omega_b, ApplyMode mode,
               Workspace& ws, TwoAtomState& out) const;

    const SystemParameters& params() const { return params_; }
    const SpatialGrid& grid() const { return grid_; }

    /// Extremes of the diagonal part (detunings + interaction + trap) over
    /// all channels and grid points; used for spectral bounds.
    double diagonal_max() const { return diag_max_; }
    double diagonal_min() const { return diag_min_; }
    /// Largest kinetic eigenvalue (pi/dr)^2 / 2m.
    double kinetic_max() const { return kinetic_max_; }

 private:
    SystemParameters params_;
    SpatialGrid grid_;
    fft::Plan plan_;                       // batched 16-channel transform
    std::vector<double> kinetic_;          // k^2/2m per momentum point
    std::vector<double> rr_potential_;     // c3/r^3 per grid point
    std::vector<double> trap_;             // harmonic trap, empty when off
    std::array<double, n_channels> offset_{};      // detuning diagonal per channel
    std::array<double, n_channels> decay_rate_{};  // gamma_i*n_i + gamma_r*n_r
    double diag_max_ = 0.0, diag_min_ = 0.0, kinetic_max_ = 0.0;
};

/// Convenience allocating wrapper around Hamiltonian::apply.
TwoAtomState apply_hamiltonian(const Hamiltonian& h, const TwoAtomState& psi, double omega_r,
                               double omega_b, ApplyMode mode = ApplyMode::hermitian);

}  // namespace rygate
