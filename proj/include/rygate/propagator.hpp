#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "rygate/system.hpp"

namespace rygate {

/// Real interval certified to contain the spectrum of the (Hermitian part
/// of the) Hamiltonian for all admissible Rabi values.
struct SpectralBounds {
    double e_min = 0.0;
    double e_max = 0.0;
    double center() const { return 0.5 * (e_max + e_min); }
    double radius() const { return 0.5 * (e_max - e_min); }
};

/// Gershgorin-style enclosure: [diag_min - margin, kinetic_max + diag_max +
/// margin] with margin = omega_r_cap + omega_b_cap, then widened by 5% of
/// the interval on each side. Valid for every control value because the
/// pulse parametrization keeps Omega within [0, cap].
SpectralBounds estimate_spectral_bounds(const Hamiltonian& h, double omega_r_cap,
                                        double omega_b_cap);

/// Coefficients of a polynomial sum_n c_n T_n(H_s) with the rescaled
/// operator H_s = (H - center)/radius; any scalar prefactors of the target
/// function are folded into c.
struct ChebyshevCoeffs {
    std::vector<std::complex<double>> c;
    double center = 0.0;
    double radius = 1.0;
};

/// Expansion of exp(-i H dt) with Bessel-function coefficients
/// (2 - delta_n0) e^{-i center dt} (-i)^n J_n(radius dt); truncated where
/// the first neglected coefficient drops below 1e-14. dt may be negative
/// (backward step). Throws numeric_error if the order would exceed 10^4
/// (advising a smaller dt).
ChebyshevCoeffs exp_coeffs(const SpectralBounds& bounds, double dt);

/// Numerically fitted expansion of an arbitrary entire function f(E) over
/// the bounds interval (Chebyshev-Gauss sampling, tail below tail_tol).
ChebyshevCoeffs fit_coeffs(const SpectralBounds& bounds,
                           const std::function<std::complex<double>(double)>& f,
                           double tail_tol = 1e-13);

/// phi-function sets for the inhomogeneous step, with the step factors
/// folded in: phi1 set applies h*phi1(-iH h), phi2 set applies
/// h^2*phi2(-iH h), where phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2.
ChebyshevCoeffs phi1_coeffs(const SpectralBounds& bounds, double h);
ChebyshevCoeffs phi2_coeffs(const SpectralBounds& bounds, double h);

/// Scratch buffers for the polynomial recursion; one per thread.
struct PropWorkspace {
    explicit PropWorkspace(int n_r) : fft(n_r), t_prev(n_r), t_cur(n_r), t_next(n_r), acc(n_r) {}
    Workspace fft;
    TwoAtomState t_prev, t_cur, t_next, acc;
};

/// result = sum_n c_n T_n(H_s) x via the three-term recursion
/// T_{n+1} = 2 H_s T_n - T_{n-1}. x and result must be distinct.
void apply_poly(const ChebyshevCoeffs& coeffs, const Hamiltonian& h, double omega_r,
                double omega_b, ApplyMode mode, const TwoAtomState& x, TwoAtomState& result,
                PropWorkspace& ws);

/// psi <- exp(-i H(omega_r, omega_b) dt) psi using a prebuilt coefficient
/// set (exp_coeffs of the same dt).
void chebyshev_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                    const ChebyshevCoeffs& exp_set, ApplyMode mode, PropWorkspace& ws);

/// Convenience overload building the coefficient set on the fly.
void chebyshev_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                    const SpectralBounds& bounds, double dt, ApplyMode mode, PropWorkspace& ws);

/// One step of i dpsi/dt = H psi + phi(t) over signed step_h, with phi
/// linearly interpolated between its values at the step start and end:
/// psi <- E psi + [h phi1](-iH h) g0 + [h^2 phi2](-iH h) gdot, where
/// g = -i phi (variation of constants for a piecewise-linear source).
void inhomogeneous_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                        const SpectralBounds& bounds, double step_h, const TwoAtomState& phi_start,
                        const TwoAtomState& phi_end, ApplyMode mode, PropWorkspace& ws);

/// Prebuilt-coefficient core of inhomogeneous_step: psi <- exp_set psi +
/// phi1_set g0 + phi2_set gdot. The caller supplies g0 = -i phi(start) and
/// gdot = -i (phi(end) - phi(start))/h.
void inhomogeneous_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                        const ChebyshevCoeffs& exp_set, const ChebyshevCoeffs& phi1_set,
                        const ChebyshevCoeffs& phi2_set, const TwoAtomState& g0,
                        const TwoAtomState& gdot, ApplyMode mode, PropWorkspace& ws);

/// Stored propagation samples. stride s > 0 keeps every s-th step plus the
/// final state; stride 0 keeps only the initial and final states.
struct Trajectory {
    int stride = 0;
    std::vector<double> times;
    std::vector<TwoAtomState> states;
};

/// Propagate psi0 over the full control window. Rabi values are the
/// controls sampled at each step midpoint (mean of the two adjacent
/// samples) mapped through the pulse parametrization. Throws numeric_error
/// with the step index if amplitudes become non-finite.
Trajectory propagate(const TwoAtomState& psi0, const ControlField& fields, const Hamiltonian& h,
                     ApplyMode mode, int store_stride = 0);

}  // namespace rygate
