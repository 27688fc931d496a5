#pragma once

#include <complex>
#include <vector>

namespace rygate {

/// Equidistant 1D coordinate grid with the matching momentum grid in
/// standard DFT ordering. Points are r_j = r_min + j*dr, j = 0..n_r-1,
/// i.e. the half-open interval [r_min, r_max); lengths in um.
struct SpatialGrid {
    double r_min = 0.0;
    double r_max = 0.0;
    double dr = 0.0;
    int n_r = 0;
    std::vector<double> r;  ///< coordinates, size n_r
    std::vector<double> k;  ///< momenta (rad/um), DFT order, Nyquist positive
};

/// Single-channel wavefunction on a SpatialGrid; norm convention
/// |psi|^2 = dr * sum_j |amp_j|^2.
struct Wavefunction1D {
    std::vector<std::complex<double>> amp;
};

/// Build a grid with n_r points on [r_min, r_max). n_r must be even so that
/// the momentum grid contains the Nyquist point and max|k| = pi/dr exactly.
/// Throws std::invalid_argument on r_min >= r_max, n_r < 2, or odd n_r.
SpatialGrid build_grid(double r_min, double r_max, int n_r);

/// Kinetic energy application via Fourier transform:
/// psi -> IFFT( hbar k^2/(2m) * FFT(psi) ). Mass in internal units
/// (ns/um^2, hbar = 1); result in rad/ns. Throws std::invalid_argument
/// if psi length differs from the grid or mass <= 0.
Wavefunction1D apply_kinetic(const Wavefunction1D& psi, const SpatialGrid& grid, double mass);

/// Normalized harmonic-oscillator ground state centered at r0:
/// psi ~ exp(-m*omega*(r-r0)^2 / 2). Throws std::invalid_argument if r0
/// lies outside the grid; warns on stderr when the position spread
/// sqrt(1/(2 m omega)) exceeds 10% of the grid extent (truncation risk).
Wavefunction1D harmonic_ground_state(const SpatialGrid& grid, double omega, double mass,
                                     double r0);

/// dr-weighted L2 norm of psi.
double norm(const Wavefunction1D& psi, const SpatialGrid& grid);

/// dr-weighted inner product <a|b>.
std::complex<double> inner(const Wavefunction1D& a, const Wavefunction1D& b,
                           const SpatialGrid& grid);

}  // namespace rygate
