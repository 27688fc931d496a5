#pragma once

#include "rygate/units.hpp"

namespace rygate {

/// Inputs for the atom-chip noise estimates. Everything here lives in
/// laboratory units (V/m, K, s-based rates); nothing couples back into the
/// internal gate units.
struct NoiseParameters {
    double z = 10.0;              ///< atom-surface distance (um)
    double temperature = 300.0;   ///< chip temperature (K)
    double n_star = 56.66;        ///< effective principal quantum number
    int n_principal = 58;         ///< principal quantum number
    double alpha_r = 2.5;         ///< quasi-static polarizability (MHz/(V/m)^2)
    double d_r = 200.0;           ///< induced dipole used for dephasing (e a_B)
    double s_e_ref = 1e-11;       ///< field-noise density at the reference point ((V/m)^2/Hz)
    double z_ref = 75.0;          ///< reference distance (um)
    double omega_ref = 2.0 * units::pi * 1e6;  ///< reference angular frequency (rad/s)
    double beta = 0.7;            ///< spectral exponent of the 1/f^beta noise
    double tau = 20.0;            ///< effective Rydberg interaction time (ns)
    double enhancement = 5.0;     ///< near-field decay enhancement factor
    double adsorbate_density = 100.0;  ///< surface coverage (1/um^2)
    double patch_extent = 10.0;        ///< adsorbate patch side length (um)
};

/// Vertical electric field of one adsorbate dipole (p = e a_B, upright)
/// directly below the atom: E = 2 e a_B / (4 pi eps0 z^3), in V/m.
/// Throws std::invalid_argument for z <= 0.
double impurity_field(double z_um);

/// Coherent sum of the vertical field components of upright e a_B dipoles
/// on a square lattice of the given density and side length, evaluated at
/// height z above the patch center (V/m). The lattice contains a site at
/// the center, so a patch holding a single adsorbate reduces to
/// impurity_field.
double adsorbate_field_sum(double density_per_um2, double extent_um, double z_um);

/// Stark coupling scale e a_B n^2 E / h between adjacent Rydberg levels,
/// in MHz.
double stark_matrix_element(int n, double e_v_m);

/// Quadratic Stark shift alpha_R E^2 in MHz, with alpha_R in MHz/(V/m)^2.
double quadratic_stark_shift(double alpha_r_mhz, double e_v_m);

/// Power-law surface noise density S_E(z, omega) = S_ref (z_ref/z)^4
/// (omega_ref/omega)^beta in (V/m)^2/Hz. Throws std::invalid_argument for
/// omega <= 0 or z <= 0 (any low-frequency cutoff is the caller's concern).
double noise_spectrum(double s_e_ref, double z_ref_um, double omega_ref, double beta,
                      double z_um, double omega);

struct DephasingResult {
    double variance = 0.0;  ///< accumulated phase variance (rad^2)
    double rate = 0.0;      ///< D_phi = variance / tau (1/s)
    double error = 0.0;     ///< decoherence error estimate, variance / 2
};

/// Phase diffusion of a dipole d_R (e a_B) exposed to the power-law field
/// noise over the interaction time params.tau:
/// variance = tau d^2 S_E(z, 1/tau) / (2 hbar^2 cos(pi beta/2) Gamma(2+beta)).
/// Throws std::invalid_argument for beta outside (0,2) or beta == 1, where
/// the prefactor diverges and a spectral cutoff would be needed.
DephasingResult dephasing_variance(double d_r_eab, const NoiseParameters& params);

/// Static dipole induced by a field E: d = h alpha_R E, returned in units
/// of e a_B.
double induced_dipole(double alpha_r_mhz, double e_v_m);

/// Thermally occupied decay rate for a transition of angular frequency
/// omega_rs (rad/s) and dipole moment mu (e a_B). Positive omega_rs is
/// emission, rate (1 + nbar) gamma_fs; negative is absorption, rate
/// nbar gamma_fs; gamma_fs = omega^3 mu^2 / (3 pi eps0 hbar c^3). The
/// enhancement factor stands in for the near-field Green tensor relative
/// to free space. Throws std::invalid_argument for omega_rs == 0.
double thermal_decay_rate(double omega_rs, double mu_eab, double temperature_k,
                          double enhancement);

/// Sum of emission and absorption into the adjacent Rydberg level
/// (|omega| from rydberg_spacing(n), mu = e a_B n_star^2), in 1/s.
double rydberg_decay_total(int n, double n_star, double temperature_k, double enhancement);

struct RydbergSpacing {
    double ghz = 0.0;
    double inv_cm = 0.0;
    double omega = 0.0;  ///< rad/s
};

/// Adjacent-level spacing 1/n^3 atomic units of energy.
RydbergSpacing rydberg_spacing(int n);

struct VdwShift {
    double magnitude_mhz = 0.0;
    int sign = -1;  ///< attractive
};

/// Near-field atom-surface shift V = -(5/2)(e a_B n_star^2)^2 /
/// (8 pi eps0 (2z)^3), reported as magnitude in MHz with the sign kept
/// separate. Throws std::invalid_argument for z <= 0.
VdwShift vdw_shift(double n_star, double z_um);

struct BlackbodyShift {
    double free_khz = 0.0;    ///< alpha_fs (k_B T)^2 / (m_e c^2) / h
    double lambda_t_um = 0.0; ///< hbar c / k_B T
    double factor = 1.0;      ///< lambda_T / z when a distance is given
    double total_khz = 0.0;
};

/// Free-space thermal shift; the overload with z applies the near-field
/// factor lambda_T / z. T = 0 returns all zeros.
BlackbodyShift blackbody_shift(double temperature_k);
BlackbodyShift blackbody_shift(double temperature_k, double z_um);

/// Aggregate of all estimators at one parameter set, with the gate-error
/// mappings the estimates feed into (dephasing error = variance/2, decay
/// error = tau * decay rate) and the Stark shift flagged against the 7 MHz
/// Foerster mismatch and the 50 MHz interaction scale.
struct NoiseBudget {
    double impurity_field_v_m = 0.0;
    double adsorbate_field_v_m = 0.0;
    double stark_element_mhz = 0.0;   ///< at the summed adsorbate field
    double stark_shift_mhz = 0.0;     ///< alpha_r at the summed adsorbate field
    double induced_dipole_eab = 0.0;  ///< alpha_r at the summed adsorbate field
    bool stark_exceeds_forster = false;      ///< stark_shift > 7 MHz
    bool stark_exceeds_interaction = false;  ///< stark_shift > 50 MHz
    double dephasing_variance_rad2 = 0.0;
    double dephasing_rate_s = 0.0;
    double dephasing_error = 0.0;
    double free_decay_rate_s = 0.0;  ///< enhancement 1
    double chip_decay_rate_s = 0.0;
    double lifetime_free_us = 0.0;  ///< 0 when there is no decay channel
    double lifetime_chip_us = 0.0;
    double decay_error = 0.0;  ///< tau * chip decay rate
    double vdw_shift_mhz = 0.0;
    int vdw_sign = -1;
    double blackbody_free_khz = 0.0;
    double blackbody_total_khz = 0.0;
    double spacing_ghz = 0.0;
};

NoiseBudget noise_budget_report(const NoiseParameters& params);

}  // namespace rygate
