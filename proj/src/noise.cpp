#include "rygate/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace rygate {

namespace {

namespace k = constants;

constexpr double dipole_si = k::elementary_charge * k::bohr_radius;  // e a_B in C m

/// Vertical component of an upright dipole p = e a_B at lateral offset rho
/// and height z (meters in, V/m out).
double dipole_field_vertical(double rho_m, double z_m) {
    const double r2 = z_m * z_m + rho_m * rho_m;
    return dipole_si * (2.0 * z_m * z_m - rho_m * rho_m) /
           (4.0 * units::pi * k::vacuum_permittivity * std::pow(r2, 2.5));
}

}  // namespace

double impurity_field(double z_um) {
    if (z_um <= 0.0) throw std::invalid_argument("impurity_field: z must be positive");
    return dipole_field_vertical(0.0, z_um * 1e-6);
}

double adsorbate_field_sum(double density_per_um2, double extent_um, double z_um) {
    if (z_um <= 0.0) throw std::invalid_argument("adsorbate_field_sum: z must be positive");
    if (density_per_um2 <= 0.0) return 0.0;
    const double spacing = 1.0 / std::sqrt(density_per_um2);  // um
    const int half = static_cast<int>(std::floor(0.5 * extent_um / spacing));
    const double z_m = z_um * 1e-6;
    double sum = 0.0;
    for (int ix = -half; ix <= half; ++ix)
        for (int iy = -half; iy <= half; ++iy) {
            const double rho_um = spacing * std::hypot(ix, iy);
            sum += dipole_field_vertical(rho_um * 1e-6, z_m);
        }
    return sum;
}

double stark_matrix_element(int n, double e_v_m) {
    return 1e-6 * dipole_si * n * n * e_v_m / k::planck_h;
}

double quadratic_stark_shift(double alpha_r_mhz, double e_v_m) {
    return alpha_r_mhz * e_v_m * e_v_m;
}

double noise_spectrum(double s_e_ref, double z_ref_um, double omega_ref, double beta,
                      double z_um, double omega) {
    if (omega <= 0.0) throw std::invalid_argument("noise_spectrum: omega must be positive");
    if (z_um <= 0.0) throw std::invalid_argument("noise_spectrum: z must be positive");
    return s_e_ref * std::pow(z_ref_um / z_um, 4.0) * std::pow(omega_ref / omega, beta);
}

DephasingResult dephasing_variance(double d_r_eab, const NoiseParameters& params) {
    const double beta = params.beta;
    if (beta <= 0.0 || beta >= 2.0 || beta == 1.0)
        throw std::invalid_argument(
            "dephasing_variance: beta must lie in (0,2) and differ from 1 "
            "(use 1 +- delta; the exact value needs a spectral cutoff)");
    const double tau_s = params.tau * 1e-9;
    const double d_si = d_r_eab * dipole_si;
    const double spectrum = noise_spectrum(params.s_e_ref, params.z_ref, params.omega_ref, beta,
                                           params.z, 1.0 / tau_s);
    DephasingResult res;
    res.variance = tau_s * d_si * d_si * spectrum /
                   (2.0 * k::hbar * k::hbar * std::cos(0.5 * units::pi * beta) *
                    std::tgamma(2.0 + beta));
    res.rate = res.variance / tau_s;
    res.error = 0.5 * res.variance;
    return res;
}

double induced_dipole(double alpha_r_mhz, double e_v_m) {
    return k::planck_h * alpha_r_mhz * 1e6 * e_v_m / dipole_si;
}

double thermal_decay_rate(double omega_rs, double mu_eab, double temperature_k,
                          double enhancement) {
    if (omega_rs == 0.0)
        throw std::invalid_argument("thermal_decay_rate: omega must be nonzero");
    const double omega = std::abs(omega_rs);
    const double mu = mu_eab * dipole_si;
    const double gamma_fs =
        omega * omega * omega * mu * mu /
        (3.0 * units::pi * k::vacuum_permittivity * k::hbar * std::pow(k::speed_of_light, 3.0));
    double nbar = 0.0;
    if (temperature_k > 0.0)
        nbar = 1.0 / std::expm1(k::hbar * omega / (k::boltzmann_kb * temperature_k));
    const double occupation = omega_rs > 0.0 ? 1.0 + nbar : nbar;
    return occupation * gamma_fs * enhancement;
}

double rydberg_decay_total(int n, double n_star, double temperature_k, double enhancement) {
    const double omega = rydberg_spacing(n).omega;
    const double mu = n_star * n_star;
    return thermal_decay_rate(omega, mu, temperature_k, enhancement) +
           thermal_decay_rate(-omega, mu, temperature_k, enhancement);
}

RydbergSpacing rydberg_spacing(int n) {
    if (n < 1) throw std::invalid_argument("rydberg_spacing: n must be at least 1");
    const double freq_hz = k::hartree_energy / (k::planck_h * std::pow(n, 3.0));
    RydbergSpacing s;
    s.ghz = freq_hz * 1e-9;
    s.inv_cm = freq_hz / (100.0 * k::speed_of_light);
    s.omega = 2.0 * units::pi * freq_hz;
    return s;
}

VdwShift vdw_shift(double n_star, double z_um) {
    if (z_um <= 0.0) throw std::invalid_argument("vdw_shift: z must be positive");
    const double d2 = std::pow(dipole_si * n_star * n_star, 2.0);
    const double z2 = 2.0 * z_um * 1e-6;
    const double v_joule =
        2.5 * d2 / (8.0 * units::pi * k::vacuum_permittivity * z2 * z2 * z2);
    VdwShift s;
    s.magnitude_mhz = 1e-6 * v_joule / k::planck_h;
    s.sign = -1;
    return s;
}

BlackbodyShift blackbody_shift(double temperature_k) {
    BlackbodyShift s;
    if (temperature_k <= 0.0) return s;
    const double kt = k::boltzmann_kb * temperature_k;
    const double rest_energy = k::electron_mass * k::speed_of_light * k::speed_of_light;
    s.free_khz = 1e-3 * k::fine_structure * kt * kt / rest_energy / k::planck_h;
    s.lambda_t_um = 1e6 * k::hbar * k::speed_of_light / kt;
    s.total_khz = s.free_khz;
    return s;
}

BlackbodyShift blackbody_shift(double temperature_k, double z_um) {
    if (z_um <= 0.0) throw std::invalid_argument("blackbody_shift: z must be positive");
    BlackbodyShift s = blackbody_shift(temperature_k);
    if (s.free_khz == 0.0) return s;
    s.factor = s.lambda_t_um / z_um;
    s.total_khz = s.free_khz * s.factor;
    return s;
}

NoiseBudget noise_budget_report(const NoiseParameters& p) {
    NoiseBudget b;
    b.impurity_field_v_m = impurity_field(p.z);
    b.adsorbate_field_v_m = adsorbate_field_sum(p.adsorbate_density, p.patch_extent, p.z);
    b.stark_element_mhz = stark_matrix_element(p.n_principal, b.adsorbate_field_v_m);
    b.stark_shift_mhz = quadratic_stark_shift(p.alpha_r, b.adsorbate_field_v_m);
    b.induced_dipole_eab = induced_dipole(p.alpha_r, b.adsorbate_field_v_m);
    b.stark_exceeds_forster = b.stark_shift_mhz > 7.0;
    b.stark_exceeds_interaction = b.stark_shift_mhz > 50.0;

    if (p.d_r != 0.0 && p.s_e_ref != 0.0) {
        const DephasingResult deph = dephasing_variance(p.d_r, p);
        b.dephasing_variance_rad2 = deph.variance;
        b.dephasing_rate_s = deph.rate;
        b.dephasing_error = deph.error;
    }

    if (p.n_star != 0.0) {
        b.free_decay_rate_s = rydberg_decay_total(p.n_principal, p.n_star, p.temperature, 1.0);
        b.chip_decay_rate_s =
            rydberg_decay_total(p.n_principal, p.n_star, p.temperature, p.enhancement);
    }
    if (b.free_decay_rate_s > 0.0) b.lifetime_free_us = 1e6 / b.free_decay_rate_s;
    if (b.chip_decay_rate_s > 0.0) b.lifetime_chip_us = 1e6 / b.chip_decay_rate_s;
    b.decay_error = p.tau * 1e-9 * b.chip_decay_rate_s;

    const VdwShift vdw = vdw_shift(p.n_star, p.z);
    b.vdw_shift_mhz = vdw.magnitude_mhz;
    b.vdw_sign = vdw.sign;

    const BlackbodyShift bb = blackbody_shift(p.temperature, p.z);
    b.blackbody_free_khz = bb.free_khz;
    b.blackbody_total_khz = bb.total_khz;

    b.spacing_ghz = rydberg_spacing(p.n_principal).ghz;
    return b;
}

}  // namespace rygate
