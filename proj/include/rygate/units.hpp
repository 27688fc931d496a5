#pragma once

#include <cmath>

// Internal unit system used throughout: hbar = 1, time in ns, length in um.
// Energies and angular frequencies are then both rad/ns; a laboratory
// frequency f in MHz enters as 2*pi*1e-3*f rad/ns. Mass carries ns/um^2
// (it only ever appears as hbar*k^2/2m).

namespace rygate::constants {

// CODATA 2018 values, 10 significant figures where defined to that precision.
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double planck_h          = 6.626070150e-34;  // J s (exact)
inline constexpr double hbar              = 1.054571817e-34;  // J s
inline constexpr double boltzmann_kb      = 1.380649000e-23;  // J/K (exact)
inline constexpr double speed_of_light    = 2.997924580e8;    // m/s (exact)
inline constexpr double vacuum_permittivity = 8.854187813e-12;  // F/m
inline constexpr double bohr_radius       = 5.291772109e-11;  // m
inline constexpr double electron_mass     = 9.109383702e-31;  // kg
inline constexpr double atomic_mass_unit  = 1.660539067e-27;  // kg
inline constexpr double hartree_energy    = 4.359744722e-18;  // J
inline constexpr double fine_structure    = 7.297352569e-3;

// 87Rb atomic mass (AME2020).
inline constexpr double rb87_mass_amu = 86.90918053;

}  // namespace rygate::constants

namespace rygate::units {

inline constexpr double pi = 3.14159265358979323846;

/// Laboratory frequency f in MHz -> angular frequency in rad/ns.
inline constexpr double mhz_to_angular(double f_mhz) {
    return 2.0 * pi * 1.0e-3 * f_mhz;
}

/// Angular frequency in rad/ns -> laboratory frequency in MHz.
inline constexpr double angular_to_mhz(double w) {
    return w / (2.0 * pi * 1.0e-3);
}

/// Mass in kg -> internal mass (ns/um^2, hbar = 1). Defined so that the
/// kinetic energy k^2/(2 m_int) with k in rad/um comes out in rad/ns.
inline constexpr double mass_to_internal(double m_kg) {
    return m_kg * 1.0e-3 / constants::hbar;
}

/// Full 87Rb mass in internal units. The relative coordinate of the two-atom
/// model keeps the full single-atom mass; this reproduces the 20 nm motional
/// ground state of the 2*pi*276 kHz trap.
inline double rb87_mass() {
    return mass_to_internal(constants::rb87_mass_amu * constants::atomic_mass_unit);
}

}  // namespace rygate::units
