#include <chrono>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rygate/noise.hpp"
#include "rygate/units.hpp"

using namespace rygate;

TEST_CASE("single adsorbate field at 10 um") {
    const double e10 = impurity_field(10.0);
    CHECK(e10 == doctest::Approx(1.52399e-4).epsilon(2e-4));
    // Design window: 1.5e-4 V/m within 5%.
    CHECK(std::abs(e10 / 1.5e-4 - 1.0) < 0.05);

    SUBCASE("inverse-cube distance scaling") {
        CHECK(impurity_field(5.0) == doctest::Approx(8.0 * e10).epsilon(1e-12));
        CHECK(impurity_field(20.0) == doctest::Approx(e10 / 8.0).epsilon(1e-12));
    }

    SUBCASE("nonpositive distances are rejected") {
        CHECK_THROWS_AS(impurity_field(0.0), std::invalid_argument);
        CHECK_THROWS_AS(impurity_field(-3.0), std::invalid_argument);
    }
}

TEST_CASE("adsorbate patch sum") {
    const double patch = adsorbate_field_sum(100.0, 10.0, 10.0);
    CHECK(patch == doctest::Approx(1.0081).epsilon(1e-3));
    // Design window: between 0.1 and 10 V/m for a realistic patch.
    CHECK(patch > 0.1);
    CHECK(patch < 10.0);
    CHECK(patch > impurity_field(10.0));

    SUBCASE("a patch too small for more than one site is a single adsorbate") {
        CHECK(adsorbate_field_sum(1e-6, 0.5, 10.0) ==
              doctest::Approx(impurity_field(10.0)).epsilon(1e-12));
        CHECK(adsorbate_field_sum(100.0, 0.0, 10.0) ==
              doctest::Approx(impurity_field(10.0)).epsilon(1e-12));
    }

    SUBCASE("a wider patch stays within the same order of magnitude") {
        const double wide = adsorbate_field_sum(100.0, 30.0, 10.0);
        CHECK(wide > 0.1);
        CHECK(wide < 10.0);
    }
}

TEST_CASE("Stark coupling between adjacent Rydberg levels") {
    const double m1 = stark_matrix_element(58, 1.0);
    CHECK(m1 == doctest::Approx(43.04).epsilon(1e-2));
    CHECK(m1 > 35.0);
    CHECK(m1 < 50.0);

    SUBCASE("linear in the field, quadratic in n") {
        CHECK(stark_matrix_element(58, 2.0) == doctest::Approx(2.0 * m1).epsilon(1e-12));
        CHECK(stark_matrix_element(58, 0.0) == doctest::Approx(0.0));
        CHECK(stark_matrix_element(116, 1.0) == doctest::Approx(4.0 * m1).epsilon(1e-12));
    }

    SUBCASE("the single-adsorbate field at 10 um keeps the coupling in the kHz range") {
        const double tiny = stark_matrix_element(58, impurity_field(10.0));
        CHECK(tiny < 0.05);   // MHz
        CHECK(tiny > 1e-4);
    }
}

TEST_CASE("quadratic Stark shift and induced dipole") {
    CHECK(quadratic_stark_shift(2.5, 1.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(quadratic_stark_shift(2.5, 3.0) == doctest::Approx(22.5).epsilon(1e-12));
    CHECK(quadratic_stark_shift(2.5, 0.0) == doctest::Approx(0.0));

    const double d_big = induced_dipole(2.5, 1.0);
    CHECK(d_big == doctest::Approx(195.4).epsilon(5e-3));
    CHECK(std::abs(d_big / 200.0 - 1.0) < 0.05);

    const double d_small = induced_dipole(0.05, 1.0);
    CHECK(d_small == doctest::Approx(d_big * 0.05 / 2.5).epsilon(1e-12));
    CHECK(std::abs(d_small / 4.0 - 1.0) < 0.05);
}

TEST_CASE("power-law surface noise spectrum") {
    const double s_ref = 1e-11;
    const double z_ref = 75.0;
    const double w_ref = 2.0 * units::pi * 1e6;
    const double beta = 0.7;

    CHECK(noise_spectrum(s_ref, z_ref, w_ref, beta, z_ref, w_ref) ==
          doctest::Approx(s_ref).epsilon(1e-12));

    SUBCASE("fourth-power distance enhancement toward the chip") {
        const double near = noise_spectrum(s_ref, z_ref, w_ref, beta, 10.0, w_ref);
        CHECK(near == doctest::Approx(s_ref * std::pow(7.5, 4)).epsilon(1e-12));
        CHECK(near == doctest::Approx(3.164e-8).epsilon(1e-3));
    }

    SUBCASE("frequency falls off with the spectral exponent") {
        const double doubled = noise_spectrum(s_ref, z_ref, w_ref, beta, z_ref, 2.0 * w_ref);
        CHECK(doubled == doctest::Approx(s_ref * std::pow(2.0, -beta)).epsilon(1e-12));
    }

    SUBCASE("invalid arguments are rejected") {
        CHECK_THROWS_AS(noise_spectrum(s_ref, z_ref, w_ref, beta, 0.0, w_ref),
                        std::invalid_argument);
        CHECK_THROWS_AS(noise_spectrum(s_ref, z_ref, w_ref, beta, z_ref, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(noise_spectrum(s_ref, z_ref, w_ref, beta, z_ref, -w_ref),
                        std::invalid_argument);
    }
}

TEST_CASE("dephasing by surface field noise") {
    NoiseParameters np;
    const auto res = dephasing_variance(np.d_r, np);
    CHECK(res.variance == doctest::Approx(0.0273109).epsilon(1e-3));
    CHECK(res.rate == doctest::Approx(1.36554e6).epsilon(1e-3));
    CHECK(res.error == doctest::Approx(res.variance / 2.0).epsilon(1e-12));
    // Design window: between 1e5 and 1e7 per second at the chip.
    CHECK(res.rate > 1e5);
    CHECK(res.rate < 1e7);

    SUBCASE("variance grows with the dipole squared") {
        const auto small = dephasing_variance(4.0, np);
        CHECK(small.variance ==
              doctest::Approx(res.variance * (4.0 / 200.0) * (4.0 / 200.0)).epsilon(1e-12));
        const auto zero = dephasing_variance(0.0, np);
        CHECK(zero.variance == doctest::Approx(0.0));
        CHECK(zero.rate == doctest::Approx(0.0));
    }

    SUBCASE("the divergent exponent is rejected") {
        auto bad = np;
        bad.beta = 1.0;
        CHECK_THROWS_AS(dephasing_variance(200.0, bad), std::invalid_argument);
        bad.beta = 2.0;
        CHECK_THROWS_AS(dephasing_variance(200.0, bad), std::invalid_argument);
        bad.beta = 0.0;
        CHECK_THROWS_AS(dephasing_variance(200.0, bad), std::invalid_argument);
    }
}

TEST_CASE("adjacent Rydberg level spacing") {
    const auto sp = rydberg_spacing(58);
    CHECK(sp.ghz == doctest::Approx(33.7226).epsilon(2e-4));
    // Design window: 33.7 GHz within 1%.
    CHECK(std::abs(sp.ghz / 33.7 - 1.0) < 0.01);
    CHECK(sp.inv_cm == doctest::Approx(sp.ghz / 29.9792458).epsilon(1e-12));
    CHECK(sp.omega == doctest::Approx(2.0 * units::pi * sp.ghz * 1e9).epsilon(1e-12));

    SUBCASE("inverse-cube scaling of the level spacing") {
        CHECK(rydberg_spacing(29).ghz == doctest::Approx(8.0 * sp.ghz).epsilon(1e-12));
    }
}

TEST_CASE("thermally enhanced decay to the adjacent level") {
    const auto sp = rydberg_spacing(58);
    const double mu = 56.66 * 56.66;  // e a_B n_star^2

    SUBCASE("detailed balance between emission and absorption") {
        const double em = thermal_decay_rate(sp.omega, mu, 300.0, 1.0);
        const double ab = thermal_decay_rate(-sp.omega, mu, 300.0, 1.0);
        const double hbar_w_over_kt = constants::hbar * sp.omega / (constants::boltzmann_kb * 300.0);
        CHECK(em / ab == doctest::Approx(std::exp(hbar_w_over_kt)).epsilon(1e-9));
        CHECK(em > ab);
    }

    SUBCASE("enhancement multiplies the rate") {
        const double base = thermal_decay_rate(sp.omega, mu, 300.0, 1.0);
        CHECK(thermal_decay_rate(sp.omega, mu, 300.0, 5.0) ==
              doctest::Approx(5.0 * base).epsilon(1e-12));
    }

    SUBCASE("zero frequency is rejected") {
        CHECK_THROWS_AS(thermal_decay_rate(0.0, mu, 300.0, 1.0), std::invalid_argument);
    }

    SUBCASE("total rate against frozen lifetimes") {
        const double free_rate = rydberg_decay_total(58, 56.66, 300.0, 1.0);
        const double chip_rate = rydberg_decay_total(58, 56.66, 300.0, 5.0);
        CHECK(1e6 / free_rate == doctest::Approx(90.754).epsilon(1e-3));
        CHECK(1e6 / chip_rate == doctest::Approx(18.151).epsilon(1e-3));
        CHECK(chip_rate == doctest::Approx(5.0 * free_rate).epsilon(1e-12));
        // Order of magnitude: tens of microseconds at room temperature.
        CHECK(1e6 / free_rate > 30.0);
        CHECK(1e6 / free_rate < 300.0);
        CHECK(1e6 / chip_rate > 6.0);
        CHECK(1e6 / chip_rate < 60.0);
    }
}

TEST_CASE("van der Waals shift near the surface") {
    const auto v10 = vdw_shift(56.66, 10.0);
    CHECK(v10.magnitude_mhz == doctest::Approx(1.57013).epsilon(2e-4));
    CHECK(v10.sign == -1);
    // Design window: 1.6 MHz within 10%.
    CHECK(std::abs(v10.magnitude_mhz / 1.6 - 1.0) < 0.10);

    SUBCASE("cube of the mirror distance") {
        CHECK(vdw_shift(56.66, 5.0).magnitude_mhz ==
              doctest::Approx(8.0 * v10.magnitude_mhz).epsilon(1e-12));
    }

    SUBCASE("fourth power of the effective quantum number") {
        CHECK(vdw_shift(2.0 * 56.66, 10.0).magnitude_mhz ==
              doctest::Approx(16.0 * v10.magnitude_mhz).epsilon(1e-12));
    }

    SUBCASE("nonpositive distances are rejected") {
        CHECK_THROWS_AS(vdw_shift(56.66, 0.0), std::invalid_argument);
    }
}

TEST_CASE("blackbody shift at room temperature") {
    const auto bb = blackbody_shift(300.0);
    CHECK(bb.free_khz == doctest::Approx(2.30775).epsilon(1e-3));
    // Design window: between 1.5 and 3 kHz.
    CHECK(bb.free_khz > 1.5);
    CHECK(bb.free_khz < 3.0);
    CHECK(bb.factor == doctest::Approx(1.0));
    CHECK(bb.total_khz == doctest::Approx(bb.free_khz).epsilon(1e-12));
    CHECK(bb.lambda_t_um == doctest::Approx(7.633).epsilon(1e-3));

    SUBCASE("quadratic temperature dependence") {
        CHECK(blackbody_shift(600.0).free_khz == doctest::Approx(4.0 * bb.free_khz).epsilon(1e-12));
    }

    SUBCASE("near-field factor at 10 um") {
        const auto near = blackbody_shift(300.0, 10.0);
        CHECK(near.factor == doctest::Approx(bb.lambda_t_um / 10.0).epsilon(1e-12));
        CHECK(near.total_khz == doctest::Approx(1.76149).epsilon(1e-3));
    }

    SUBCASE("zero temperature turns everything off") {
        const auto cold = blackbody_shift(0.0);
        CHECK(cold.free_khz == doctest::Approx(0.0));
        CHECK(cold.total_khz == doctest::Approx(0.0));
    }
}

TEST_CASE("noise budget report aggregates the individual estimators") {
    NoiseParameters np;
    const auto b = noise_budget_report(np);

    CHECK(b.impurity_field_v_m == doctest::Approx(impurity_field(np.z)).epsilon(1e-12));
    CHECK(b.adsorbate_field_v_m ==
          doctest::Approx(adsorbate_field_sum(np.adsorbate_density, np.patch_extent, np.z))
              .epsilon(1e-12));
    CHECK(b.stark_element_mhz ==
          doctest::Approx(stark_matrix_element(np.n_principal, b.adsorbate_field_v_m))
              .epsilon(1e-12));
    CHECK(b.stark_shift_mhz ==
          doctest::Approx(quadratic_stark_shift(np.alpha_r, b.adsorbate_field_v_m))
              .epsilon(1e-12));
    CHECK(b.induced_dipole_eab ==
          doctest::Approx(induced_dipole(np.alpha_r, b.adsorbate_field_v_m)).epsilon(1e-12));
    CHECK(b.stark_exceeds_forster == (b.stark_shift_mhz > 7.0));
    CHECK(b.stark_exceeds_interaction == (b.stark_shift_mhz > 50.0));

    const auto deph = dephasing_variance(np.d_r, np);
    CHECK(b.dephasing_variance_rad2 == doctest::Approx(deph.variance).epsilon(1e-12));
    CHECK(b.dephasing_rate_s == doctest::Approx(deph.rate).epsilon(1e-12));
    CHECK(b.dephasing_error == doctest::Approx(deph.error).epsilon(1e-12));

    const double free_rate = rydberg_decay_total(np.n_principal, np.n_star, np.temperature, 1.0);
    const double chip_rate =
        rydberg_decay_total(np.n_principal, np.n_star, np.temperature, np.enhancement);
    CHECK(b.free_decay_rate_s == doctest::Approx(free_rate).epsilon(1e-12));
    CHECK(b.chip_decay_rate_s == doctest::Approx(chip_rate).epsilon(1e-12));
    CHECK(b.lifetime_free_us == doctest::Approx(1e6 / free_rate).epsilon(1e-12));
    CHECK(b.lifetime_chip_us == doctest::Approx(1e6 / chip_rate).epsilon(1e-12));
    CHECK(b.decay_error == doctest::Approx(np.tau * 1e-9 * chip_rate).epsilon(1e-12));
    CHECK(b.decay_error == doctest::Approx(1.10188e-3).epsilon(1e-3));

    const auto v = vdw_shift(np.n_star, np.z);
    CHECK(b.vdw_shift_mhz == doctest::Approx(v.magnitude_mhz).epsilon(1e-12));
    CHECK(b.vdw_sign == v.sign);

    const auto bb = blackbody_shift(np.temperature, np.z);
    CHECK(b.blackbody_free_khz == doctest::Approx(bb.free_khz).epsilon(1e-12));
    CHECK(b.blackbody_total_khz == doctest::Approx(bb.total_khz).epsilon(1e-12));
    CHECK(b.spacing_ghz == doctest::Approx(rydberg_spacing(np.n_principal).ghz).epsilon(1e-12));

    SUBCASE("flags track the Stark shift as the field grows") {
        auto strong = np;
        strong.adsorbate_density = 900.0;
        const auto sb = noise_budget_report(strong);
        CHECK(sb.stark_exceeds_forster == (sb.stark_shift_mhz > 7.0));
        CHECK(sb.stark_exceeds_interaction == (sb.stark_shift_mhz > 50.0));
        CHECK(sb.stark_shift_mhz > b.stark_shift_mhz);
    }

    SUBCASE("switched-off channels report zeros") {
        auto off = np;
        off.d_r = 0.0;
        off.n_star = 0.0;
        const auto ob = noise_budget_report(off);
        CHECK(ob.dephasing_variance_rad2 == doctest::Approx(0.0));
        CHECK(ob.dephasing_rate_s == doctest::Approx(0.0));
        CHECK(ob.free_decay_rate_s == doctest::Approx(0.0));
        CHECK(ob.lifetime_free_us == doctest::Approx(0.0));
        CHECK(ob.lifetime_chip_us == doctest::Approx(0.0));
        CHECK(ob.decay_error == doctest::Approx(0.0));
    }
}

TEST_CASE("every estimator answers quickly") {
    NoiseParameters np;
    const auto t0 = std::chrono::steady_clock::now();
    volatile double sink = 0.0;
    sink += impurity_field(np.z);
    sink += adsorbate_field_sum(np.adsorbate_density, np.patch_extent, np.z);
    sink += stark_matrix_element(np.n_principal, 1.0);
    sink += quadratic_stark_shift(np.alpha_r, 1.0);
    sink += dephasing_variance(np.d_r, np).rate;
    sink += rydberg_decay_total(np.n_principal, np.n_star, np.temperature, np.enhancement);
    sink += vdw_shift(np.n_star, np.z).magnitude_mhz;
    sink += blackbody_shift(np.temperature, np.z).total_khz;
    sink += rydberg_spacing(np.n_principal).ghz;
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    CHECK(ms < 10.0);
    CHECK(sink != 0.0);
}
