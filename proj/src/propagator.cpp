#include "rygate/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "rygate/errors.hpp"
#include "rygate/units.hpp"

namespace rygate {

namespace {

constexpr std::complex<double> imag_unit{0.0, 1.0};
// Per-step truncation; norm drift accumulates roughly linearly in the step
// count, so this sits well below the 1e-9 budget of a ~1e3-step gate window.
constexpr double coeff_tail = 1e-14;
constexpr int max_order = 10000;

double bessel_j_signed(int n, double z) {
    // J_n(-z) = (-1)^n J_n(z); the library routine wants z >= 0.
    const double j = std::cyl_bessel_j(n, std::abs(z));
    return (z < 0.0 && (n % 2 != 0)) ? -j : j;
}

/// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, series-stabilized
/// near z = 0 where the direct expressions cancel.
std::complex<double> phi1(std::complex<double> z) {
    if (std::abs(z) < 1e-4)
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
    return (std::exp(z) - 1.0) / z;
}

std::complex<double> phi2(std::complex<double> z) {
    if (std::abs(z) < 1e-4)
        return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)));
    return (std::exp(z) - 1.0 - z) / (z * z);
}

void check_finite(const TwoAtomState& psi, int step) {
    double s = 0.0;
    for (const auto& a : psi.amp) s += std::norm(a);
    if (!std::isfinite(s))
        throw numeric_error("propagate: non-finite amplitudes at step " + std::to_string(step));
}

}  // namespace

SpectralBounds estimate_spectral_bounds(const Hamiltonian& h, double omega_r_cap,
                                        double omega_b_cap) {
    const double margin = omega_r_cap + omega_b_cap;
    double hi = h.kinetic_max() + h.diagonal_max() + margin;
    double lo = h.diagonal_min() - margin;
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

ChebyshevCoeffs exp_coeffs(const SpectralBounds& bounds, double dt) {
    const double z = bounds.radius() * dt;
    const std::complex<double> phase = std::exp(-imag_unit * bounds.center() * dt);

    ChebyshevCoeffs set;
    set.center = bounds.center();
    set.radius = bounds.radius();

    std::complex<double> ipow{1.0, 0.0};  // (-i)^n
    for (int n = 0;; ++n) {
        const double jn = bessel_j_signed(n, z);
        // The Bessel coefficients oscillate up to n ~ |z| and only then
        // decay superexponentially; do not truncate inside the oscillatory
        // head.
        if (n > std::abs(z) && std::abs(jn) < coeff_tail && n >= 1) break;
        if (n >= max_order)
            throw numeric_error(
                "exp_coeffs: expansion order over 1e4; use a smaller time step or tighter "
                "spectral bounds");
        set.c.push_back((n == 0 ? 1.0 : 2.0) * phase * ipow * jn);
        ipow *= -imag_unit;
    }
    return set;
}

ChebyshevCoeffs fit_coeffs(const SpectralBounds& bounds,
                           const std::function<std::complex<double>(double)>& f, double tail_tol) {
    ChebyshevCoeffs set;
    set.center = bounds.center();
    set.radius = bounds.radius();

    for (int m = 64; m <= 8192; m *= 2) {
        // Chebyshev-Gauss nodes x_k = cos(theta_k), theta_k = pi (k+1/2)/m.
        std::vector<std::complex<double>> fx(m);
        for (int k = 0; k < m; ++k) {
            const double theta = units::pi * (k + 0.5) / m;
            fx[k] = f(set.center + set.radius * std::cos(theta));
        }
        std::vector<std::complex<double>> c(m);
        for (int n = 0; n < m; ++n) {
            std::complex<double> s = 0.0;
            for (int k = 0; k < m; ++k) s += fx[k] * std::cos(n * units::pi * (k + 0.5) / m);
            c[n] = s * ((n == 0 ? 1.0 : 2.0) / m);
        }
        // Converged when the top quarter of the coefficients is negligible.
        double tail = 0.0;
        for (int n = 3 * m / 4; n < m; ++n) tail = std::max(tail, std::abs(c[n]));
        if (tail < tail_tol) {
            int keep = m;
            while (keep > 2 && std::abs(c[keep - 1]) < tail_tol) --keep;
            c.resize(keep);
            set.c = std::move(c);
            return set;
        }
    }
    throw numeric_error("fit_coeffs: no convergence up to order 8192; use a smaller time step");
}

ChebyshevCoeffs phi1_coeffs(const SpectralBounds& bounds, double h) {
    return fit_coeffs(bounds,
                      [h](double e) { return h * phi1(-imag_unit * h * e); });
}

ChebyshevCoeffs phi2_coeffs(const SpectralBounds& bounds, double h) {
    return fit_coeffs(bounds,
                      [h](double e) { return h * h * phi2(-imag_unit * h * e); });
}

void apply_poly(const ChebyshevCoeffs& coeffs, const Hamiltonian& h, double omega_r,
                double omega_b, ApplyMode mode, const TwoAtomState& x, TwoAtomState& result,
                PropWorkspace& ws) {
    const size_t sz = x.amp.size();
    const int n_r = x.n_r;
    const double inv_radius = 1.0 / coeffs.radius;
    const double center = coeffs.center;

    auto apply_scaled = [&](const TwoAtomState& in, TwoAtomState& out) {
        // out = (H in - center in)/radius
        h.apply(in, omega_r, omega_b, mode, ws.fft, out);
        for (size_t j = 0; j < sz; ++j) out.amp[j] = (out.amp[j] - center * in.amp[j]) * inv_radius;
    };

    if (result.n_r != n_r) result = TwoAtomState(n_r);
    if (ws.t_prev.n_r != n_r) {
        ws.t_prev = TwoAtomState(n_r);
        ws.t_cur = TwoAtomState(n_r);
        ws.t_next = TwoAtomState(n_r);
    }

    // T_0 x = x
    ws.t_prev.amp = x.amp;
    for (size_t j = 0; j < sz; ++j) result.amp[j] = coeffs.c[0] * x.amp[j];
    if (coeffs.c.size() == 1) return;

    // T_1 x = H_s x
    apply_scaled(ws.t_prev, ws.t_cur);
    for (size_t j = 0; j < sz; ++j) result.amp[j] += coeffs.c[1] * ws.t_cur.amp[j];

    for (size_t n = 2; n < coeffs.c.size(); ++n) {
        apply_scaled(ws.t_cur, ws.t_next);
        for (size_t j = 0; j < sz; ++j) {
            ws.t_next.amp[j] = 2.0 * ws.t_next.amp[j] - ws.t_prev.amp[j];
            result.amp[j] += coeffs.c[n] * ws.t_next.amp[j];
        }
        std::swap(ws.t_prev, ws.t_cur);
        std::swap(ws.t_cur, ws.t_next);
    }
}

void chebyshev_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                    const ChebyshevCoeffs& exp_set, ApplyMode mode, PropWorkspace& ws) {
    apply_poly(exp_set, h, omega_r, omega_b, mode, psi, ws.acc, ws);
    std::swap(psi, ws.acc);
}

void chebyshev_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                    const SpectralBounds& bounds, double dt, ApplyMode mode, PropWorkspace& ws) {
    chebyshev_step(psi, h, omega_r, omega_b, exp_coeffs(bounds, dt), mode, ws);
}

void inhomogeneous_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                        const ChebyshevCoeffs& exp_set, const ChebyshevCoeffs& phi1_set,
                        const ChebyshevCoeffs& phi2_set, const TwoAtomState& g0,
                        const TwoAtomState& gdot, ApplyMode mode, PropWorkspace& ws) {
    apply_poly(exp_set, h, omega_r, omega_b, mode, psi, ws.acc, ws);
    std::swap(psi, ws.acc);
    apply_poly(phi1_set, h, omega_r, omega_b, mode, g0, ws.acc, ws);
    for (size_t j = 0; j < psi.amp.size(); ++j) psi.amp[j] += ws.acc.amp[j];
    apply_poly(phi2_set, h, omega_r, omega_b, mode, gdot, ws.acc, ws);
    for (size_t j = 0; j < psi.amp.size(); ++j) psi.amp[j] += ws.acc.amp[j];
}

void inhomogeneous_step(TwoAtomState& psi, const Hamiltonian& h, double omega_r, double omega_b,
                        const SpectralBounds& bounds, double step_h, const TwoAtomState& phi_start,
                        const TwoAtomState& phi_end, ApplyMode mode, PropWorkspace& ws) {
    if (step_h == 0.0) throw std::invalid_argument("inhomogeneous_step: zero step");
    TwoAtomState g0(psi.n_r), gdot(psi.n_r);
    const double inv_h = 1.0 / step_h;
    for (size_t j = 0; j < psi.amp.size(); ++j) {
        g0.amp[j] = -imag_unit * phi_start.amp[j];
        gdot.amp[j] = -imag_unit * (phi_end.amp[j] - phi_start.amp[j]) * inv_h;
    }
    inhomogeneous_step(psi, h, omega_r, omega_b, exp_coeffs(bounds, step_h),
                       phi1_coeffs(bounds, step_h), phi2_coeffs(bounds, step_h), g0, gdot, mode,
                       ws);
}

Trajectory propagate(const TwoAtomState& psi0, const ControlField& fields, const Hamiltonian& h,
                     ApplyMode mode, int store_stride) {
    if (psi0.n_r != h.grid().n_r) throw std::invalid_argument("propagate: psi0/grid mismatch");
    if (static_cast<int>(fields.eps_r.size()) != fields.n_t + 1 ||
        static_cast<int>(fields.eps_b.size()) != fields.n_t + 1)
        throw std::invalid_argument("propagate: control sample count mismatch");

    const SystemParameters& p = h.params();
    const SpectralBounds bounds = estimate_spectral_bounds(h, p.omega_r0, p.omega_b0);
    const ChebyshevCoeffs exp_set = exp_coeffs(bounds, fields.dt);
    PropWorkspace ws(psi0.n_r);

    Trajectory traj;
    traj.stride = store_stride;
    TwoAtomState psi = psi0;
    traj.times.push_back(0.0);
    traj.states.push_back(psi);

    for (int n = 0; n < fields.n_t; ++n) {
        const double wr = rabi_from_control(control_midpoint(fields.eps_r, n), p.omega_r0);
        const double wb = rabi_from_control(control_midpoint(fields.eps_b, n), p.omega_b0);
        chebyshev_step(psi, h, wr, wb, exp_set, mode, ws);
        check_finite(psi, n + 1);
        const bool last = (n + 1 == fields.n_t);
        if ((store_stride > 0 && (n + 1) % store_stride == 0 && !last) || last) {
            traj.times.push_back((n + 1) * fields.dt);
            traj.states.push_back(psi);
        }
    }
    return traj;
}

}  // namespace rygate
