#include "rygate/krotov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "rygate/errors.hpp"

namespace rygate {

namespace {

constexpr std::complex<double> imag_unit{0.0, 1.0};

/// Channels with no atom in |i>, i.e. the range of P_allow.
constexpr bool channel_allowed(int c) {
    const int a = c / n_levels;
    const int b = c % n_levels;
    return a != static_cast<int>(Level::i) && b != static_cast<int>(Level::i);
}

/// Number of atoms in |i> for a channel.
constexpr int channel_i_count(int c) {
    return (c / n_levels == static_cast<int>(Level::i) ? 1 : 0) +
           (c % n_levels == static_cast<int>(Level::i) ? 1 : 0);
}

int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 4);
    if (const char* env = std::getenv("RYGATE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return std::min(v, 4);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::min(4u, std::max(1u, hw));
}

/// Run fn(0..3); with more than one worker the four register states are
/// handled by separate threads (results land in per-state slots, so the
/// outcome is identical to the serial order).
template <typename Fn>
void over_states(int threads, Fn&& fn) {
    if (threads <= 1) {
        for (int b = 0; b < 4; ++b) fn(b);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(4);
    for (int b = 0; b < 4; ++b) pool.emplace_back([&fn, b] { fn(b); });
    for (auto& t : pool) t.join();
}

/// <chi| C |psi> for the red coupling structure C = sum_atoms (|0><i| + h.c.),
/// without the Omega/2 prefactor.
std::complex<double> coupling_overlap_red(const TwoAtomState& chi, const TwoAtomState& psi,
                                          double dr) {
    std::complex<double> s = 0.0;
    const int n = psi.n_r;
    for (int other = 0; other < n_levels; ++other) {
        const auto lv = static_cast<Level>(other);
        const int c0 = channel_index(Level::q0, lv);
        const int ci = channel_index(Level::i, lv);
        const int d0 = channel_index(lv, Level::q0);
        const int di = channel_index(lv, Level::i);
        for (int j = 0; j < n; ++j) {
            s += std::conj(chi.channel(c0)[j]) * psi.channel(ci)[j] +
                 std::conj(chi.channel(ci)[j]) * psi.channel(c0)[j];
            s += std::conj(chi.channel(d0)[j]) * psi.channel(di)[j] +
                 std::conj(chi.channel(di)[j]) * psi.channel(d0)[j];
        }
    }
    return dr * s;
}

/// Same for the blue coupling C = sum_atoms (|i><r| + h.c.).
std::complex<double> coupling_overlap_blue(const TwoAtomState& chi, const TwoAtomState& psi,
                                           double dr) {
    std::complex<double> s = 0.0;
    const int n = psi.n_r;
    for (int other = 0; other < n_levels; ++other) {
        const auto lv = static_cast<Level>(other);
        const int ci = channel_index(Level::i, lv);
        const int cr = channel_index(Level::r, lv);
        const int di = channel_index(lv, Level::i);
        const int dd = channel_index(lv, Level::r);
        for (int j = 0; j < n; ++j) {
            s += std::conj(chi.channel(ci)[j]) * psi.channel(cr)[j] +
                 std::conj(chi.channel(cr)[j]) * psi.channel(ci)[j];
            s += std::conj(chi.channel(di)[j]) * psi.channel(dd)[j] +
                 std::conj(chi.channel(dd)[j]) * psi.channel(di)[j];
        }
    }
    return dr * s;
}

/// out = scale * P_allow in.
void masked_scaled(const TwoAtomState& in, double scale, TwoAtomState& out) {
    const int n = in.n_r;
    if (out.n_r != n) out = TwoAtomState(n);
    for (int c = 0; c < n_channels; ++c) {
        const std::complex<double>* src = in.channel(c);
        std::complex<double>* dst = out.channel(c);
        if (channel_allowed(c))
            for (int j = 0; j < n; ++j) dst[j] = scale * src[j];
        else
            std::fill(dst, dst + n, std::complex<double>{0.0, 0.0});
    }
}

double sech2(double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}

std::complex<double> register_overlap_sum(const std::array<TwoAtomState, 4>& finals,
                                          const GateTarget& target,
                                          const std::array<TwoAtomState, 4>& basis,
                                          const SpatialGrid& grid) {
    std::complex<double> tau = 0.0;
    for (int b = 0; b < 4; ++b)
        tau += std::exp(-imag_unit * target.phase_of(b)) * inner(basis[b], finals[b], grid);
    return tau;
}

/// Trapezoid weights over the control samples.
double trapezoid_weight(int n, int n_t) { return (n == 0 || n == n_t) ? 0.5 : 1.0; }

double control_penalty(const ControlField& fields, const ControlField& ref,
                       const OptimizationConfig& cfg) {
    if (fields.n_t != ref.n_t)
        throw std::invalid_argument("functional_j: fields/ref sample count mismatch");
    double pen = 0.0;
    for (int n = 0; n <= fields.n_t; ++n) {
        const double s = update_shape(n * fields.dt, fields.duration);
        if (s < 1e-12) continue;
        const double d_r = fields.eps_r[n] - ref.eps_r[n];
        const double d_b = fields.eps_b[n] - ref.eps_b[n];
        pen += trapezoid_weight(n, fields.n_t) * fields.dt * (cfg.alpha / s) *
               (d_r * d_r + d_b * d_b);
    }
    return pen;
}

}  // namespace

std::array<TwoAtomState, 4> make_register_basis(const SpatialGrid& grid,
                                                const SystemParameters& params) {
    return {make_register_state(grid, params, Level::q0, Level::q0),
            make_register_state(grid, params, Level::q0, Level::q1),
            make_register_state(grid, params, Level::q1, Level::q0),
            make_register_state(grid, params, Level::q1, Level::q1)};
}

double fidelity(const std::array<TwoAtomState, 4>& finals, const GateTarget& target,
                const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid) {
    return 0.25 * std::abs(register_overlap_sum(finals, target, basis, grid));
}

double allowed_population(const TwoAtomState& psi, const SpatialGrid& grid) {
    double s = 0.0;
    for (int c = 0; c < n_channels; ++c) {
        if (!channel_allowed(c)) continue;
        const std::complex<double>* line = psi.channel(c);
        for (int j = 0; j < psi.n_r; ++j) s += std::norm(line[j]);
    }
    return grid.dr * s;
}

double intermediate_population(const TwoAtomState& psi, const SpatialGrid& grid) {
    double s = 0.0;
    for (int c = 0; c < n_channels; ++c) {
        const int w = channel_i_count(c);
        if (w == 0) continue;
        const std::complex<double>* line = psi.channel(c);
        for (int j = 0; j < psi.n_r; ++j) s += w * std::norm(line[j]);
    }
    return grid.dr * s;
}

double functional_j(const std::array<Trajectory, 4>& trajectories, const ControlField& fields,
                    const ControlField& fields_ref, const OptimizationConfig& cfg,
                    const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid) {
    std::array<TwoAtomState, 4> finals{
        trajectories[0].states.back(), trajectories[1].states.back(),
        trajectories[2].states.back(), trajectories[3].states.back()};
    double j = -fidelity(finals, cfg.target, basis, grid);
    j += control_penalty(fields, fields_ref, cfg);
    if (cfg.variant == FunctionalVariant::state_constrained) {
        double integral = 0.0;
        for (const auto& traj : trajectories) {
            // Trapezoid over whatever samples were stored.
            for (size_t m = 0; m + 1 < traj.states.size(); ++m) {
                const double w = 0.5 * (traj.times[m + 1] - traj.times[m]);
                integral += w * (allowed_population(traj.states[m], grid) +
                                 allowed_population(traj.states[m + 1], grid));
            }
        }
        j -= cfg.lambda_c * integral;
    }
    return j;
}

Krotov::Krotov(const Hamiltonian& h, const ControlField& guess, const OptimizationConfig& cfg)
    : h_(h), cfg_(cfg), fields_(guess), fields_prev_(guess) {
    if (static_cast<int>(guess.eps_r.size()) != guess.n_t + 1 ||
        static_cast<int>(guess.eps_b.size()) != guess.n_t + 1)
        throw std::invalid_argument("Krotov: control sample count mismatch");
    threads_ = resolve_threads(cfg_.threads);

    const SystemParameters& p = h_.params();
    bounds_ = estimate_spectral_bounds(h_, p.omega_r0, p.omega_b0);
    exp_fwd_ = exp_coeffs(bounds_, fields_.dt);
    exp_bwd_ = exp_coeffs(bounds_, -fields_.dt);
    if (cfg_.variant == FunctionalVariant::state_constrained) {
        phi1_bwd_ = phi1_coeffs(bounds_, -fields_.dt);
        phi2_bwd_ = phi2_coeffs(bounds_, -fields_.dt);
    }

    basis_ = make_register_basis(h_.grid(), p);
    shape_.resize(fields_.n_t + 1);
    for (int n = 0; n <= fields_.n_t; ++n)
        shape_[n] = update_shape(n * fields_.dt, fields_.duration);

    const int n_r = h_.grid().n_r;
    for (int b = 0; b < 4; ++b) {
        psi_traj_[b].assign(fields_.n_t + 1, TwoAtomState(n_r));
        chi_traj_[b].assign(fields_.n_t + 1, TwoAtomState(n_r));
    }

    forward_pass(false);
    history_.push_back(make_record(0, fields_));
}

void Krotov::forward_pass(bool update_fields) {
    const SystemParameters& p = h_.params();
    const double dr = h_.grid().dr;
    const int n_r = h_.grid().n_r;

    if (!update_fields) {
        // No cross-state coupling: each register state propagates alone.
        over_states(threads_, [&](int b) {
            PropWorkspace ws(n_r);
            TwoAtomState psi = basis_[b];
            psi_traj_[b][0] = psi;
            for (int n = 0; n < fields_.n_t; ++n) {
                const double wr =
                    rabi_from_control(control_midpoint(fields_.eps_r, n), p.omega_r0);
                const double wb =
                    rabi_from_control(control_midpoint(fields_.eps_b, n), p.omega_b0);
                chebyshev_step(psi, h_, wr, wb, exp_fwd_, ApplyMode::hermitian, ws);
                psi_traj_[b][n + 1] = psi;
            }
        });
        return;
    }

    // Sequential update. When interval n is about to be stepped, its left
    // sample was finalized one interval earlier, so the free variable is the
    // right sample n+1: rewrite it from chi(t_n) and the already-updated
    // forward states at t_n, then step with the midpoint of two final values.
    // Each sample's change is thereby fully realized across its two adjacent
    // intervals, which keeps the realized first-order gain at twice the
    // penalty and the functional decrease robust. Updating the left sample
    // instead would realize only half of each change (the right neighbour is
    // still old when the interval is consumed), leaving the gain/penalty
    // balance marginal and the sign of dJ to discretization noise.
    fields_prev_ = fields_;
    std::array<PropWorkspace, 4> ws{PropWorkspace(n_r), PropWorkspace(n_r), PropWorkspace(n_r),
                                    PropWorkspace(n_r)};
    std::array<TwoAtomState, 4> psi = basis_;
    for (int b = 0; b < 4; ++b) psi_traj_[b][0] = psi[b];

    for (int n = 0; n < fields_.n_t; ++n) {
        if (shape_[n + 1] > 0.0) {
            double g_red = 0.0, g_blue = 0.0;
            for (int b = 0; b < 4; ++b) {
                g_red += std::imag(coupling_overlap_red(chi_traj_[b][n], psi[b], dr));
                g_blue += std::imag(coupling_overlap_blue(chi_traj_[b][n], psi[b], dr));
            }
            // dH/deps = (omega0 sech^2(eps)/2) * C/2, evaluated at the old
            // sample value.
            const double gain = shape_[n + 1] / (2.0 * cfg_.alpha);
            fields_.eps_r[n + 1] +=
                gain * 0.25 * p.omega_r0 * sech2(fields_.eps_r[n + 1]) * g_red;
            fields_.eps_b[n + 1] +=
                gain * 0.25 * p.omega_b0 * sech2(fields_.eps_b[n + 1]) * g_blue;
        }
        const double wr = rabi_from_control(control_midpoint(fields_.eps_r, n), p.omega_r0);
        const double wb = rabi_from_control(control_midpoint(fields_.eps_b, n), p.omega_b0);
        over_states(threads_, [&](int b) {
            chebyshev_step(psi[b], h_, wr, wb, exp_fwd_, ApplyMode::hermitian, ws[b]);
            psi_traj_[b][n + 1] = psi[b];
        });
    }
}

void Krotov::backward_pass() {
    const SystemParameters& p = h_.params();
    const SpatialGrid& grid = h_.grid();

    std::array<TwoAtomState, 4> finals{psi_traj_[0].back(), psi_traj_[1].back(),
                                       psi_traj_[2].back(), psi_traj_[3].back()};
    const std::complex<double> tau = register_overlap_sum(finals, cfg_.target, basis_, grid);
    const std::complex<double> w =
        0.25 * (std::abs(tau) == 0.0 ? std::complex<double>{1.0, 0.0} : tau / std::abs(tau));

    const bool constrained = cfg_.variant == FunctionalVariant::state_constrained;

    over_states(threads_, [&](int b) {
        PropWorkspace ws(grid.n_r);
        TwoAtomState chi(grid.n_r);
        const std::complex<double> head = w * std::exp(imag_unit * cfg_.target.phase_of(b));
        for (size_t j = 0; j < chi.amp.size(); ++j) chi.amp[j] = head * basis_[b].amp[j];
        chi_traj_[b][fields_.n_t] = chi;

        TwoAtomState g0(grid.n_r), g1(grid.n_r), gdot(grid.n_r);
        for (int n = fields_.n_t - 1; n >= 0; --n) {
            const double wr = rabi_from_control(control_midpoint(fields_.eps_r, n), p.omega_r0);
            const double wb = rabi_from_control(control_midpoint(fields_.eps_b, n), p.omega_b0);
            if (!constrained) {
                chebyshev_step(chi, h_, wr, wb, exp_bwd_, ApplyMode::hermitian, ws);
            } else {
                // Costate source from the previous forward trajectory:
                // d(chi)/dt = -iH chi - 2 lambda_c P psi_old(t), linearly
                // interpolated across the step.
                masked_scaled(psi_traj_[b][n + 1], -2.0 * cfg_.lambda_c, g0);
                masked_scaled(psi_traj_[b][n], -2.0 * cfg_.lambda_c, g1);
                const double inv_h = -1.0 / fields_.dt;
                for (size_t j = 0; j < gdot.amp.size(); ++j)
                    gdot.amp[j] = (g1.amp[j] - g0.amp[j]) * inv_h;
                inhomogeneous_step(chi, h_, wr, wb, exp_bwd_, phi1_bwd_, phi2_bwd_, g0, gdot,
                                   ApplyMode::hermitian, ws);
            }
            chi_traj_[b][n] = chi;
        }
    });
}

IterationRecord Krotov::make_record(int iteration, const ControlField& ref) const {
    const SpatialGrid& grid = h_.grid();
    std::array<TwoAtomState, 4> finals{psi_traj_[0].back(), psi_traj_[1].back(),
                                       psi_traj_[2].back(), psi_traj_[3].back()};
    IterationRecord rec;
    rec.iteration = iteration;
    rec.fidelity = fidelity(finals, cfg_.target, basis_, grid);

    double integral = 0.0;
    for (int b = 0; b < 4; ++b)
        for (int n = 0; n <= fields_.n_t; ++n)
            integral += trapezoid_weight(n, fields_.n_t) * fields_.dt *
                        allowed_population(psi_traj_[b][n], grid);
    rec.constraint_avg = integral / (4.0 * fields_.duration);

    rec.j_total = -rec.fidelity + control_penalty(fields_, ref, cfg_);
    if (cfg_.variant == FunctionalVariant::state_constrained)
        rec.j_total -= cfg_.lambda_c * integral;
    return rec;
}

IterationRecord Krotov::iterate() {
    const double prev_j = history_.back().j_total;
    backward_pass();
    forward_pass(true);
    IterationRecord rec = make_record(static_cast<int>(history_.size()), fields_prev_);
    if (rec.j_total > prev_j + cfg_.monotonic_tol)
        throw monotonicity_error(rec.iteration, prev_j, rec.j_total);
    history_.push_back(rec);
    return rec;
}

OptimizationResult Krotov::optimize() {
    auto gate_error = [&] { return 1.0 - history_.back().fidelity; };
    while (static_cast<int>(history_.size()) - 1 < cfg_.max_iterations &&
           gate_error() > cfg_.stop_error)
        iterate();

    OptimizationResult res;
    res.history = history_;
    res.fields = fields_;
    res.final_states = {psi_traj_[0].back(), psi_traj_[1].back(), psi_traj_[2].back(),
                        psi_traj_[3].back()};
    res.gate_error = gate_error();
    res.converged = res.gate_error <= cfg_.stop_error;
    res.iterations = static_cast<int>(history_.size()) - 1;
    return res;
}

OptimizationResult krotov_optimize(const Hamiltonian& h, const ControlField& guess,
                                   const OptimizationConfig& cfg) {
    Krotov k(h, guess, cfg);
    return k.optimize();
}

double evaluate_with_loss(const ControlField& fields, SystemParameters params,
                          const SpatialGrid& grid, double gamma_i, double gamma_r,
                          const GateTarget& target) {
    params.gamma_i = gamma_i;
    params.gamma_r = gamma_r;
    const Hamiltonian h(params, grid);
    const auto basis = make_register_basis(grid, params);
    std::array<TwoAtomState, 4> finals;
    for (int b = 0; b < 4; ++b)
        finals[b] = propagate(basis[b], fields, h, ApplyMode::with_decay).states.back();
    return 1.0 - fidelity(finals, target, basis, grid);
}

double wrap_angle(double x) {
    double w = std::remainder(x, 2.0 * units::pi);
    if (w <= -units::pi) w += 2.0 * units::pi;
    return w;
}

double nonlocal_phase(const std::array<TwoAtomState, 4>& finals,
                      const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid) {
    std::array<double, 4> phase;
    for (int b = 0; b < 4; ++b) {
        const std::complex<double> ov = inner(basis[b], finals[b], grid);
        if (std::abs(ov) < 1e-6)
            throw std::domain_error(
                "nonlocal_phase: register overlap below 1e-6, phase undefined");
        phase[b] = std::arg(ov);
    }
    return wrap_angle(phase[0] - phase[1] - phase[2] + phase[3]);
}

}  // namespace rygate
