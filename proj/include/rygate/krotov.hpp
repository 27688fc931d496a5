#pragma once

#include <array>
#include <complex>
#include <vector>

#include "rygate/propagator.hpp"
#include "rygate/units.hpp"

namespace rygate {

/// standard: J = -F + control-change penalty.
/// state_constrained: additionally rewards population in the subspace with
/// no atom in |i> (backward propagation acquires a source term).
enum class FunctionalVariant { standard, state_constrained };

/// Which register state carries the non-local phase in the target gate
/// diag(e^{i chi},1,1,1) (s00) or diag(1,1,1,e^{i chi}) (s11).
enum class PhasedState { s00, s11 };

struct GateTarget {
    double chi = units::pi;
    PhasedState phased = PhasedState::s11;

    /// Target phase of register basis state b, basis order (00, 01, 10, 11).
    double phase_of(int b) const {
        const bool hit =
            (phased == PhasedState::s00 && b == 0) || (phased == PhasedState::s11 && b == 3);
        return hit ? chi : 0.0;
    }
};

struct OptimizationConfig {
    FunctionalVariant variant = FunctionalVariant::standard;
    GateTarget target;
    double alpha = 1.0;        ///< update step weight; larger = smaller steps
    double lambda_c = 1.0;     ///< state-constraint weight
    double stop_error = 1e-3;  ///< stop once 1 - F falls below this
    int max_iterations = 5000;
    double monotonic_tol = 1e-10;  ///< allowed upward slack of J per iteration
    int threads = 0;               ///< 0: RYGATE_THREADS env or hardware, capped at 4
};

struct IterationRecord {
    int iteration = 0;
    double j_total = 0.0;
    double fidelity = 0.0;
    /// Time-averaged population of the allowed (no atom in |i>) subspace,
    /// averaged over the four register trajectories; in [0, 1].
    double constraint_avg = 0.0;
};

struct OptimizationResult {
    std::vector<IterationRecord> history;  ///< record 0 is the initial guess
    ControlField fields;
    std::array<TwoAtomState, 4> final_states;
    double gate_error = 1.0;
    bool converged = false;
    int iterations = 0;  ///< updates performed (history.size() - 1)
};

/// Krotov update shape and penalty weight S(t) = sin^2(pi t / T); zero at
/// both ends so the control endpoints never move.
inline double update_shape(double t, double duration) {
    const double s = std::sin(units::pi * t / duration);
    return s * s;
}

/// The four two-qubit register states |ab> x motional ground state,
/// basis order (00, 01, 10, 11).
std::array<TwoAtomState, 4> make_register_basis(const SpatialGrid& grid,
                                                const SystemParameters& params);

/// F = |sum_b e^{-i phase_b} <phi0_b|psi_b>| / 4.
double fidelity(const std::array<TwoAtomState, 4>& finals, const GateTarget& target,
                const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid);

/// <psi|P_allow|psi> with P_allow projecting onto channels where neither
/// atom is in |i>.
double allowed_population(const TwoAtomState& psi, const SpatialGrid& grid);

/// Expected number of atoms in |i> (0..2).
double intermediate_population(const TwoAtomState& psi, const SpatialGrid& grid);

/// Full control functional for stored trajectories:
/// J = -F + sum_controls int (alpha/S) (eps - eps_ref)^2 dt
///     [- lambda_c sum_b int <psi_b|P_allow|psi_b> dt  when state_constrained].
/// Samples where S(t) < 1e-12 (the window endpoints) carry no penalty
/// weight; the update itself vanishes there by construction.
double functional_j(const std::array<Trajectory, 4>& trajectories, const ControlField& fields,
                    const ControlField& fields_ref, const OptimizationConfig& cfg,
                    const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid);

/// Sequential Krotov optimizer for the two-atom gate. Backward states are
/// premultiplied by (1/4) e^{i arg tau} with tau the summed target overlap
/// (set to 1/4 when tau = 0); the forward sweep rewrites the right-hand
/// sample of each interval immediately before stepping across it, so every
/// sample change is fully realized by the dynamics of the same sweep.
class Krotov {
 public:
    Krotov(const Hamiltonian& h, const ControlField& guess, const OptimizationConfig& cfg);

    /// One update of both controls; monotonicity of J is enforced to
    /// cfg.monotonic_tol (throws monotonicity_error on violation).
    IterationRecord iterate();

    /// Loop of iterate() honoring stop_error / max_iterations.
    OptimizationResult optimize();

    const ControlField& fields() const { return fields_; }
    const std::vector<IterationRecord>& history() const { return history_; }
    const std::vector<TwoAtomState>& forward_trajectory(int b) const { return psi_traj_[b]; }
    const std::vector<TwoAtomState>& backward_trajectory(int b) const { return chi_traj_[b]; }
    const std::array<TwoAtomState, 4>& basis() const { return basis_; }

 private:
    void forward_pass(bool update_fields);
    void backward_pass();
    IterationRecord make_record(int iteration, const ControlField& ref) const;

    const Hamiltonian& h_;
    OptimizationConfig cfg_;
    SpectralBounds bounds_;
    ChebyshevCoeffs exp_fwd_, exp_bwd_, phi1_bwd_, phi2_bwd_;
    ControlField fields_, fields_prev_;
    std::array<TwoAtomState, 4> basis_;
    std::array<std::vector<TwoAtomState>, 4> psi_traj_;  // forward, every sample
    std::array<std::vector<TwoAtomState>, 4> chi_traj_;  // backward, every sample
    std::vector<double> shape_;                          // S(t_n)
    std::vector<IterationRecord> history_;
    int threads_ = 1;
};

/// Convenience wrapper: construct, optimize, return.
OptimizationResult krotov_optimize(const Hamiltonian& h, const ControlField& guess,
                                   const OptimizationConfig& cfg);

/// Propagate the register basis under the given controls with decay rates
/// gamma_i, gamma_r (1/ns) and return the lossy gate error 1 - F; norm loss
/// counts as error.
double evaluate_with_loss(const ControlField& fields, SystemParameters params,
                          const SpatialGrid& grid, double gamma_i, double gamma_r,
                          const GateTarget& target);

/// Non-local phase chi = phi00 - phi01 - phi10 + phi11 from the phases of
/// the diagonal register overlaps, wrapped to (-pi, pi]. Throws
/// std::domain_error when any overlap magnitude is below 1e-6.
double nonlocal_phase(const std::array<TwoAtomState, 4>& finals,
                      const std::array<TwoAtomState, 4>& basis, const SpatialGrid& grid);

/// Map angle to (-pi, pi].
double wrap_angle(double x);

}  // namespace rygate
