#pragma once

#include <stdexcept>
#include <string>

namespace rygate {

/// Numerical failure (divergent expansion, non-finite amplitudes, ...).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The optimizer observed an increase of the functional beyond tolerance;
/// signals an implementation bug or a too-coarse time step.
struct monotonicity_error : numeric_error {
    monotonicity_error(int iteration_, double previous_j, double current_j)
        : numeric_error("krotov: functional increased at iteration " + std::to_string(iteration_) +
                        " (J " + std::to_string(previous_j) + " -> " + std::to_string(current_j) +
                        ")"),
          iteration(iteration_) {}
    int iteration;
};

}  // namespace rygate
