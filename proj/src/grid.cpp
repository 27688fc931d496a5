#include "rygate/grid.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "rygate/fft.hpp"
#include "rygate/units.hpp"

namespace rygate {

namespace {

/// Shared single-line plan cache keyed by transform length, so the pure
/// apply_kinetic entry point does not re-plan on every call.
const fft::Plan& cached_plan(int n) {
    static std::mutex mutex;
    static std::unordered_map<int, std::unique_ptr<fft::Plan>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<fft::Plan>(n, 1);
    return *slot;
}

}  // namespace

SpatialGrid build_grid(double r_min, double r_max, int n_r) {
    if (!(r_min < r_max)) throw std::invalid_argument("build_grid: r_min must be < r_max");
    if (n_r < 2) throw std::invalid_argument("build_grid: need at least 2 points");
    if (n_r % 2 != 0) throw std::invalid_argument("build_grid: n_r must be even");

    SpatialGrid g;
    g.r_min = r_min;
    g.r_max = r_max;
    g.n_r = n_r;
    g.dr = (r_max - r_min) / n_r;
    g.r.resize(n_r);
    g.k.resize(n_r);
    const double dk = 2.0 * units::pi / (n_r * g.dr);
    for (int j = 0; j < n_r; ++j) {
        g.r[j] = r_min + j * g.dr;
        g.k[j] = dk * (j <= n_r / 2 ? j : j - n_r);
    }
    return g;
}

Wavefunction1D apply_kinetic(const Wavefunction1D& psi, const SpatialGrid& grid, double mass) {
    if (static_cast<int>(psi.amp.size()) != grid.n_r)
        throw std::invalid_argument("apply_kinetic: psi size does not match grid");
    if (!(mass > 0.0)) throw std::invalid_argument("apply_kinetic: mass must be positive");

    Wavefunction1D out{psi.amp};
    const fft::Plan& plan = cached_plan(grid.n_r);
    plan.forward(out.amp.data());
    for (int j = 0; j < grid.n_r; ++j) out.amp[j] *= grid.k[j] * grid.k[j] / (2.0 * mass);
    plan.backward(out.amp.data());
    const double scale = 1.0 / grid.n_r;
    for (auto& a : out.amp) a *= scale;
    return out;
}

Wavefunction1D harmonic_ground_state(const SpatialGrid& grid, double omega, double mass,
                                     double r0) {
    if (!(omega > 0.0) || !(mass > 0.0))
        throw std::invalid_argument("harmonic_ground_state: omega and mass must be positive");
    if (r0 < grid.r_min || r0 >= grid.r_max)
        throw std::invalid_argument("harmonic_ground_state: r0 outside grid");

    const double spread = std::sqrt(0.5 / (mass * omega));
    if (spread > 0.1 * (grid.r_max - grid.r_min))
        std::fprintf(stderr,
                     "harmonic_ground_state: warning, ground-state spread %.3g um exceeds "
                     "10%% of the grid extent; tails will be truncated\n",
                     spread);

    Wavefunction1D psi;
    psi.amp.resize(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        const double x = grid.r[j] - r0;
        psi.amp[j] = std::exp(-0.5 * mass * omega * x * x);
    }
    const double n = norm(psi, grid);
    for (auto& a : psi.amp) a /= n;
    return psi;
}

double norm(const Wavefunction1D& psi, const SpatialGrid& grid) {
    double s = 0.0;
    for (const auto& a : psi.amp) s += std::norm(a);
    return std::sqrt(grid.dr * s);
}

std::complex<double> inner(const Wavefunction1D& a, const Wavefunction1D& b,
                           const SpatialGrid& grid) {
    if (a.amp.size() != b.amp.size())
        throw std::invalid_argument("inner: size mismatch");
    std::complex<double> s = 0.0;
    for (size_t j = 0; j < a.amp.size(); ++j) s += std::conj(a.amp[j]) * b.amp[j];
    return grid.dr * s;
}

}  // namespace rygate
