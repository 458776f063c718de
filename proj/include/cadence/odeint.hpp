#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cadence/common.hpp"

// Deterministic initial-value-problem integration. Fixed-step classical RK4
// is the default everywhere (bit-stable training loops); embedded RK45 with
// per-step error control is opt-in. Backward integration (t_end < t_start)
// is supported; the probability-flow decode relies on it.

namespace cadence::ode {

// Right-hand side f(state, t) -> derivative, written into `deriv`.
// Must be deterministic and dimension-preserving.
using VectorField =
    std::function<void(VecView state, double t, MutVecView deriv)>;

// Any state component beyond this magnitude aborts the integration.
inline constexpr double kDivergenceThreshold = 1e12;

struct IntegrationSpec {
    double t_start = 0.0;
    double t_end = 1.0;
    // Fixed-step mode: total RK4 step count over [t_start, t_end].
    int step_count = 100;
    // Adaptive mode: when set, embedded RK45 with this error tolerance.
    std::optional<double> tolerance;
    // When nonempty, states are reported at these times (sorted, inside the
    // closed interval between t_start and t_end). Otherwise only at t_end.
    std::vector<double> dense_output_times;
};

struct TimeState {
    double t;
    std::vector<double> state;
};

// Integrates from (t_start, z0) and returns states at the dense output times
// (or t_end only). Dense output restarts the integrator at each requested
// time; no interpolation polynomial is used.
std::vector<TimeState> integrate(const VectorField& field, VecView z0,
                                 const IntegrationSpec& spec);

// Single classical RK4 step of size h from (t, z) into z_next. Scratch must
// hold 5 * dim doubles. No allocation; safe for hot loops.
void rk4_step(const VectorField& field, VecView z, double t, double h,
              MutVecView z_next, MutVecView scratch);

// Max-norm global error at t_end of a fixed-step RK4 run with `steps` steps,
// measured against a reference run with 32x the steps. Used by tests to
// confirm the h^4 convergence order.
double order_probe(const VectorField& field, VecView z0, double t_end, int steps);

} // namespace cadence::ode
