#include "cadence/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cadence::ode {

namespace {

bool state_ok(VecView z) {
    for (double x : z)
        if (!std::isfinite(x) || std::abs(x) > kDivergenceThreshold) return false;
    return true;
}

[[noreturn]] void throw_diverged(double last_valid_t) {
    char msg[96];
    std::snprintf(msg, sizeof(msg),
                  "integration diverged; last valid time %.9g", last_valid_t);
    throw DivergedError(msg, last_valid_t);
}

void check_spec(const IntegrationSpec& spec) {
    if (!spec.tolerance && spec.step_count <= 0)
        throw InvalidArgumentError("integration spec: step_count must be positive");
    if (spec.tolerance && *spec.tolerance <= 0.0)
        throw InvalidArgumentError("integration spec: tolerance must be positive");
    const double lo = std::min(spec.t_start, spec.t_end);
    const double hi = std::max(spec.t_start, spec.t_end);
    double prev = spec.t_start;
    for (double t : spec.dense_output_times) {
        if (t < lo || t > hi)
            throw InvalidArgumentError("dense output time outside integration interval");
        const bool forward = spec.t_end >= spec.t_start;
        if ((forward && t < prev) || (!forward && t > prev))
            throw InvalidArgumentError("dense output times must be sorted toward t_end");
        prev = t;
    }
}

// Fixed-step RK4 over [t0, t1] with n steps, in place.
void rk4_span(const VectorField& field, std::vector<double>& z, double t0,
              double t1, int n, std::vector<double>& scratch) {
    const double h = (t1 - t0) / n;
    std::vector<double> next(z.size());
    for (int i = 0; i < n; ++i) {
        const double t = t0 + i * h;
        rk4_step(field, z, t, h, next, scratch);
        if (!state_ok(next)) throw_diverged(t);
        z.swap(next);
    }
}

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Adaptive RK45 over [t0, t1] (t1 may be < t0), in place.
void rk45_span(const VectorField& field, std::vector<double>& z, double t0,
               double t1, double tol) {
    const std::size_t dim = z.size();
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    if (span == 0.0) return;

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim),
        k7(dim), tmp(dim), z5(dim);
    double t = t0;
    double h = dir * span / 16.0;
    bool first = true;
    int rejects_in_row = 0;

    field(z, t, k1);
    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        auto stage = [&](std::vector<double>& k, double frac,
                         std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
            for (std::size_t d = 0; d < dim; ++d) {
                double acc = 0.0;
                for (const auto& [c, kv] : terms) acc += c * (*kv)[d];
                tmp[d] = z[d] + h * acc;
            }
            field(tmp, t + frac * h, k);
        };
        stage(k2, 1.0 / 5, {{a21, &k1}});
        stage(k3, 3.0 / 10, {{a31, &k1}, {a32, &k2}});
        stage(k4, 4.0 / 5, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        stage(k5, 8.0 / 9, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        stage(k6, 1.0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        for (std::size_t d = 0; d < dim; ++d)
            z5[d] = z[d] + h * (b1 * k1[d] + b3 * k3[d] + b4 * k4[d] + b5 * k5[d] +
                                b6 * k6[d]);
        field(z5, t + h, k7); // FSAL

        double err = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double ed = h * (e1 * k1[d] + e3 * k3[d] + e4 * k4[d] +
                                   e5 * k5[d] + e6 * k6[d] + e7 * k7[d]);
            const double scale = tol + tol * std::max(std::abs(z[d]), std::abs(z5[d]));
            err = std::max(err, std::abs(ed) / scale);
        }

        if (!state_ok(z5)) {
            if (++rejects_in_row > 40) throw_diverged(t);
            h *= 0.25;
            continue;
        }
        if (err <= 1.0 || std::abs(h) <= span * 1e-14) {
            t += h;
            z = z5;
            k1 = k7;
            rejects_in_row = 0;
        } else {
            ++rejects_in_row;
            if (rejects_in_row > 60) throw_diverged(t);
        }
        double factor = 0.9 * std::pow(err > 1e-12 ? err : 1e-12, -0.2);
        factor = std::clamp(factor, 0.2, first ? 2.0 : 5.0);
        first = false;
        h *= factor;
    }
}

} // namespace

void rk4_step(const VectorField& field, VecView z, double t, double h,
              MutVecView z_next, MutVecView scratch) {
    const std::size_t dim = z.size();
    MutVecView k1 = scratch.subspan(0, dim);
    MutVecView k2 = scratch.subspan(dim, dim);
    MutVecView k3 = scratch.subspan(2 * dim, dim);
    MutVecView k4 = scratch.subspan(3 * dim, dim);
    MutVecView tmp = scratch.subspan(4 * dim, dim);

    field(z, t, k1);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = z[d] + 0.5 * h * k1[d];
    field(tmp, t + 0.5 * h, k2);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = z[d] + 0.5 * h * k2[d];
    field(tmp, t + 0.5 * h, k3);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = z[d] + h * k3[d];
    field(tmp, t + h, k4);
    for (std::size_t d = 0; d < dim; ++d)
        z_next[d] = z[d] + h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
}

std::vector<TimeState> integrate(const VectorField& field, VecView z0,
                                 const IntegrationSpec& spec) {
    if (!all_finite(z0)) throw InvalidArgumentError("integrate: z0 must be finite");
    check_spec(spec);

    std::vector<double> report_times = spec.dense_output_times;
    if (report_times.empty()) report_times.push_back(spec.t_end);

    const double total_span = std::abs(spec.t_end - spec.t_start);
    std::vector<double> z(z0.begin(), z0.end());
    std::vector<double> scratch(5 * z.size());
    std::vector<TimeState> out;
    out.reserve(report_times.size());

    double t = spec.t_start;
    for (double target : report_times) {
        const double seg = std::abs(target - t);
        if (seg > 0.0) {
            if (spec.tolerance) {
                rk45_span(field, z, t, target, *spec.tolerance);
            } else {
                // Steps proportional to segment length, at least one.
                int n = total_span > 0.0
                            ? static_cast<int>(std::llround(spec.step_count * seg / total_span))
                            : spec.step_count;
                n = std::max(n, 1);
                rk4_span(field, z, t, target, n, scratch);
            }
        }
        t = target;
        out.push_back({target, z});
    }
    return out;
}

double order_probe(const VectorField& field, VecView z0, double t_end, int steps) {
    IntegrationSpec coarse{0.0, t_end, steps, std::nullopt, {}};
    IntegrationSpec fine{0.0, t_end, steps * 32, std::nullopt, {}};
    const auto a = integrate(field, z0, coarse);
    const auto b = integrate(field, z0, fine);
    double err = 0.0;
    for (std::size_t d = 0; d < z0.size(); ++d)
        err = std::max(err, std::abs(a.back().state[d] - b.back().state[d]));
    return err;
}

} // namespace cadence::ode
