#include "cadence/nn/adam.hpp"

#include <cmath>
#include <cstdio>

namespace cadence::nn {

bool optimizer_step(MutVecView params, VecView grad, AdamState& state, double lr,
                    const AdamConfig& cfg) {
    if (params.size() != grad.size())
        throw DimensionError("optimizer_step: gradient length mismatch");
    if (state.m.size() != params.size()) state.resize(params.size());
    if (lr <= 0.0) throw InvalidArgumentError("optimizer_step: lr must be positive");

    for (double g : grad) {
        if (!std::isfinite(g)) {
            std::fprintf(stderr,
                         "[optimizer_step] warning: non-finite gradient, step rejected\n");
            return false;
        }
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    return true;
}

} // namespace cadence::nn
