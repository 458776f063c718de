#pragma once

#include <vector>

#include "cadence/common.hpp"

namespace cadence::nn {

// Exponentially averaged first/second moments with bias correction.
struct AdamState {
    std::vector<double> m, v;
    long step = 0;

    void resize(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
        step = 0;
    }
};

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One update in place. Returns false (params and state untouched, warning on
// stderr) when the gradient contains a non-finite entry.
bool optimizer_step(MutVecView params, VecView grad, AdamState& state, double lr,
                    const AdamConfig& cfg = {});

} // namespace cadence::nn
