#pragma once

#include <string>
#include <vector>

#include "cadence/nn/param_vector.hpp"

// Multilayer perceptron with manual forward/backward. Hidden layers share one
// activation; the output layer is linear. Parameters live in a ParamVector
// under "<prefix>.W<l>" (out x in, row-major) and "<prefix>.b<l>".

namespace cadence::nn {

enum class Activation { tanh, swish };

struct MlpSpec {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::vector<std::size_t> hidden;
    Activation activation = Activation::tanh;

    std::size_t layer_count() const { return hidden.size() + 1; }
    // Widths including input and output: [in, h..., out].
    std::vector<std::size_t> widths() const;
};

double activate(Activation a, double x);
// Derivative given the pre-activation value.
double activate_deriv(Activation a, double pre);

// Appends the MLP tensors to params.
void add_mlp_params(ParamVector& params, const std::string& prefix, const MlpSpec& spec);

// Xavier-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
void init_mlp_params(ParamVector& params, const std::string& prefix,
                     const MlpSpec& spec, Rng& rng);

// Resolved offsets into the flat vector; build once, reuse in hot loops.
struct MlpView {
    MlpSpec spec;
    std::vector<std::size_t> w_off, b_off;
    std::vector<std::size_t> width; // [in, h..., out]
    static MlpView make(const ParamVector& params, const std::string& prefix,
                        const MlpSpec& spec);
    std::size_t cache_size() const;
};

// Forward-pass scratch: layer inputs and pre-activations, reused across calls.
struct MlpCache {
    std::vector<double> buf;
};

// y = mlp(x). If cache is non-null it is filled for a later backward call.
// flat must be the ParamVector's flat storage.
void mlp_forward(const MlpView& view, VecView flat, VecView x, MutVecView y,
                 MlpCache* cache = nullptr);

// Accumulates d(loss)/d(params) into dflat (same length as flat) and writes
// d(loss)/dx into dx (may be empty to skip). cache must come from the
// matching forward call.
void mlp_backward(const MlpView& view, VecView flat, const MlpCache& cache,
                  VecView dy, MutVecView dflat, MutVecView dx);

// Spec-facing convenience: validates dimensions and returns the output.
std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                const std::string& prefix, VecView x);

} // namespace cadence::nn
