#pragma once

#include <vector>

#include "cadence/nn/param_vector.hpp"

namespace cadence::nn {

// Temperature softmax with max-subtraction. Entries positive, sum to 1.
std::vector<double> softmax_tau(VecView logits, double tau);
void softmax_tau_inplace(VecView logits, double tau, MutVecView out);

// d(loss)/d(logits) given alpha = softmax_tau(logits, tau) and d(loss)/dalpha.
void softmax_tau_backward(VecView alpha, VecView dalpha, double tau, MutVecView dlogits);

// Shannon entropy -sum p ln p (natural log).
double entropy(VecView p);

// ---------------------------------------------------------------------------
// FiLM: gamma(w) (*) features + beta(w) with affine heads
//   gamma(w) = G w + g0,  beta(w) = B w + b0.
// Tensors: "<prefix>.G" (feat x d), "<prefix>.g0" (feat), "<prefix>.B", "<prefix>.b0".
// ---------------------------------------------------------------------------

struct FilmView {
    std::size_t feat_dim = 0, w_dim = 0;
    std::size_t G_off = 0, g0_off = 0, B_off = 0, b0_off = 0;
    static FilmView make(const ParamVector& params, const std::string& prefix);
};

void add_film_params(ParamVector& params, const std::string& prefix,
                     std::size_t feat_dim, std::size_t w_dim);

// gamma/beta for one conditioning vector w; hoist per trajectory.
void film_heads(const FilmView& v, VecView flat, VecView w, MutVecView gamma,
                MutVecView beta);

// out = gamma (*) features + beta
void film_apply(VecView features, VecView gamma, VecView beta, MutVecView out);

// Backward of film_apply: accumulates into dfeatures, dgamma, dbeta.
void film_apply_backward(VecView features, VecView gamma, VecView dout,
                         MutVecView dfeatures, MutVecView dgamma, MutVecView dbeta);

// Backward of the affine heads: given accumulated dgamma/dbeta, add gradients
// for G, g0, B, b0 into dflat and d(loss)/dw into dw.
void film_heads_backward(const FilmView& v, VecView flat, VecView w,
                         VecView dgamma, VecView dbeta, MutVecView dflat,
                         MutVecView dw);

// Spec-facing convenience: computes gamma(w) (*) features + beta(w).
std::vector<double> film(VecView features, VecView w, const ParamVector& film_params,
                         const std::string& prefix = "film");

} // namespace cadence::nn
