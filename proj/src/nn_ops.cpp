#include "cadence/nn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace cadence::nn {

void softmax_tau_inplace(VecView logits, double tau, MutVecView out) {
    if (tau <= 0.0) throw InvalidArgumentError("softmax_tau: temperature must be positive");
    if (logits.empty()) throw InvalidArgumentError("softmax_tau: empty logits");
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp((logits[i] - m) / tau);
        sum += out[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= sum;
}

std::vector<double> softmax_tau(VecView logits, double tau) {
    std::vector<double> out(logits.size());
    softmax_tau_inplace(logits, tau, out);
    return out;
}

void softmax_tau_backward(VecView alpha, VecView dalpha, double tau, MutVecView dlogits) {
    double inner = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) inner += dalpha[i] * alpha[i];
    for (std::size_t i = 0; i < alpha.size(); ++i)
        dlogits[i] += alpha[i] * (dalpha[i] - inner) / tau;
}

double entropy(VecView p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

void add_film_params(ParamVector& params, const std::string& prefix,
                     std::size_t feat_dim, std::size_t w_dim) {
    params.add(prefix + ".G", {feat_dim, w_dim});
    params.add(prefix + ".g0", {feat_dim});
    params.add(prefix + ".B", {feat_dim, w_dim});
    params.add(prefix + ".b0", {feat_dim});
}

FilmView FilmView::make(const ParamVector& params, const std::string& prefix) {
    FilmView v;
    const auto& G = params.tensor(prefix + ".G");
    if (G.shape.size() != 2) throw DimensionError("film: G must be a matrix");
    v.feat_dim = G.shape[0];
    v.w_dim = G.shape[1];
    v.G_off = G.offset;
    v.g0_off = params.tensor(prefix + ".g0").offset;
    v.B_off = params.tensor(prefix + ".B").offset;
    v.b0_off = params.tensor(prefix + ".b0").offset;
    return v;
}

void film_heads(const FilmView& v, VecView flat, VecView w, MutVecView gamma,
                MutVecView beta) {
    if (w.size() != v.w_dim) throw DimensionError("film: conditioning vector dimension mismatch");
    const double* G = flat.data() + v.G_off;
    const double* g0 = flat.data() + v.g0_off;
    const double* B = flat.data() + v.B_off;
    const double* b0 = flat.data() + v.b0_off;
    for (std::size_t i = 0; i < v.feat_dim; ++i) {
        double g = g0[i], b = b0[i];
        const double* gr = G + i * v.w_dim;
        const double* br = B + i * v.w_dim;
        for (std::size_t j = 0; j < v.w_dim; ++j) {
            g += gr[j] * w[j];
            b += br[j] * w[j];
        }
        gamma[i] = g;
        beta[i] = b;
    }
}

void film_apply(VecView features, VecView gamma, VecView beta, MutVecView out) {
    if (features.size() != gamma.size() || features.size() != beta.size())
        throw DimensionError("film: feature/modulation dimension mismatch");
    for (std::size_t i = 0; i < features.size(); ++i)
        out[i] = gamma[i] * features[i] + beta[i];
}

void film_apply_backward(VecView features, VecView gamma, VecView dout,
                         MutVecView dfeatures, MutVecView dgamma, MutVecView dbeta) {
    for (std::size_t i = 0; i < features.size(); ++i) {
        dfeatures[i] += gamma[i] * dout[i];
        dgamma[i] += features[i] * dout[i];
        dbeta[i] += dout[i];
    }
}

void film_heads_backward(const FilmView& v, VecView flat, VecView w,
                         VecView dgamma, VecView dbeta, MutVecView dflat,
                         MutVecView dw) {
    const double* G = flat.data() + v.G_off;
    const double* B = flat.data() + v.B_off;
    double* dG = dflat.data() + v.G_off;
    double* dg0 = dflat.data() + v.g0_off;
    double* dB = dflat.data() + v.B_off;
    double* db0 = dflat.data() + v.b0_off;
    for (std::size_t i = 0; i < v.feat_dim; ++i) {
        const double dg = dgamma[i], db = dbeta[i];
        dg0[i] += dg;
        db0[i] += db;
        double* dgr = dG + i * v.w_dim;
        double* dbr = dB + i * v.w_dim;
        const double* gr = G + i * v.w_dim;
        const double* br = B + i * v.w_dim;
        for (std::size_t j = 0; j < v.w_dim; ++j) {
            dgr[j] += dg * w[j];
            dbr[j] += db * w[j];
            dw[j] += gr[j] * dg + br[j] * db;
        }
    }
}

std::vector<double> film(VecView features, VecView w, const ParamVector& film_params,
                         const std::string& prefix) {
    const auto v = FilmView::make(film_params, prefix);
    if (features.size() != v.feat_dim)
        throw DimensionError("film: feature dimension does not match heads");
    std::vector<double> gamma(v.feat_dim), beta(v.feat_dim), out(v.feat_dim);
    film_heads(v, film_params.flat(), w, gamma, beta);
    film_apply(features, gamma, beta, out);
    return out;
}

} // namespace cadence::nn
