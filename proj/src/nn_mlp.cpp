#include "cadence/nn/mlp.hpp"

#include <cmath>
#include <cstdio>

namespace cadence::nn {

std::vector<std::size_t> MlpSpec::widths() const {
    std::vector<std::size_t> w;
    w.reserve(hidden.size() + 2);
    w.push_back(input_dim);
    for (auto h : hidden) w.push_back(h);
    w.push_back(output_dim);
    return w;
}

double activate(Activation a, double x) {
    switch (a) {
        case Activation::tanh: return std::tanh(x);
        case Activation::swish: return x / (1.0 + std::exp(-x));
    }
    return 0.0;
}

double activate_deriv(Activation a, double pre) {
    switch (a) {
        case Activation::tanh: {
            const double y = std::tanh(pre);
            return 1.0 - y * y;
        }
        case Activation::swish: {
            const double s = 1.0 / (1.0 + std::exp(-pre));
            return s * (1.0 + pre * (1.0 - s));
        }
    }
    return 0.0;
}

void add_mlp_params(ParamVector& params, const std::string& prefix, const MlpSpec& spec) {
    if (spec.input_dim == 0 || spec.output_dim == 0)
        throw InvalidArgumentError("mlp spec: dims must be positive");
    for (auto h : spec.hidden)
        if (h == 0) throw InvalidArgumentError("mlp spec: hidden widths must be positive");
    const auto w = spec.widths();
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        params.add(prefix + ".W" + std::to_string(l), {w[l + 1], w[l]});
        params.add(prefix + ".b" + std::to_string(l), {w[l + 1]});
    }
}

void init_mlp_params(ParamVector& params, const std::string& prefix,
                     const MlpSpec& spec, Rng& rng) {
    const auto w = spec.widths();
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        auto W = params.view(prefix + ".W" + std::to_string(l));
        const double bound = std::sqrt(6.0 / static_cast<double>(w[l] + w[l + 1]));
        for (auto& x : W) x = rng.uniform(-bound, bound);
        auto b = params.view(prefix + ".b" + std::to_string(l));
        for (auto& x : b) x = 0.0;
    }
}

MlpView MlpView::make(const ParamVector& params, const std::string& prefix,
                      const MlpSpec& spec) {
    MlpView v;
    v.spec = spec;
    v.width = spec.widths();
    for (std::size_t l = 0; l + 1 < v.width.size(); ++l) {
        const auto& tw = params.tensor(prefix + ".W" + std::to_string(l));
        const auto& tb = params.tensor(prefix + ".b" + std::to_string(l));
        if (tw.shape.size() != 2 || tw.shape[0] != v.width[l + 1] || tw.shape[1] != v.width[l]) {
            char msg[128];
            std::snprintf(msg, sizeof(msg),
                          "mlp layer %zu: params tensor %s does not match spec (%zux%zu)",
                          l, tw.name.c_str(), v.width[l + 1], v.width[l]);
            throw DimensionError(msg);
        }
        v.w_off.push_back(tw.offset);
        v.b_off.push_back(tb.offset);
    }
    return v;
}

std::size_t MlpView::cache_size() const {
    // Input copy plus one pre-activation vector per layer.
    std::size_t n = width[0];
    for (std::size_t l = 1; l < width.size(); ++l) n += width[l];
    return n;
}

void mlp_forward(const MlpView& view, VecView flat, VecView x, MutVecView y,
                 MlpCache* cache) {
    const auto& w = view.width;
    if (x.size() != w[0]) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "mlp layer 0: input has %zu entries, expected %zu",
                      x.size(), w[0]);
        throw DimensionError(msg);
    }
    const std::size_t layers = w.size() - 1;
    if (cache) cache->buf.resize(view.cache_size());

    // act holds the current layer input; pre the pre-activations.
    std::vector<double> act(x.begin(), x.end());
    std::vector<double> pre;
    std::size_t coff = 0;
    if (cache) {
        std::copy(x.begin(), x.end(), cache->buf.begin());
        coff = x.size();
    }
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = w[l], out = w[l + 1];
        const double* W = flat.data() + view.w_off[l];
        const double* b = flat.data() + view.b_off[l];
        pre.assign(out, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
            double acc = b[i];
            const double* row = W + i * in;
            for (std::size_t j = 0; j < in; ++j) acc += row[j] * act[j];
            pre[i] = acc;
        }
        if (cache) {
            std::copy(pre.begin(), pre.end(), cache->buf.begin() + coff);
            coff += out;
        }
        if (l + 1 == layers) {
            act = pre; // output layer is linear
        } else {
            act.resize(out);
            for (std::size_t i = 0; i < out; ++i) act[i] = activate(view.spec.activation, pre[i]);
        }
    }
    if (y.size() != act.size()) throw DimensionError("mlp output size mismatch");
    std::copy(act.begin(), act.end(), y.begin());
}

void mlp_backward(const MlpView& view, VecView flat, const MlpCache& cache,
                  VecView dy, MutVecView dflat, MutVecView dx) {
    const auto& w = view.width;
    const std::size_t layers = w.size() - 1;

    // Offsets of each layer's pre-activations inside the cache.
    std::vector<std::size_t> pre_off(layers);
    std::size_t off = w[0];
    for (std::size_t l = 0; l < layers; ++l) {
        pre_off[l] = off;
        off += w[l + 1];
    }

    // delta = dL/d(pre-activation of current layer), starting at the output.
    std::vector<double> delta(dy.begin(), dy.end());
    std::vector<double> prev;
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in = w[l], out = w[l + 1];
        const double* W = flat.data() + view.w_off[l];

        // Layer input activations: raw input for l == 0, activation of the
        // previous layer's pre-activations otherwise.
        prev.resize(in);
        if (l == 0) {
            for (std::size_t j = 0; j < in; ++j) prev[j] = cache.buf[j];
        } else {
            const double* p = cache.buf.data() + pre_off[l - 1];
            for (std::size_t j = 0; j < in; ++j) prev[j] = activate(view.spec.activation, p[j]);
        }

        double* dW = dflat.data() + view.w_off[l];
        double* db = dflat.data() + view.b_off[l];
        for (std::size_t i = 0; i < out; ++i) {
            const double d = delta[i];
            db[i] += d;
            double* row = dW + i * in;
            for (std::size_t j = 0; j < in; ++j) row[j] += d * prev[j];
        }

        // dL/d(input activations) = W^T delta.
        std::vector<double> din(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
            const double d = delta[i];
            const double* row = W + i * in;
            for (std::size_t j = 0; j < in; ++j) din[j] += row[j] * d;
        }
        if (l == 0) {
            if (!dx.empty())
                for (std::size_t j = 0; j < in; ++j) dx[j] += din[j];
        } else {
            const double* p = cache.buf.data() + pre_off[l - 1];
            delta.resize(in);
            for (std::size_t j = 0; j < in; ++j)
                delta[j] = din[j] * activate_deriv(view.spec.activation, p[j]);
        }
    }
}

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                const std::string& prefix, VecView x) {
    const auto view = MlpView::make(params, prefix, spec);
    std::vector<double> y(spec.output_dim);
    mlp_forward(view, params.flat(), x, y);
    return y;
}

} // namespace cadence::nn
