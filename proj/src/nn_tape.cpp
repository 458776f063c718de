#include "cadence/nn/tape.hpp"

#include <cmath>

#include "cadence/nn/ops.hpp"

namespace cadence::nn::tape {

Tape::Tape(const ParamVector* params) : params_(params) {
    if (params_) param_grads_.assign(params_->size(), 0.0);
}

Var Tape::push(Node node, std::size_t n) {
    node.val_off = values_.size();
    node.n = n;
    values_.resize(values_.size() + n, 0.0);
    nodes_.push_back(node);
    return Var{static_cast<int>(nodes_.size()) - 1};
}

VecView Tape::value(Var v) const { return {val(v.id), nodes_[v.id].n}; }
std::size_t Tape::dim(Var v) const { return nodes_[v.id].n; }
VecView Tape::grad(Var v) const {
    return {grads_.data() + nodes_[v.id].val_off, nodes_[v.id].n};
}

Var Tape::input(VecView v) {
    Var out = push({Op::input}, v.size());
    std::copy(v.begin(), v.end(), val(out.id));
    return out;
}

Var Tape::constant(double c) {
    Var out = push({Op::constant}, 1);
    *val(out.id) = c;
    return out;
}

Var Tape::param(const std::string& tensor_name) {
    if (!params_) throw InvalidArgumentError("tape: no ParamVector bound");
    const auto& t = params_->tensor(tensor_name);
    Node n{Op::param};
    n.param_off = t.offset;
    n.tracked = true;
    if (t.shape.size() == 2) {
        n.rows = t.shape[0];
        n.cols = t.shape[1];
    }
    Var out = push(n, t.size);
    auto src = params_->view(t);
    std::copy(src.begin(), src.end(), val(out.id));
    return out;
}

Var Tape::param_all() {
    if (!params_) throw InvalidArgumentError("tape: no ParamVector bound");
    Node n{Op::param};
    n.param_off = 0;
    n.tracked = true;
    Var out = push(n, params_->size());
    auto src = params_->flat();
    std::copy(src.begin(), src.end(), val(out.id));
    return out;
}

Var Tape::affine(Var W, Var b, Var x) {
    const Node& wn = nodes_[W.id];
    if (wn.rows == 0 || wn.rows * wn.cols != wn.n)
        throw DimensionError("affine: W must be a matrix-shaped leaf");
    if (dim(x) != wn.cols || dim(b) != wn.rows)
        throw DimensionError("affine: dimension mismatch");
    Node n{Op::affine};
    n.a = W.id;
    n.b = b.id;
    n.c = x.id;
    Var out = push(n, wn.rows);
    const double* Wv = val(W.id);
    const double* bv = val(b.id);
    const double* xv = val(x.id);
    double* y = val(out.id);
    for (std::size_t i = 0; i < wn.rows; ++i) {
        double acc = bv[i];
        const double* row = Wv + i * wn.cols;
        for (std::size_t j = 0; j < wn.cols; ++j) acc += row[j] * xv[j];
        y[i] = acc;
    }
    return out;
}

Var Tape::tanh_act(Var x) {
    Node n{Op::tanh_act};
    n.a = x.id;
    Var out = push(n, dim(x));
    const double* xv = val(x.id);
    double* y = val(out.id);
    for (std::size_t i = 0; i < dim(x); ++i) y[i] = std::tanh(xv[i]);
    return out;
}

Var Tape::swish_act(Var x) {
    Node n{Op::swish_act};
    n.a = x.id;
    Var out = push(n, dim(x));
    const double* xv = val(x.id);
    double* y = val(out.id);
    for (std::size_t i = 0; i < dim(x); ++i) y[i] = xv[i] / (1.0 + std::exp(-xv[i]));
    return out;
}

Var Tape::concat2(Var a, Var b) {
    Node n{Op::concat2};
    n.a = a.id;
    n.b = b.id;
    Var out = push(n, dim(a) + dim(b));
    double* y = val(out.id);
    std::copy(val(a.id), val(a.id) + dim(a), y);
    std::copy(val(b.id), val(b.id) + dim(b), y + dim(a));
    return out;
}

Var Tape::concat(std::initializer_list<Var> parts) {
    Var acc{-1};
    for (Var p : parts) acc = acc.id < 0 ? p : concat2(acc, p);
    if (acc.id < 0) throw InvalidArgumentError("concat: empty list");
    return acc;
}

Var Tape::add(Var a, Var b) {
    if (dim(a) != dim(b)) throw DimensionError("add: dimension mismatch");
    Node n{Op::add};
    n.a = a.id;
    n.b = b.id;
    Var out = push(n, dim(a));
    for (std::size_t i = 0; i < dim(a); ++i) val(out.id)[i] = val(a.id)[i] + val(b.id)[i];
    return out;
}

Var Tape::sub(Var a, Var b) {
    if (dim(a) != dim(b)) throw DimensionError("sub: dimension mismatch");
    Node n{Op::sub};
    n.a = a.id;
    n.b = b.id;
    Var out = push(n, dim(a));
    for (std::size_t i = 0; i < dim(a); ++i) val(out.id)[i] = val(a.id)[i] - val(b.id)[i];
    return out;
}

Var Tape::scale(Var a, double c) {
    Node n{Op::scale};
    n.a = a.id;
    n.aux = c;
    Var out = push(n, dim(a));
    for (std::size_t i = 0; i < dim(a); ++i) val(out.id)[i] = c * val(a.id)[i];
    return out;
}

Var Tape::hadamard(Var a, Var b) {
    if (dim(a) != dim(b)) throw DimensionError("hadamard: dimension mismatch");
    Node n{Op::hadamard};
    n.a = a.id;
    n.b = b.id;
    Var out = push(n, dim(a));
    for (std::size_t i = 0; i < dim(a); ++i) val(out.id)[i] = val(a.id)[i] * val(b.id)[i];
    return out;
}

Var Tape::softmax_tau(Var logits, double tau) {
    Node n{Op::softmax};
    n.a = logits.id;
    n.aux = tau;
    Var out = push(n, dim(logits));
    nn::softmax_tau_inplace(value(logits), tau, {val(out.id), dim(logits)});
    return out;
}

Var Tape::mlp(const std::string& prefix, const MlpSpec& spec, Var x) {
    const auto widths = spec.widths();
    Var h = x;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Var W = param(prefix + ".W" + std::to_string(l));
        Var b = param(prefix + ".b" + std::to_string(l));
        h = affine(W, b, h);
        if (l + 2 < widths.size())
            h = spec.activation == Activation::tanh ? tanh_act(h) : swish_act(h);
    }
    return h;
}

Var Tape::sum(Var a) {
    Node n{Op::sum};
    n.a = a.id;
    Var out = push(n, 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim(a); ++i) acc += val(a.id)[i];
    *val(out.id) = acc;
    return out;
}

Var Tape::sumsq(Var a) {
    Node n{Op::sumsq};
    n.a = a.id;
    Var out = push(n, 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim(a); ++i) acc += val(a.id)[i] * val(a.id)[i];
    *val(out.id) = acc;
    return out;
}

Var Tape::dot(Var a, Var b) {
    if (dim(a) != dim(b)) throw DimensionError("dot: dimension mismatch");
    Node n{Op::dot};
    n.a = a.id;
    n.b = b.id;
    Var out = push(n, 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim(a); ++i) acc += val(a.id)[i] * val(b.id)[i];
    *val(out.id) = acc;
    return out;
}

void Tape::backward(Var loss) {
    if (dim(loss) != 1) throw InvalidArgumentError("backward: loss must be scalar");
    if (!std::isfinite(*val(loss.id)))
        throw Error("gradient unavailable: loss is non-finite");
    grads_.assign(values_.size(), 0.0);
    grads_[nodes_[loss.id].val_off] = 1.0;

    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
        const Node& n = nodes_[id];
        const double* g = grd(id);
        switch (n.op) {
            case Op::input:
            case Op::constant:
                break;
            case Op::param:
                for (std::size_t i = 0; i < n.n; ++i)
                    param_grads_[n.param_off + i] += g[i];
                break;
            case Op::affine: {
                const Node& wn = nodes_[n.a];
                const double* Wv = val(n.a);
                const double* xv = val(n.c);
                double* dW = grd(n.a);
                double* db = grd(n.b);
                double* dx = grd(n.c);
                for (std::size_t i = 0; i < wn.rows; ++i) {
                    const double gi = g[i];
                    db[i] += gi;
                    const double* row = Wv + i * wn.cols;
                    double* drow = dW + i * wn.cols;
                    for (std::size_t j = 0; j < wn.cols; ++j) {
                        drow[j] += gi * xv[j];
                        dx[j] += gi * row[j];
                    }
                }
                break;
            }
            case Op::tanh_act: {
                const double* y = val(id);
                double* dx = grd(n.a);
                for (std::size_t i = 0; i < n.n; ++i) dx[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case Op::swish_act: {
                const double* x = val(n.a);
                double* dx = grd(n.a);
                for (std::size_t i = 0; i < n.n; ++i)
                    dx[i] += g[i] * activate_deriv(Activation::swish, x[i]);
                break;
            }
            case Op::concat2: {
                const std::size_t na = nodes_[n.a].n;
                double* da = grd(n.a);
                double* db = grd(n.b);
                for (std::size_t i = 0; i < na; ++i) da[i] += g[i];
                for (std::size_t i = 0; i < n.n - na; ++i) db[i] += g[na + i];
                break;
            }
            case Op::add:
                for (std::size_t i = 0; i < n.n; ++i) {
                    grd(n.a)[i] += g[i];
                    grd(n.b)[i] += g[i];
                }
                break;
            case Op::sub:
                for (std::size_t i = 0; i < n.n; ++i) {
                    grd(n.a)[i] += g[i];
                    grd(n.b)[i] -= g[i];
                }
                break;
            case Op::scale:
                for (std::size_t i = 0; i < n.n; ++i) grd(n.a)[i] += n.aux * g[i];
                break;
            case Op::hadamard:
                for (std::size_t i = 0; i < n.n; ++i) {
                    grd(n.a)[i] += g[i] * val(n.b)[i];
                    grd(n.b)[i] += g[i] * val(n.a)[i];
                }
                break;
            case Op::softmax: {
                VecView alpha{val(id), n.n};
                VecView dalpha{g, n.n};
                softmax_tau_backward(alpha, dalpha, n.aux, {grd(n.a), n.n});
                break;
            }
            case Op::sum:
                for (std::size_t i = 0; i < nodes_[n.a].n; ++i) grd(n.a)[i] += g[0];
                break;
            case Op::sumsq:
                for (std::size_t i = 0; i < nodes_[n.a].n; ++i)
                    grd(n.a)[i] += 2.0 * g[0] * val(n.a)[i];
                break;
            case Op::dot:
                for (std::size_t i = 0; i < nodes_[n.a].n; ++i) {
                    grd(n.a)[i] += g[0] * val(n.b)[i];
                    grd(n.b)[i] += g[0] * val(n.a)[i];
                }
                break;
        }
    }
}

std::vector<double> grad(const ParamVector& params,
                         const std::function<Var(Tape&)>& loss_builder) {
    Tape t(&params);
    Var loss = loss_builder(t);
    t.backward(loss);
    return t.param_grads();
}

} // namespace cadence::nn::tape
