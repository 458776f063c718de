#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "cadence/nn/mlp.hpp"
#include "cadence/nn/param_vector.hpp"

// Reverse-mode autodiff over vector-valued nodes. The op set is exactly what
// the training losses are built from: parameter slices, affine layers,
// activations, concatenation, vector arithmetic, temperature softmax, and
// scalar reductions. Big batch losses (stage 2) use the dedicated engines in
// dynamics/; the tape serves the generic grad() entry point, stage 1 training
// and the finite-difference cross-checks.

namespace cadence::nn::tape {

struct Var {
    int id = -1;
};

class Tape {
  public:
    explicit Tape(const ParamVector* params = nullptr);

    // Leaves.
    Var input(VecView v);
    Var constant(double c);
    Var param(const std::string& tensor_name); // tracked leaf over one tensor
    Var param_all();                           // tracked leaf over the flat vector

    // Vector ops.
    Var affine(Var W, Var b, Var x); // y = W x + b; W is a (out*in) leaf with known shape
    Var tanh_act(Var x);
    Var swish_act(Var x);
    Var concat(std::initializer_list<Var> parts);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double c);
    Var hadamard(Var a, Var b);
    Var softmax_tau(Var logits, double tau);
    Var mlp(const std::string& prefix, const MlpSpec& spec, Var x);

    // Scalar reductions (dim-1 vars).
    Var sum(Var a);
    Var sumsq(Var a);
    Var dot(Var a, Var b);

    VecView value(Var v) const;
    std::size_t dim(Var v) const;

    // Reverse sweep from a scalar loss. Fills param_grads().
    void backward(Var loss);
    const std::vector<double>& param_grads() const { return param_grads_; }
    VecView grad(Var v) const;

  private:
    enum class Op {
        input, constant, param, affine, tanh_act, swish_act, concat2, add, sub,
        scale, hadamard, softmax, sum, sumsq, dot
    };
    struct Node {
        Op op;
        int a = -1, b = -1, c = -1;
        double aux = 0.0;
        std::size_t val_off = 0, n = 0;
        std::size_t rows = 0, cols = 0;  // affine weight shape
        std::size_t param_off = 0;       // param leaf offset into flat vector
        bool tracked = false;
    };

    Var push(Node node, std::size_t n);
    Var concat2(Var a, Var b);
    double* val(int id) { return values_.data() + nodes_[id].val_off; }
    const double* val(int id) const { return values_.data() + nodes_[id].val_off; }
    double* grd(int id) { return grads_.data() + nodes_[id].val_off; }

    const ParamVector* params_;
    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<double> param_grads_;
};

// Gradient of a scalar expression built on a fresh tape bound to params.
// Returns a vector of the same length as params.
std::vector<double> grad(const ParamVector& params,
                         const std::function<Var(Tape&)>& loss_builder);

} // namespace cadence::nn::tape
