#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/matrix.hpp"
#include "evmarl/rng.hpp"

namespace evmarl {

enum class Activation { relu, sigmoid, identity };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::identity: return "identity";
    }
    return "?";
}

inline Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "identity") return Activation::identity;
    throw config_error("unknown activation: " + s);
}

// One affine layer. Weights are stored input-major (in x out) so a batch
// forward is a single row-major GEMM.
struct Layer {
    Matrix w;  // in x out
    std::vector<double> b;
    Activation act = Activation::identity;
};

struct Mlp {
    std::vector<int> layer_sizes;
    std::vector<Layer> layers;
    Activation output_activation = Activation::identity;

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.w.d.size() + l.b.size();
        return n;
    }

    bool all_finite() const {
        for (const auto& l : layers) {
            if (!l.w.all_finite()) return false;
            for (double v : l.b)
                if (!std::isfinite(v)) return false;
        }
        return true;
    }
};

// Uniform fan-in scaled init, biases zero. Draw order is fixed (layer, then
// row-major weights) so a seed pins the parameters exactly.
inline Mlp init_mlp(const std::vector<int>& layer_sizes, Activation output_activation,
                    Rng& rng) {
    if (layer_sizes.size() < 2)
        throw config_error("init_mlp: need at least input and output sizes");
    for (int s : layer_sizes)
        if (s < 1) throw config_error("init_mlp: layer sizes must be positive");

    Mlp net;
    net.layer_sizes = layer_sizes;
    net.output_activation = output_activation;
    const std::size_t n_layers = layer_sizes.size() - 1;
    net.layers.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Layer& layer = net.layers[l];
        layer.w.resize(fan_in, fan_out);
        for (double& v : layer.w.d) v = rng.uniform(-bound, bound);
        layer.b.assign(static_cast<std::size_t>(fan_out), 0.0);
        layer.act = (l + 1 == n_layers) ? output_activation : Activation::relu;
    }
    return net;
}

namespace detail {

inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline void activate_inplace(Matrix& z, Activation act) {
    switch (act) {
        case Activation::relu:
            for (double& v : z.d)
                if (v < 0) v = 0;
            break;
        case Activation::sigmoid:
            for (double& v : z.d) v = sigmoid(v);
            break;
        case Activation::identity:
            break;
    }
}

// Derivative of the activation, recovered from its own output. Works for
// all three activations and saves storing pre-activations.
inline double act_grad_from_output(double y, Activation act) {
    switch (act) {
        case Activation::relu: return y > 0 ? 1.0 : 0.0;
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::identity: return 1.0;
    }
    return 0.0;
}

}  // namespace detail

// Reverse-mode record of one batched forward pass: the input plus each
// layer's post-activation output. Scratch matrices live here so a reused
// tape allocates nothing after warm-up.
struct Tape {
    Matrix input;
    std::vector<Matrix> post;
    Matrix delta_front, delta_back;

    const Matrix& output() const { return post.back(); }
};

// Batched forward: x is batch x input_dim. Returns the output matrix owned
// by the tape.
inline const Matrix& forward(const Mlp& net, const Matrix& x, Tape& tape) {
    if (static_cast<int>(x.cols) != net.input_dim())
        throw contract_error("forward: input width " + std::to_string(x.cols) +
                             " != net input dim " + std::to_string(net.input_dim()));
    tape.input = x;
    tape.post.resize(net.layers.size());
    const Matrix* cur = &tape.input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        Matrix& out = tape.post[l];
        matmul_nn(out, *cur, layer.w);
        for (std::size_t r = 0; r < out.rows; ++r) {
            double* row = out.row(r);
            for (std::size_t c = 0; c < out.cols; ++c) row[c] += layer.b[c];
        }
        detail::activate_inplace(out, layer.act);
        cur = &out;
    }
    return *cur;
}

// Single-sample convenience wrapper.
inline std::vector<double> forward(const Mlp& net, const std::vector<double>& x) {
    Tape tape;
    Matrix m;
    m.resize(1, x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m.d[i] = x[i];
    const Matrix& out = forward(net, m, tape);
    return std::vector<double>(out.d.begin(), out.d.end());
}

struct Gradients {
    std::vector<Matrix> dw;
    std::vector<std::vector<double>> db;

    bool all_finite() const {
        for (const auto& m : dw)
            if (!m.all_finite()) return false;
        for (const auto& v : db)
            for (double x : v)
                if (!std::isfinite(x)) return false;
        return true;
    }
};

inline Gradients make_gradients(const Mlp& net) {
    Gradients g;
    g.dw.resize(net.layers.size());
    g.db.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        g.dw[l].resize(net.layers[l].w.rows, net.layers[l].w.cols);
        g.dw[l].fill(0.0);
        g.db[l].assign(net.layers[l].b.size(), 0.0);
    }
    return g;
}

namespace detail {

// Shared backward walk. Parameter gradients are SUMS over the batch; the
// caller folds any 1/B into grad_out. input_grad and grads are optional so
// the actor update can pull d(input) without paying for dW.
inline void backward_impl(const Mlp& net, Tape& tape, const Matrix& grad_out,
                          Gradients* grads, Matrix* input_grad) {
    const std::size_t n_layers = net.layers.size();
    if (tape.post.size() != n_layers)
        throw contract_error("backward: tape does not match net");
    if (grad_out.rows != tape.output().rows || grad_out.cols != tape.output().cols)
        throw contract_error("backward: output grad shape mismatch");

    Matrix* delta = &tape.delta_front;
    Matrix* delta_next = &tape.delta_back;
    *delta = grad_out;

    for (std::size_t li = n_layers; li-- > 0;) {
        const Layer& layer = net.layers[li];
        const Matrix& post = tape.post[li];
        // dZ = dPost * act'(post), in place on delta
        for (std::size_t i = 0; i < delta->d.size(); ++i)
            delta->d[i] *= act_grad_from_output(post.d[i], layer.act);

        const Matrix& below = (li == 0) ? tape.input : tape.post[li - 1];
        if (grads) {
            Matrix& dw = grads->dw[li];
            dw.fill(0.0);
            matmul_tn_accum(dw, below, *delta);  // dW = X^T dZ
            auto& db = grads->db[li];
            std::fill(db.begin(), db.end(), 0.0);
            for (std::size_t r = 0; r < delta->rows; ++r) {
                const double* row = delta->row(r);
                for (std::size_t c = 0; c < delta->cols; ++c) db[c] += row[c];
            }
        }
        const bool need_below_grad = (li > 0) || (input_grad != nullptr);
        if (need_below_grad) {
            matmul_nt(*delta_next, *delta, layer.w);  // dX = dZ W^T
            std::swap(delta, delta_next);
        }
    }
    if (input_grad) *input_grad = *delta;
}

}  // namespace detail

// Full backward: parameter gradients (summed over the batch) and, when
// requested, the gradient with respect to the input.
inline void backward(const Mlp& net, Tape& tape, const Matrix& grad_out,
                     Gradients& grads, Matrix* input_grad = nullptr) {
    detail::backward_impl(net, tape, grad_out, &grads, input_grad);
}

// Input gradient only; parameter gradients skipped. This is the critic-side
// half of the policy-gradient chain.
inline void backward_data(const Mlp& net, Tape& tape, const Matrix& grad_out,
                          Matrix& input_grad) {
    detail::backward_impl(net, tape, grad_out, nullptr, &input_grad);
}

}  // namespace evmarl
