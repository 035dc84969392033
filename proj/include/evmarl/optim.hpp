#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/mlp.hpp"

namespace evmarl {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const {
        if (!(lr > 0)) throw config_error("adam: lr must be > 0");
        if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
            throw config_error("adam: moment decays must lie in [0,1)");
        if (!(eps > 0)) throw config_error("adam: eps must be > 0");
    }
};

// Adaptive-moment state, shape-congruent with one Mlp.
struct OptimizerState {
    AdamConfig cfg;
    std::uint64_t step = 0;
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
};

inline OptimizerState make_adam(const Mlp& net, AdamConfig cfg) {
    cfg.validate();
    OptimizerState s;
    s.cfg = cfg;
    s.m_w.resize(net.layers.size());
    s.v_w.resize(net.layers.size());
    s.m_b.resize(net.layers.size());
    s.v_b.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        s.m_w[l].resize(net.layers[l].w.rows, net.layers[l].w.cols);
        s.v_w[l].resize(net.layers[l].w.rows, net.layers[l].w.cols);
        s.m_b[l].assign(net.layers[l].b.size(), 0.0);
        s.v_b[l].assign(net.layers[l].b.size(), 0.0);
    }
    return s;
}

namespace detail {

inline void adam_step(double* p, const double* g, double* m, double* v,
                      std::size_t n, const AdamConfig& cfg, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

}  // namespace detail

// One descent step. Ascent callers negate their gradients first.
inline void apply_update(Mlp& net, const Gradients& grads, OptimizerState& opt) {
    if (grads.dw.size() != net.layers.size())
        throw contract_error("apply_update: gradient/net layer count mismatch");
    if (!grads.all_finite())
        throw contract_error("apply_update: non-finite gradients");
    opt.step += 1;
    const double bc1 = 1.0 - std::pow(opt.cfg.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.cfg.beta2, static_cast<double>(opt.step));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        if (grads.dw[l].rows != layer.w.rows || grads.dw[l].cols != layer.w.cols ||
            grads.db[l].size() != layer.b.size())
            throw contract_error("apply_update: gradient shape mismatch");
        detail::adam_step(layer.w.d.data(), grads.dw[l].d.data(), opt.m_w[l].d.data(),
                          opt.v_w[l].d.data(), layer.w.d.size(), opt.cfg, bc1, bc2);
        detail::adam_step(layer.b.data(), grads.db[l].data(), opt.m_b[l].data(),
                          opt.v_b[l].data(), layer.b.size(), opt.cfg, bc1, bc2);
    }
}

// target <- tau * source + (1 - tau) * target
inline void soft_update(Mlp& target, const Mlp& source, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw contract_error("soft_update: tau outside [0,1]");
    if (target.layer_sizes != source.layer_sizes)
        throw contract_error("soft_update: shape mismatch");
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        auto& tw = target.layers[l].w.d;
        const auto& sw = source.layers[l].w.d;
        for (std::size_t i = 0; i < tw.size(); ++i)
            tw[i] = tau * sw[i] + (1.0 - tau) * tw[i];
        auto& tb = target.layers[l].b;
        const auto& sb = source.layers[l].b;
        for (std::size_t i = 0; i < tb.size(); ++i)
            tb[i] = tau * sb[i] + (1.0 - tau) * tb[i];
    }
}

}  // namespace evmarl
