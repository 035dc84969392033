#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "evmarl/mlp.hpp"
#include "evmarl/optim.hpp"
#include "evmarl/rng.hpp"

namespace evmarl {
namespace {

Mlp scalar_net(double w) {
    Rng rng(0);
    Mlp net = init_mlp({1, 1}, Activation::identity, rng);
    net.layers[0].w.at(0, 0) = w;
    net.layers[0].b[0] = 0.0;
    return net;
}

TEST(Optim, AdamConfigValidation) {
    EXPECT_NO_THROW(AdamConfig{}.validate());
    AdamConfig bad;
    bad.lr = 0.0;
    EXPECT_THROW(bad.validate(), config_error);
    bad = AdamConfig{};
    bad.beta1 = 1.0;
    EXPECT_THROW(bad.validate(), config_error);
    bad = AdamConfig{};
    bad.eps = 0.0;
    EXPECT_THROW(bad.validate(), config_error);
}

TEST(Optim, ZeroGradIsNoOp) {
    Mlp net = scalar_net(0.7);
    OptimizerState opt = make_adam(net, AdamConfig{});
    Gradients g = make_gradients(net);
    apply_update(net, g, opt);
    EXPECT_DOUBLE_EQ(net.layers[0].w.at(0, 0), 0.7);
    EXPECT_DOUBLE_EQ(net.layers[0].b[0], 0.0);
    EXPECT_EQ(opt.step, 1);
}

TEST(Optim, FirstStepMovesByLearningRate) {
    // Bias-corrected Adam moves exactly lr * sign(g) on its first step.
    Mlp net = scalar_net(1.0);
    AdamConfig cfg;
    cfg.lr = 0.05;
    OptimizerState opt = make_adam(net, cfg);
    Gradients g = make_gradients(net);
    g.dw[0].at(0, 0) = 3.0;
    apply_update(net, g, opt);
    EXPECT_NEAR(net.layers[0].w.at(0, 0), 1.0 - 0.05, 1e-9);
}

TEST(Optim, DescendsQuadratic) {
    // Minimize (w - 2)^2 by feeding its gradient; Adam must converge.
    Mlp net = scalar_net(-1.0);
    AdamConfig cfg;
    cfg.lr = 0.05;
    OptimizerState opt = make_adam(net, cfg);
    Gradients g = make_gradients(net);
    for (int i = 0; i < 5000; ++i) {
        const double w = net.layers[0].w.at(0, 0);
        g.dw[0].at(0, 0) = 2.0 * (w - 2.0);
        g.db[0][0] = 0.0;
        apply_update(net, g, opt);
    }
    EXPECT_NEAR(net.layers[0].w.at(0, 0), 2.0, 0.01);
    EXPECT_EQ(opt.step, 5000u);
}

TEST(Optim, RejectsNonFiniteGrads) {
    Mlp net = scalar_net(1.0);
    OptimizerState opt = make_adam(net, AdamConfig{});
    Gradients g = make_gradients(net);
    g.dw[0].at(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(apply_update(net, g, opt), contract_error);
    // The parameters survive an aborted update untouched.
    EXPECT_DOUBLE_EQ(net.layers[0].w.at(0, 0), 1.0);
}

TEST(Optim, RejectsShapeMismatch) {
    Mlp net = scalar_net(1.0);
    OptimizerState opt = make_adam(net, AdamConfig{});
    Rng rng(1);
    Mlp other = init_mlp({2, 3, 1}, Activation::identity, rng);
    Gradients g = make_gradients(other);
    EXPECT_THROW(apply_update(net, g, opt), contract_error);
}

TEST(Optim, SoftUpdateInterpolates) {
    Mlp target = scalar_net(0.0);
    Mlp source = scalar_net(10.0);
    source.layers[0].b[0] = 4.0;

    Mlp t_half = target;
    soft_update(t_half, source, 0.5);
    EXPECT_DOUBLE_EQ(t_half.layers[0].w.at(0, 0), 5.0);
    EXPECT_DOUBLE_EQ(t_half.layers[0].b[0], 2.0);

    Mlp t_zero = target;
    soft_update(t_zero, source, 0.0);
    EXPECT_DOUBLE_EQ(t_zero.layers[0].w.at(0, 0), 0.0);

    Mlp t_one = target;
    soft_update(t_one, source, 1.0);
    EXPECT_DOUBLE_EQ(t_one.layers[0].w.at(0, 0), 10.0);

    EXPECT_THROW(soft_update(t_one, source, 1.5), contract_error);
    EXPECT_THROW(soft_update(t_one, source, -0.1), contract_error);
}

TEST(Optim, SoftUpdateRejectsShapeMismatch) {
    Mlp target = scalar_net(0.0);
    Rng rng(1);
    Mlp source = init_mlp({2, 2}, Activation::identity, rng);
    EXPECT_THROW(soft_update(target, source, 0.01), contract_error);
}

}  // namespace
}  // namespace evmarl
