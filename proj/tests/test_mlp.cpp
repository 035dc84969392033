#include <gtest/gtest.h>

#include <cmath>

#include "evmarl/mlp.hpp"
#include "evmarl/rng.hpp"
#include "fd_check.hpp"

namespace evmarl {
namespace {

Mlp linear_1x1(double w, double b) {
    Rng rng(0);
    Mlp net = init_mlp({1, 1}, Activation::identity, rng);
    net.layers[0].w.at(0, 0) = w;
    net.layers[0].b[0] = b;
    return net;
}

TEST(Mlp, InitShapesAndBounds) {
    Rng rng(1);
    const Mlp net = init_mlp({5, 64, 64, 1}, Activation::sigmoid, rng);
    ASSERT_EQ(net.layers.size(), 3u);
    EXPECT_EQ(net.input_dim(), 5);
    EXPECT_EQ(net.output_dim(), 1);
    EXPECT_EQ(net.param_count(), 5u * 64 + 64 + 64u * 64 + 64 + 64u * 1 + 1);
    EXPECT_EQ(net.layers[0].act, Activation::relu);
    EXPECT_EQ(net.layers[1].act, Activation::relu);
    EXPECT_EQ(net.layers[2].act, Activation::sigmoid);
    const double bounds[] = {1.0 / std::sqrt(5.0), 1.0 / 8.0, 1.0 / 8.0};
    for (std::size_t l = 0; l < 3; ++l) {
        for (double v : net.layers[l].w.d) EXPECT_LE(std::abs(v), bounds[l]);
        for (double v : net.layers[l].b) EXPECT_EQ(v, 0.0);
    }
}

TEST(Mlp, InitDeterministicPerSeed) {
    Rng a(9), b(9), c(10);
    const Mlp na = init_mlp({3, 4, 2}, Activation::identity, a);
    const Mlp nb = init_mlp({3, 4, 2}, Activation::identity, b);
    const Mlp nc = init_mlp({3, 4, 2}, Activation::identity, c);
    EXPECT_EQ(na.layers[0].w.d, nb.layers[0].w.d);
    EXPECT_EQ(na.layers[1].w.d, nb.layers[1].w.d);
    EXPECT_NE(na.layers[0].w.d, nc.layers[0].w.d);
}

TEST(Mlp, InitRejectsBadSizes) {
    Rng rng(1);
    EXPECT_THROW(init_mlp({5}, Activation::identity, rng), config_error);
    EXPECT_THROW(init_mlp({5, 0, 1}, Activation::identity, rng), config_error);
}

TEST(Mlp, ForwardHandValue) {
    const Mlp net = linear_1x1(2.0, 1.0);
    EXPECT_DOUBLE_EQ(forward(net, {3.0})[0], 7.0);
    EXPECT_DOUBLE_EQ(forward(net, {0.0})[0], 1.0);
}

TEST(Mlp, SigmoidOutput) {
    Rng rng(0);
    Mlp net = init_mlp({1, 1}, Activation::sigmoid, rng);
    net.layers[0].w.at(0, 0) = 0.0;
    net.layers[0].b[0] = 0.0;
    EXPECT_DOUBLE_EQ(forward(net, {5.0})[0], 0.5);
    net.layers[0].b[0] = 50.0;
    EXPECT_GT(forward(net, {0.0})[0], 1.0 - 1e-12);
    net.layers[0].b[0] = -50.0;
    const double y = forward(net, {0.0})[0];
    EXPECT_GT(y, 0.0);
    EXPECT_LT(y, 1e-12);
}

TEST(Mlp, ReluClampsNegatives) {
    Rng rng(0);
    Mlp net = init_mlp({1, 2, 1}, Activation::identity, rng);
    net.layers[0].w.at(0, 0) = 1.0;
    net.layers[0].w.at(0, 1) = -1.0;
    net.layers[0].b = {0.0, 0.0};
    net.layers[1].w.at(0, 0) = 1.0;
    net.layers[1].w.at(1, 0) = 1.0;
    net.layers[1].b[0] = 0.0;
    // Hidden units relu(x), relu(-x): the output is |x|.
    EXPECT_DOUBLE_EQ(forward(net, {3.0})[0], 3.0);
    EXPECT_DOUBLE_EQ(forward(net, {-4.0})[0], 4.0);
}

TEST(Mlp, BatchedForwardMatchesSingle) {
    Rng rng(17);
    const Mlp net = init_mlp({4, 6, 2}, Activation::sigmoid, rng);
    Matrix x(3, 4);
    for (double& v : x.d) v = rng.uniform(-1, 1);
    Tape tape;
    const Matrix& y = forward(net, x, tape);
    for (std::size_t r = 0; r < 3; ++r) {
        std::vector<double> row(x.row(r), x.row(r) + 4);
        const auto single = forward(net, row);
        for (std::size_t c = 0; c < 2; ++c)
            EXPECT_NEAR(y.at(r, c), single[c], 1e-9 * std::max(1.0, std::abs(single[c])));
    }
}

TEST(Mlp, ForwardRejectsWidthMismatch) {
    Rng rng(1);
    const Mlp net = init_mlp({3, 2}, Activation::identity, rng);
    Matrix x(2, 4);
    Tape tape;
    EXPECT_THROW(forward(net, x, tape), contract_error);
}

TEST(Mlp, BackwardHandValue) {
    // y = w x + b with w=2, b=1 at x=3, upstream grad 1:
    // dw = x = 3, db = 1, dx = w = 2.
    const Mlp net = linear_1x1(2.0, 1.0);
    Matrix x(1, 1);
    x.at(0, 0) = 3.0;
    Tape tape;
    forward(net, x, tape);
    Matrix g(1, 1);
    g.at(0, 0) = 1.0;
    Gradients grads = make_gradients(net);
    Matrix dx;
    backward(net, tape, g, grads, &dx);
    EXPECT_DOUBLE_EQ(grads.dw[0].at(0, 0), 3.0);
    EXPECT_DOUBLE_EQ(grads.db[0][0], 1.0);
    EXPECT_DOUBLE_EQ(dx.at(0, 0), 2.0);
}

TEST(Mlp, BackwardSumsOverBatch) {
    Rng rng(23);
    const Mlp net = init_mlp({3, 5, 2}, Activation::identity, rng);
    Matrix x(4, 3), g(4, 2);
    for (double& v : x.d) v = rng.uniform(-1, 1);
    for (double& v : g.d) v = rng.uniform(-1, 1);

    Tape tape;
    forward(net, x, tape);
    Gradients batched = make_gradients(net);
    backward(net, tape, g, batched);

    Gradients summed = make_gradients(net);
    for (std::size_t r = 0; r < 4; ++r) {
        Matrix xr(1, 3), gr(1, 2);
        for (std::size_t c = 0; c < 3; ++c) xr.at(0, c) = x.at(r, c);
        for (std::size_t c = 0; c < 2; ++c) gr.at(0, c) = g.at(r, c);
        Tape t;
        forward(net, xr, t);
        Gradients one = make_gradients(net);
        backward(net, t, gr, one);
        for (std::size_t l = 0; l < 2; ++l) {
            for (std::size_t i = 0; i < one.dw[l].d.size(); ++i)
                summed.dw[l].d[i] += one.dw[l].d[i];
            for (std::size_t i = 0; i < one.db[l].size(); ++i)
                summed.db[l][i] += one.db[l][i];
        }
    }
    for (std::size_t l = 0; l < 2; ++l) {
        for (std::size_t i = 0; i < batched.dw[l].d.size(); ++i)
            EXPECT_NEAR(batched.dw[l].d[i], summed.dw[l].d[i], 1e-9);
        for (std::size_t i = 0; i < batched.db[l].size(); ++i)
            EXPECT_NEAR(batched.db[l][i], summed.db[l][i], 1e-9);
    }
}

TEST(Mlp, ZeroUpstreamGradGivesZeroGrads) {
    Rng rng(5);
    const Mlp net = init_mlp({2, 3, 1}, Activation::sigmoid, rng);
    Matrix x(2, 2);
    for (double& v : x.d) v = rng.uniform(-1, 1);
    Tape tape;
    forward(net, x, tape);
    Matrix g(2, 1);
    Gradients grads = make_gradients(net);
    Matrix dx;
    backward(net, tape, g, grads, &dx);
    for (const auto& m : grads.dw)
        for (double v : m.d) EXPECT_EQ(v, 0.0);
    for (const auto& v : grads.db)
        for (double b : v) EXPECT_EQ(b, 0.0);
    for (double v : dx.d) EXPECT_EQ(v, 0.0);
}

TEST(Mlp, BackwardDataMatchesFullBackward) {
    Rng rng(31);
    const Mlp net = init_mlp({4, 7, 3}, Activation::sigmoid, rng);
    Matrix x(5, 4), g(5, 3);
    for (double& v : x.d) v = rng.uniform(-1, 1);
    for (double& v : g.d) v = rng.uniform(-1, 1);
    Tape t1, t2;
    forward(net, x, t1);
    forward(net, x, t2);
    Gradients grads = make_gradients(net);
    Matrix dx_full, dx_data;
    backward(net, t1, g, grads, &dx_full);
    backward_data(net, t2, g, dx_data);
    ASSERT_EQ(dx_full.d.size(), dx_data.d.size());
    for (std::size_t i = 0; i < dx_full.d.size(); ++i)
        EXPECT_DOUBLE_EQ(dx_full.d[i], dx_data.d[i]);
}

TEST(Mlp, ActivationGradFromOutput) {
    EXPECT_EQ(detail::act_grad_from_output(3.0, Activation::relu), 1.0);
    EXPECT_EQ(detail::act_grad_from_output(0.0, Activation::relu), 0.0);
    EXPECT_DOUBLE_EQ(detail::act_grad_from_output(0.25, Activation::sigmoid), 0.1875);
    EXPECT_EQ(detail::act_grad_from_output(-7.0, Activation::identity), 1.0);
}

TEST(Mlp, FiniteDifferenceSweep) {
    const auto sweep = fdcheck::run_sweep(40, 2024);
    EXPECT_EQ(sweep.nets, 40);
    EXPECT_LE(sweep.max_param_rel, 1e-4);
    EXPECT_LE(sweep.max_input_rel, 1e-4);
}

TEST(Mlp, ActivationNames) {
    EXPECT_STREQ(activation_name(Activation::sigmoid), "sigmoid");
    EXPECT_EQ(activation_from_name("relu"), Activation::relu);
    EXPECT_THROW(activation_from_name("tanh"), config_error);
}

}  // namespace
}  // namespace evmarl
