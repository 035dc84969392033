#include <gtest/gtest.h>

#include <bit>
#include <sstream>

#include "evmarl/mlp.hpp"
#include "evmarl/nn_io.hpp"
#include "evmarl/optim.hpp"
#include "evmarl/rng.hpp"

namespace evmarl {
namespace {

Mlp random_net(std::uint64_t seed) {
    Rng rng(seed);
    Mlp net = init_mlp({3, 8, 8, 2}, Activation::sigmoid, rng);
    for (auto& l : net.layers)
        for (double& b : l.b) b = rng.uniform(-0.3, 0.3);
    return net;
}

TEST(NnIo, HexRoundTripIsBitExact) {
    std::ostringstream os;
    const double values[] = {0.1, -1.0 / 3.0, 1e-300, -0.0, 6.02214076e23};
    for (double v : values) {
        io::put_f64(os, v);
        os << ' ';
    }
    std::istringstream is(os.str());
    io::TokenReader r(is);
    for (double v : values) {
        const double back = r.f64();
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back), std::bit_cast<std::uint64_t>(v));
    }
}

TEST(NnIo, MlpRoundTripIsBitExact) {
    const Mlp net = random_net(77);
    std::ostringstream os;
    write_mlp(os, net);
    std::istringstream is(os.str());
    const Mlp back = read_mlp(is);
    EXPECT_EQ(back.layer_sizes, net.layer_sizes);
    EXPECT_EQ(back.output_activation, net.output_activation);
    ASSERT_EQ(back.layers.size(), net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        EXPECT_EQ(back.layers[l].w.d, net.layers[l].w.d);
        EXPECT_EQ(back.layers[l].b, net.layers[l].b);
        EXPECT_EQ(back.layers[l].act, net.layers[l].act);
    }
}

TEST(NnIo, AdamRoundTripIsBitExact) {
    Mlp net = random_net(78);
    AdamConfig cfg;
    cfg.lr = 3e-4;
    OptimizerState opt = make_adam(net, cfg);
    // A few updates put nonzero history in every moment buffer.
    Rng rng(5);
    Gradients g = make_gradients(net);
    for (int it = 0; it < 3; ++it) {
        for (auto& m : g.dw)
            for (double& v : m.d) v = rng.uniform(-1, 1);
        for (auto& v : g.db)
            for (double& b : v) b = rng.uniform(-1, 1);
        apply_update(net, g, opt);
    }

    std::ostringstream os;
    write_adam(os, opt);
    std::istringstream is(os.str());
    const OptimizerState back = read_adam(is, net);
    EXPECT_EQ(back.step, opt.step);
    EXPECT_EQ(back.cfg.lr, opt.cfg.lr);
    EXPECT_EQ(back.cfg.beta1, opt.cfg.beta1);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        EXPECT_EQ(back.m_w[l].d, opt.m_w[l].d);
        EXPECT_EQ(back.v_w[l].d, opt.v_w[l].d);
        EXPECT_EQ(back.m_b[l], opt.m_b[l]);
        EXPECT_EQ(back.v_b[l], opt.v_b[l]);
    }
}

TEST(NnIo, WriteIsDeterministic) {
    const Mlp net = random_net(79);
    std::ostringstream a, b;
    write_mlp(a, net);
    write_mlp(b, net);
    EXPECT_EQ(a.str(), b.str());
}

TEST(NnIo, RejectsWrongVersion) {
    const Mlp net = random_net(80);
    std::ostringstream os;
    write_mlp(os, net);
    std::string text = os.str();
    const auto pos = text.find("net 1");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 5, "net 9");
    std::istringstream is(text);
    EXPECT_THROW(read_mlp(is), config_error);
}

TEST(NnIo, RejectsTruncatedStream) {
    const Mlp net = random_net(81);
    std::ostringstream os;
    write_mlp(os, net);
    std::istringstream is(os.str().substr(0, os.str().size() / 2));
    EXPECT_THROW(read_mlp(is), config_error);
}

TEST(NnIo, RejectsCorruptHexToken) {
    const Mlp net = random_net(82);
    std::ostringstream os;
    write_mlp(os, net);
    std::string text = os.str();
    const auto pos = text.rfind("w ");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos + 2, 1, "zz");  // not a count, not hex
    std::istringstream is(text);
    EXPECT_THROW(read_mlp(is), config_error);
}

}  // namespace
}  // namespace evmarl
