#include <gtest/gtest.h>

#include "evmarl/agent.hpp"

namespace evmarl {
namespace {

EvProfile default_profile() {
    EvProfile p;
    p.arrival_hour = 9;
    p.departure_hour = 18;
    p.battery_at_arrival = 5.5;
    p.expected_battery = 55.0;
    p.capacity = 70.0;
    p.efficiency = 0.9;
    p.max_rate = 10.0;
    return p;
}

AgentNets zero_weight_agent(double out_bias) {
    Rng rng(1);
    AgentNets a = make_agent(kObsDim, critic_input_dim(Algo::iddpg, kObsDim, 1),
                             NetConfig{}, rng);
    for (auto& l : a.actor.layers) {
        l.w.fill(0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    a.actor.layers.back().b[0] = out_bias;
    return a;
}

TEST(Agent, AlgoNames) {
    EXPECT_STREQ(algo_name(Algo::ctde), "ctde");
    EXPECT_EQ(algo_from_name("iddpg"), Algo::iddpg);
    EXPECT_THROW(algo_from_name("maddpg"), config_error);
}

TEST(Agent, NormalizeObsFields) {
    const EvProfile p = default_profile();
    Observation raw;
    raw.battery_gap = 35.0;
    raw.elapsed = 6;
    raw.price = 2.5;
    raw.plugged = true;
    raw.departure = 18;
    const auto o = normalize_obs(raw, p, 24, 10.0);
    ASSERT_EQ(o.size(), static_cast<std::size_t>(kObsDim));
    EXPECT_DOUBLE_EQ(o[0], 0.5);    // 35 / 70
    EXPECT_DOUBLE_EQ(o[1], 0.25);   // 6 / 24
    EXPECT_DOUBLE_EQ(o[2], 0.25);   // 2.5 / 10
    EXPECT_DOUBLE_EQ(o[3], 1.0);
    EXPECT_DOUBLE_EQ(o[4], 0.75);   // 18 / 24
    for (double v : o) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Agent, NormalizeObsEdgeValues) {
    const EvProfile p = default_profile();
    Observation raw;
    raw.battery_gap = 0.0;
    raw.price = 10.0;
    raw.plugged = false;
    raw.departure = 24;
    const auto o = normalize_obs(raw, p, 24, 10.0);
    EXPECT_EQ(o[0], 0.0);          // met expectation exactly
    EXPECT_DOUBLE_EQ(o[2], 1.0);   // price at the reference bound
    EXPECT_EQ(o[3], 0.0);
    EXPECT_DOUBLE_EQ(o[4], 1.0);
}

TEST(Agent, NormalizeObsClampsOutOfRange) {
    const EvProfile p = default_profile();
    Observation raw;
    raw.battery_gap = -3.0;  // charged past the expectation
    raw.price = 50.0;        // above the reference-load price
    const auto o = normalize_obs(raw, p, 24, 10.0);
    EXPECT_EQ(o[0], 0.0);
    EXPECT_EQ(o[2], 1.0);
}

TEST(Agent, NormalizeObsRejectsBadPriceRef) {
    Observation raw;
    EXPECT_THROW(normalize_obs(raw, default_profile(), 24, 0.0), contract_error);
}

TEST(Agent, CriticDims) {
    EXPECT_EQ(critic_slice_dim(5), 6);
    EXPECT_EQ(critic_input_dim(Algo::ctde, 5, 3), 18);
    EXPECT_EQ(critic_input_dim(Algo::ctde, 5, 10), 60);
    EXPECT_EQ(critic_input_dim(Algo::iddpg, 5, 10), 6);
    EXPECT_EQ(critic_input_dim(Algo::ctde, 5, 1), critic_input_dim(Algo::iddpg, 5, 1));
}

TEST(Agent, MakeAgentShapesAndTargets) {
    Rng rng(42);
    const AgentNets a = make_agent(5, 18, NetConfig{}, rng);
    EXPECT_EQ(a.actor.input_dim(), 5);
    EXPECT_EQ(a.actor.output_dim(), 1);
    EXPECT_EQ(a.actor.output_activation, Activation::sigmoid);
    EXPECT_EQ(a.critic.input_dim(), 18);
    EXPECT_EQ(a.critic.output_dim(), 1);
    EXPECT_EQ(a.critic.output_activation, Activation::identity);
    EXPECT_EQ(a.actor.layer_sizes, (std::vector<int>{5, 64, 64, 1}));
    EXPECT_EQ(a.critic.layer_sizes, (std::vector<int>{18, 128, 128, 1}));
    for (std::size_t l = 0; l < a.actor.layers.size(); ++l)
        EXPECT_EQ(a.actor_target.layers[l].w.d, a.actor.layers[l].w.d);
    for (std::size_t l = 0; l < a.critic.layers.size(); ++l)
        EXPECT_EQ(a.critic_target.layers[l].w.d, a.critic.layers[l].w.d);
    EXPECT_DOUBLE_EQ(a.actor_opt.cfg.lr, 1e-4);
    EXPECT_DOUBLE_EQ(a.critic_opt.cfg.lr, 1e-3);
}

TEST(Agent, MakeAgentDeterministicPerSeed) {
    Rng a(7), b(7);
    const AgentNets na = make_agent(5, 18, NetConfig{}, a);
    const AgentNets nb = make_agent(5, 18, NetConfig{}, b);
    for (std::size_t l = 0; l < na.actor.layers.size(); ++l)
        EXPECT_EQ(na.actor.layers[l].w.d, nb.actor.layers[l].w.d);
    for (std::size_t l = 0; l < na.critic.layers.size(); ++l)
        EXPECT_EQ(na.critic.layers[l].w.d, nb.critic.layers[l].w.d);
}

TEST(Agent, ActWithoutNoiseIsDeterministicAndConsumesNoRandomness) {
    const AgentNets agent = zero_weight_agent(0.0);  // sigmoid(0) = 0.5
    Rng rng(9), untouched(9);
    const std::vector<double> obs(kObsDim, 0.3);
    EXPECT_DOUBLE_EQ(act(agent, obs, 0.0, 10.0, rng), 5.0);
    EXPECT_DOUBLE_EQ(act(agent, obs, 0.0, 10.0, rng), 5.0);
    EXPECT_EQ(rng.uniform(0, 1), untouched.uniform(0, 1));
}

TEST(Agent, ActSaturatesToActionBounds) {
    const std::vector<double> obs(kObsDim, 0.5);
    Rng rng(1);
    const AgentNets high = zero_weight_agent(60.0);
    EXPECT_DOUBLE_EQ(act(high, obs, 0.0, 10.0, rng), 10.0);
    const AgentNets low = zero_weight_agent(-60.0);
    EXPECT_NEAR(act(low, obs, 0.0, 10.0, rng), 0.0, 1e-12);
}

TEST(Agent, NoisyActStaysInRangeAndIsSeeded) {
    const AgentNets agent = zero_weight_agent(0.0);
    const std::vector<double> obs(kObsDim, 0.5);
    Rng a(11), b(11);
    for (int i = 0; i < 500; ++i) {
        const double xa = act(agent, obs, 0.5, 10.0, a);
        const double xb = act(agent, obs, 0.5, 10.0, b);
        EXPECT_EQ(xa, xb);
        EXPECT_GE(xa, 0.0);
        EXPECT_LE(xa, 10.0);
    }
    EXPECT_THROW(act(agent, obs, -0.1, 10.0, a), contract_error);
}

}  // namespace
}  // namespace evmarl
