#include <gtest/gtest.h>

#include "evmarl/env.hpp"

namespace evmarl {
namespace {

EvProfile make_profile(int arr, int dep) {
    EvProfile p;
    p.arrival_hour = arr;
    p.departure_hour = dep;
    p.battery_at_arrival = 2.0;
    p.expected_battery = 10.0;
    p.capacity = 12.0;
    p.efficiency = 0.5;
    p.max_rate = 4.0;
    return p;
}

TEST(Env, BatteryUpdate) {
    EXPECT_DOUBLE_EQ(battery_update(5.0, 10.0, 0.9, 1.0, 70.0), 14.0);
    EXPECT_DOUBLE_EQ(battery_update(69.0, 10.0, 0.9, 1.0, 70.0), 70.0);  // clipped at C
    EXPECT_DOUBLE_EQ(battery_update(5.0, 0.0, 0.9, 1.0, 70.0), 5.0);
    EXPECT_DOUBLE_EQ(battery_update(5.0, 10.0, 0.9, 0.5, 70.0), 9.5);
    EXPECT_THROW(battery_update(5.0, -1.0, 0.9, 1.0, 70.0), contract_error);
    EXPECT_THROW(battery_update(71.0, 1.0, 0.9, 1.0, 70.0), contract_error);
}

TEST(Env, RewardHandValues) {
    const RewardConfig cfg;  // alpha1 1, alpha2 0.05, penalty 10
    EXPECT_DOUBLE_EQ(reward(cfg, 1.51, 5.0, 10.0, 55.0, false),
                     -1.51 * 5.0 - 0.05 * 45.0 * 45.0);
    EXPECT_DOUBLE_EQ(reward(cfg, 1.51, 5.0, 10.0, 55.0, true),
                     -1.51 * 5.0 - 0.05 * 45.0 * 45.0 - 10.0 * 45.0);
    // Meeting the expectation exactly leaves only the usage charge.
    EXPECT_DOUBLE_EQ(reward(cfg, 2.0, 3.0, 55.0, 55.0, true), -6.0);
}

TEST(Env, TopologyStarValidates) {
    EXPECT_NO_THROW(Topology::star(10).validate());
    Topology disconnected;
    disconnected.node_count = 2;
    disconnected.edges = {{0, 1}};  // user 2 unreachable
    EXPECT_THROW(disconnected.validate(), config_error);
    Topology bad_index;
    bad_index.node_count = 1;
    bad_index.edges = {{0, 5}};
    EXPECT_THROW(bad_index.validate(), config_error);
}

TEST(Env, ResetState) {
    const std::vector<EvProfile> ps{make_profile(0, 3), make_profile(1, 4)};
    const PriceModel m = PriceModel::uniform(4, 0.01, 0.05, 0.01);
    auto [state, obs] = reset(Topology::star(2), ps, m);
    EXPECT_EQ(state.hour, 0);
    EXPECT_EQ(state.batteries, (std::vector<double>{2.0, 2.0}));
    EXPECT_TRUE(state.demand_history.empty());
    EXPECT_DOUBLE_EQ(state.last_price, 0.01);
    ASSERT_EQ(obs.size(), 2u);
    EXPECT_DOUBLE_EQ(obs[0].battery_gap, 8.0);
    EXPECT_EQ(obs[0].elapsed, 0);
    EXPECT_TRUE(obs[0].plugged);
    EXPECT_EQ(obs[0].departure, 3);
    EXPECT_FALSE(obs[1].plugged);  // arrives at hour 1
    EXPECT_EQ(obs[1].elapsed, 0);
}

TEST(Env, StepMasksUnpluggedAndPricesTotal) {
    const std::vector<EvProfile> ps{make_profile(0, 3), make_profile(1, 4)};
    const PriceModel m = PriceModel::uniform(4, 0.01, 0.05, 0.01);
    auto [state, obs] = reset(Topology::star(2), ps, m);

    StepResult r = step(state, {4.0, 4.0}, ps, m, RewardConfig{});
    EXPECT_EQ(r.effective_actions, (std::vector<double>{4.0, 0.0}));
    EXPECT_DOUBLE_EQ(r.total_demand, 4.0);
    const double f = 0.01 * 16 + 0.05 * 4 + 0.01;  // 0.37
    EXPECT_DOUBLE_EQ(r.price, f);
    EXPECT_DOUBLE_EQ(r.state.batteries[0], 4.0);  // 2 + 0.5 * 4
    EXPECT_DOUBLE_EQ(r.state.batteries[1], 2.0);
    EXPECT_DOUBLE_EQ(r.rewards[0], -f * 4.0 - 0.05 * 36.0);
    EXPECT_DOUBLE_EQ(r.rewards[1], 0.0);  // unplugged during the hour
    EXPECT_FALSE(r.done);
    EXPECT_EQ(r.state.hour, 1);
    EXPECT_EQ(r.state.demand_history, (std::vector<double>{4.0}));
    EXPECT_DOUBLE_EQ(r.observations[0].battery_gap, 6.0);
    EXPECT_EQ(r.observations[0].elapsed, 1);
    EXPECT_TRUE(r.observations[1].plugged);  // hour 1 reached its arrival
}

TEST(Env, TerminalPenaltyAtDeparture) {
    const std::vector<EvProfile> ps{make_profile(0, 1)};
    const PriceModel m = PriceModel::uniform(1, 0.01, 0.05, 0.01);
    auto [state, obs] = reset(Topology::star(1), ps, m);
    StepResult r = step(state, {4.0}, ps, m, RewardConfig{});
    const double f = 0.37;
    // Post-step battery 4, gap 6: usage + shaping + terminal penalty.
    EXPECT_DOUBLE_EQ(r.rewards[0], -f * 4.0 - 0.05 * 36.0 - 10.0 * 6.0);
    EXPECT_TRUE(r.done);
    EXPECT_THROW(step(r.state, {0.0}, ps, m, RewardConfig{}), contract_error);
}

TEST(Env, OutOfRangeActionRejectedEvenWhenUnplugged) {
    const std::vector<EvProfile> ps{make_profile(0, 3), make_profile(1, 4)};
    const PriceModel m = PriceModel::uniform(4, 0.01, 0.05, 0.01);
    auto [state, obs] = reset(Topology::star(2), ps, m);
    EXPECT_THROW(step(state, {5.0, 0.0}, ps, m, RewardConfig{}), contract_error);
    EXPECT_THROW(step(state, {0.0, 4.5}, ps, m, RewardConfig{}), contract_error);
    EXPECT_THROW(step(state, {-0.1, 0.0}, ps, m, RewardConfig{}), contract_error);
}

TEST(Env, FullDayAccumulatesHistory) {
    const std::vector<EvProfile> ps{make_profile(0, 3)};
    const PriceModel m = PriceModel::uniform(4, 0.01, 0.05, 0.01);
    auto [state, obs] = reset(Topology::star(1), ps, m);
    for (int h = 0; h < 4; ++h) {
        StepResult r = step(state, {2.0}, ps, m, RewardConfig{});
        state = r.state;
        EXPECT_EQ(r.done, h == 3);
    }
    // Plugged hours 0..2 contribute; hour 3 is masked to zero.
    EXPECT_EQ(state.demand_history, (std::vector<double>{2.0, 2.0, 2.0, 0.0}));
    EXPECT_DOUBLE_EQ(state.batteries[0], 5.0);
}

TEST(Env, ScenarioDefaultsValidate) {
    ScenarioConfig sc;
    EXPECT_NO_THROW(sc.validate());
    EXPECT_DOUBLE_EQ(sc.price_ref_load(), 30.0);  // 3 agents * 10 kW
    sc.obs_price_ref_load = 50.0;
    EXPECT_DOUBLE_EQ(sc.price_ref_load(), 50.0);
}

TEST(Env, ScenarioRejectsDepartureBeyondHorizon) {
    ScenarioConfig sc;
    sc.horizon = 18;
    sc.price = PriceModel::uniform(18, 0.01, 0.05, 0.01);
    // Default departure bound is 20.
    EXPECT_THROW(sc.validate(), config_error);
}

TEST(Env, FixedBehaviorDrawsAreConstant) {
    ScenarioConfig sc;
    sc.fixed_behavior = true;
    Rng rng(5);
    const auto a = sc.draw_profiles(rng);
    const auto b = sc.draw_profiles(rng);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].arrival_hour, 9);
        EXPECT_EQ(a[i].departure_hour, 18);
        EXPECT_EQ(a[i].battery_at_arrival, b[i].battery_at_arrival);
        EXPECT_EQ(a[i].expected_battery, 55.0);
    }
}

}  // namespace
}  // namespace evmarl
