// A miniature end-to-end training run: one EV, a six-hour day, a few
// hundred episodes. Finishes in seconds and shows the satisfaction rate
// climbing as the policy learns to hit its battery target.

#include <cstdio>

#include "evmarl/evmarl.hpp"

int main() {
    using namespace evmarl;

    ScenarioConfig scenario;
    scenario.agents = 1;
    scenario.horizon = 6;
    scenario.fixed_behavior = true;
    scenario.table.arrival = {0, 0, 0, 0};
    scenario.table.departure = {5, 0, 5, 5};
    scenario.table.battery_at_arrival = {5, 0, 5, 5};
    scenario.table.expected_battery = {30, 0, 30, 30};
    scenario.table.capacity = 40;
    scenario.price = PriceModel::uniform(6, 0.01, 0.05, 0.01);

    TrainConfig cfg;
    cfg.episodes = 400;
    cfg.seed = 7;
    cfg.nets.actor_hidden = {32, 32};
    cfg.nets.critic_hidden = {64, 64};

    TrainResult result = train(scenario, cfg, [](const EpisodeLog& e) {
        if ((e.episode + 1) % 50 == 0)
            std::printf("episode %3d  reward %9.3f  par %.3f  satisfied %.0f%%\n",
                        e.episode + 1, e.mean_reward, e.par, 100 * e.satisfaction_rate);
    });

    const EvalReport rep = evaluate(result.learner, scenario, 20, 99);
    std::printf("\nevaluation over 20 days: par %.3f  cost %.3f  satisfaction %.0f%%\n",
                rep.par_full_day, rep.total_network_cost, 100 * rep.satisfaction_rate);
    return 0;
}
