#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/env.hpp"
#include "evmarl/mlp.hpp"
#include "evmarl/optim.hpp"
#include "evmarl/rng.hpp"

namespace evmarl {

enum class Algo { ctde, iddpg };

inline const char* algo_name(Algo a) { return a == Algo::ctde ? "ctde" : "iddpg"; }

inline Algo algo_from_name(const std::string& s) {
    if (s == "ctde") return Algo::ctde;
    if (s == "iddpg") return Algo::iddpg;
    throw config_error("unknown algo: " + s + " (expected ctde or iddpg)");
}

// Observation vector layout; one slot per Observation field.
inline constexpr int kObsDim = 5;

// Scale every field into [0,1] by its model bound. Bounds are fixed up
// front (capacity, horizon, reference-load price), never adapted online.
// Values outside their bound clamp and warn once per process.
inline std::vector<double> normalize_obs(const Observation& raw, const EvProfile& profile,
                                         int horizon, double price_ref) {
    if (!(price_ref > 0)) throw contract_error("normalize_obs: price_ref must be > 0");
    auto unit = [](double v, double bound, const char* msg) {
        if (v < 0 || v > bound) warn_once(msg);
        return std::clamp(v / bound, 0.0, 1.0);
    };
    std::vector<double> o(kObsDim);
    o[0] = unit(raw.battery_gap, profile.capacity,
                "observation battery_gap outside [0, capacity], clamped");
    o[1] = unit(static_cast<double>(raw.elapsed), static_cast<double>(horizon),
                "observation elapsed outside [0, horizon], clamped");
    o[2] = unit(raw.price, price_ref, "observation price above reference load price, clamped");
    o[3] = raw.plugged ? 1.0 : 0.0;
    o[4] = unit(static_cast<double>(raw.departure), static_cast<double>(horizon),
                "observation departure outside [0, horizon], clamped");
    return o;
}

// Actor/critic pair with their targets and optimizer states: the learnable
// half of one agent.
struct AgentNets {
    Mlp actor, critic;
    Mlp actor_target, critic_target;
    OptimizerState actor_opt, critic_opt;
};

struct NetConfig {
    std::vector<int> actor_hidden{64, 64};
    std::vector<int> critic_hidden{128, 128};
    double lr_actor = 1e-4;
    double lr_critic = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;

    void validate() const {
        if (actor_hidden.empty() || critic_hidden.empty())
            throw config_error("nets: need at least one hidden layer");
        for (int w : actor_hidden)
            if (w < 1) throw config_error("nets: actor hidden width must be >= 1");
        for (int w : critic_hidden)
            if (w < 1) throw config_error("nets: critic hidden width must be >= 1");
        AdamConfig a;
        a.lr = lr_actor;
        a.beta1 = adam_beta1;
        a.beta2 = adam_beta2;
        a.validate();
        a.lr = lr_critic;
        a.validate();
    }
};

// Draw order is fixed: actor then critic; targets start as copies.
inline AgentNets make_agent(int obs_dim, int critic_input_dim, const NetConfig& cfg,
                            Rng& rng) {
    cfg.validate();
    std::vector<int> actor_sizes{obs_dim};
    actor_sizes.insert(actor_sizes.end(), cfg.actor_hidden.begin(), cfg.actor_hidden.end());
    actor_sizes.push_back(1);
    std::vector<int> critic_sizes{critic_input_dim};
    critic_sizes.insert(critic_sizes.end(), cfg.critic_hidden.begin(),
                        cfg.critic_hidden.end());
    critic_sizes.push_back(1);

    AgentNets a;
    a.actor = init_mlp(actor_sizes, Activation::sigmoid, rng);
    a.critic = init_mlp(critic_sizes, Activation::identity, rng);
    a.actor_target = a.actor;
    a.critic_target = a.critic;
    AdamConfig actor_cfg{cfg.lr_actor, cfg.adam_beta1, cfg.adam_beta2, 1e-8};
    AdamConfig critic_cfg{cfg.lr_critic, cfg.adam_beta1, cfg.adam_beta2, 1e-8};
    a.actor_opt = make_adam(a.actor, actor_cfg);
    a.critic_opt = make_adam(a.critic, critic_cfg);
    return a;
}

// a = clamp(a_max * squash(actor(obs)) + N(0, noise_std * a_max), 0, a_max).
// Zero noise consumes no randomness, so evaluation never touches the rng.
inline double act(const AgentNets& agent, const std::vector<double>& obs_norm,
                  double noise_std, double a_max, Rng& rng) {
    if (noise_std < 0) throw contract_error("act: negative noise_std");
    const std::vector<double> out = forward(agent.actor, obs_norm);
    if (!std::isfinite(out[0])) throw contract_error("act: non-finite actor output");
    double a = a_max * out[0];
    if (noise_std > 0) a += rng.normal(0.0, noise_std * a_max);
    return std::clamp(a, 0.0, a_max);
}

// Width of one agent's slice of the critic input: its observation plus its
// normalized action.
inline int critic_slice_dim(int obs_dim) { return obs_dim + 1; }

inline int critic_input_dim(Algo algo, int obs_dim, std::size_t n_agents) {
    return algo == Algo::ctde ? static_cast<int>(n_agents) * critic_slice_dim(obs_dim)
                              : critic_slice_dim(obs_dim);
}

}  // namespace evmarl
