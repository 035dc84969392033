#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/pricing.hpp"
#include "evmarl/profile.hpp"

namespace evmarl {

// Distribution network graph. Node 0 is the shared energy source; users are
// 1..N. Edges are validated for connectivity but carry no dynamics.
struct Topology {
    std::size_t node_count = 0;  // number of users N
    std::vector<std::pair<int, int>> edges;

    static Topology star(std::size_t n) {
        Topology t;
        t.node_count = n;
        for (std::size_t i = 1; i <= n; ++i)
            t.edges.emplace_back(0, static_cast<int>(i));
        return t;
    }

    void validate() const {
        const int total = static_cast<int>(node_count) + 1;
        std::vector<std::vector<int>> adj(total);
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= total || v >= total)
                throw config_error("topology: edge node index out of range");
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        std::vector<char> seen(total, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
        }
        for (int v = 1; v < total; ++v)
            if (!seen[v])
                throw config_error("topology: user node " + std::to_string(v) +
                                   " has no path to the energy source");
    }
};

struct RewardConfig {
    double alpha1 = 1.0;          // weight on price * action
    double alpha2 = 0.05;         // weight on squared battery gap
    double penalty_scale = 10.0;  // terminal |gap| penalty weight

    void validate() const {
        if (alpha1 < 0 || alpha2 < 0 || penalty_scale < 0)
            throw config_error("reward: weights must be >= 0");
    }
};

// What one agent sees. The price is the only shared signal; the rest is
// local to the owner.
struct Observation {
    double battery_gap = 0;  // B_exp - B(h), kWh
    int elapsed = 0;         // hours since arrival, 0 before plug-in
    double price = 0;        // last realized network price
    bool plugged = false;
    int departure = 0;       // h_dep
};

// Full simulation state at hour h.
struct EnvState {
    int hour = 0;
    std::vector<double> batteries;
    std::vector<char> plugged;
    std::vector<double> demand_history;  // one L_h per completed hour
    double last_price = 0;
};

struct StepResult {
    EnvState state;
    std::vector<Observation> observations;
    std::vector<double> rewards;
    bool done = false;
    // Extras the trainer and trace writers need; derivable from the state.
    std::vector<double> effective_actions;
    double total_demand = 0;
    double price = 0;
};

// B' = min(B + eta * a * dt, C). Charge-only; never decreases.
inline double battery_update(double b, double action, double eta, double dt,
                             double capacity) {
    if (action < 0.0) throw contract_error("battery_update: negative action");
    if (b > capacity) throw contract_error("battery_update: battery above capacity");
    return std::min(b + eta * action * dt, capacity);
}

// r = -a1 * F * a - a2 * (B - B_exp)^2 + eps. The terminal penalty eps is
// the distance from the expected level, scaled.
inline double reward(const RewardConfig& cfg, double price_f, double action,
                     double battery, double expected, bool at_departure) {
    double r = -cfg.alpha1 * price_f * action -
               cfg.alpha2 * (battery - expected) * (battery - expected);
    if (at_departure) r -= cfg.penalty_scale * std::abs(battery - expected);
    return r;
}

namespace detail {

inline bool plugged_at(const EvProfile& p, int hour) {
    return p.arrival_hour <= hour && hour < p.departure_hour;
}

inline Observation observe(const EvProfile& p, double battery, int hour,
                           double last_price) {
    Observation o;
    o.battery_gap = p.expected_battery - battery;
    o.elapsed = std::max(0, hour - p.arrival_hour);
    o.price = last_price;
    o.plugged = plugged_at(p, hour);
    o.departure = p.departure_hour;
    return o;
}

}  // namespace detail

// Start of a day: hour 0, batteries at their arrival levels, no demand yet.
// The pre-step price observation is the zero-load price of hour 0.
inline std::pair<EnvState, std::vector<Observation>> reset(
    const Topology& topology, const std::vector<EvProfile>& profiles,
    const PriceModel& price_model) {
    if (profiles.size() != topology.node_count)
        throw contract_error("reset: profile count does not match topology users");
    const int horizon = static_cast<int>(price_model.horizon());
    for (const auto& p : profiles) p.validate(horizon);

    EnvState s;
    s.hour = 0;
    s.last_price = price(price_model, 0.0, 0);
    s.batteries.reserve(profiles.size());
    s.plugged.reserve(profiles.size());
    std::vector<Observation> obs;
    obs.reserve(profiles.size());
    for (const auto& p : profiles) {
        s.batteries.push_back(p.battery_at_arrival);
        s.plugged.push_back(detail::plugged_at(p, 0));
        obs.push_back(detail::observe(p, p.battery_at_arrival, 0, s.last_price));
    }
    return {std::move(s), std::move(obs)};
}

// Advance one hour. Unplugged agents' actions are masked to zero (part of
// the model); actions outside [0, a_max] are contract violations. Rewards
// are evaluated on the post-step battery, with the terminal penalty firing
// on the step that reaches the departure hour.
inline StepResult step(const EnvState& state, const std::vector<double>& actions,
                       const std::vector<EvProfile>& profiles,
                       const PriceModel& price_model, const RewardConfig& reward_cfg) {
    const int horizon = static_cast<int>(price_model.horizon());
    const std::size_t n = profiles.size();
    if (state.hour >= horizon) throw contract_error("step: episode already done");
    if (actions.size() != n || state.batteries.size() != n)
        throw contract_error("step: action/profile count mismatch");

    constexpr double dt = 1.0;  // hourly slots
    StepResult r;
    r.effective_actions.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = actions[i];
        if (!(a >= 0.0 && a <= profiles[i].max_rate))
            throw contract_error("step: agent " + std::to_string(i) +
                                 " action outside [0, a_max]");
        const double eff = detail::plugged_at(profiles[i], state.hour) ? a : 0.0;
        r.effective_actions[i] = eff;
        total += eff;
    }
    const double f = price(price_model, total, static_cast<std::size_t>(state.hour));

    r.state.hour = state.hour + 1;
    r.state.last_price = f;
    r.state.demand_history = state.demand_history;
    r.state.demand_history.push_back(total);
    r.state.batteries.resize(n);
    r.state.plugged.resize(n);
    r.rewards.assign(n, 0.0);
    r.observations.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = profiles[i];
        const double b_next = battery_update(state.batteries[i], r.effective_actions[i],
                                             p.efficiency, dt, p.capacity);
        r.state.batteries[i] = b_next;
        r.state.plugged[i] = detail::plugged_at(p, r.state.hour);
        if (detail::plugged_at(p, state.hour)) {
            const bool at_departure = (r.state.hour == p.departure_hour);
            r.rewards[i] = reward(reward_cfg, f, r.effective_actions[i], b_next,
                                  p.expected_battery, at_departure);
        }
        r.observations.push_back(detail::observe(p, b_next, r.state.hour, f));
    }
    r.total_demand = total;
    r.price = f;
    r.done = (r.state.hour == horizon);
    return r;
}

// Everything the env needs for one run, as parsed from the scenario config
// section.
struct ScenarioConfig {
    std::size_t agents = 3;
    int horizon = 24;
    std::uint64_t seed = 0;  // behavior stream seed; 0 = follow the run seed
    bool fixed_behavior = false;
    BehaviorTable table;
    PriceModel price = PriceModel::uniform(24, 0.01, 0.05, 0.01);
    RewardConfig reward;
    double obs_price_ref_load = 0;  // 0 = auto: agents * max_rate
    double satisfaction_tol = 0.05;
    bool par_charging_window = false;  // default PAR window is the full day

    double price_ref_load() const {
        return obs_price_ref_load > 0
                   ? obs_price_ref_load
                   : static_cast<double>(agents) * table.max_rate;
    }

    void validate() const {
        if (agents < 1) throw config_error("scenario: agents must be >= 1");
        if (horizon < 1) throw config_error("scenario: horizon must be >= 1");
        if (static_cast<int>(price.horizon()) != horizon)
            throw config_error("scenario: price coefficients must cover the horizon");
        price.validate();
        table.validate();
        reward.validate();
        if (table.departure.hi > horizon)
            throw config_error("scenario: departure bound exceeds the horizon");
        if (satisfaction_tol < 0)
            throw config_error("scenario: satisfaction_tol must be >= 0");
        if (obs_price_ref_load < 0)
            throw config_error("scenario: obs_price_ref_load must be >= 0");
    }

    // Profiles for one episode. Fixed-behavior scenarios freeze the table at
    // its means (std = 0) so every episode sees the same owners.
    std::vector<EvProfile> draw_profiles(Rng& rng) const {
        if (fixed_behavior) {
            BehaviorTable frozen = table;
            frozen.arrival.std = 0;
            frozen.departure.std = 0;
            frozen.expected_battery.std = 0;
            frozen.battery_at_arrival.std = 0;
            return sample_profiles(rng, agents, frozen);
        }
        return sample_profiles(rng, agents, table);
    }
};

}  // namespace evmarl
