#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "evmarl/agent.hpp"
#include "evmarl/common.hpp"
#include "evmarl/env.hpp"
#include "evmarl/metrics.hpp"
#include "evmarl/mlp.hpp"
#include "evmarl/optim.hpp"
#include "evmarl/replay.hpp"
#include "evmarl/rng.hpp"

namespace evmarl {

struct TrainConfig {
    double gamma = 0.95;
    double tau = 0.01;
    std::size_t batch_size = 64;
    std::size_t buffer_capacity = 100000;
    int episodes = 2000;
    double noise_std_initial = 0.3;
    double noise_std_final = 0.02;
    int noise_decay_episodes = 0;  // 0 = 70% of episodes
    int updates_per_step = 1;
    std::uint64_t seed = 1;
    Algo algo = Algo::ctde;
    NetConfig nets;

    void validate() const {
        if (!(gamma > 0 && gamma < 1)) throw config_error("train: gamma must be in (0,1)");
        if (!(tau > 0 && tau <= 1)) throw config_error("train: tau must be in (0,1]");
        if (batch_size < 1) throw config_error("train: batch_size must be >= 1");
        if (batch_size > buffer_capacity)
            throw config_error("train: batch_size exceeds buffer_capacity");
        if (episodes < 0) throw config_error("train: episodes must be >= 0");
        if (noise_std_initial < 0 || noise_std_final < 0)
            throw config_error("train: noise stds must be >= 0");
        if (noise_decay_episodes < 0)
            throw config_error("train: noise_decay_episodes must be >= 0");
        if (updates_per_step < 1)
            throw config_error("train: updates_per_step must be >= 1");
        nets.validate();
    }

    int effective_noise_decay() const {
        if (noise_decay_episodes > 0) return noise_decay_episodes;
        return std::max(1, static_cast<int>(std::lround(0.7 * episodes)));
    }
};

inline double noise_schedule(const TrainConfig& cfg, int episode) {
    const int decay = cfg.effective_noise_decay();
    const double frac =
        std::min(1.0, static_cast<double>(episode) / static_cast<double>(decay));
    // Lerp written so both endpoints are exact.
    return cfg.noise_std_initial * (1.0 - frac) + cfg.noise_std_final * frac;
}

// All agents plus the update machinery. Plain value type: copy it and the
// copy trains independently. The ws_ members are reusable scratch so steady
// state training allocates nothing.
class Learner {
  public:
    Algo algo = Algo::ctde;
    int obs_dim = kObsDim;
    double gamma = 0.95;
    double tau = 0.01;
    std::vector<double> a_max;  // per agent, kW
    std::vector<AgentNets> agents;

    Learner() = default;

    Learner(Algo algo_, int obs_dim_, std::vector<double> a_max_, const NetConfig& nets,
            double gamma_, double tau_, Rng& init_rng)
        : algo(algo_), obs_dim(obs_dim_), gamma(gamma_), tau(tau_),
          a_max(std::move(a_max_)) {
        if (a_max.empty()) throw config_error("learner: need at least one agent");
        for (double m : a_max)
            if (!(m > 0)) throw config_error("learner: a_max must be > 0");
        const int critic_in = critic_input_dim(algo, obs_dim, a_max.size());
        agents.reserve(a_max.size());
        for (std::size_t i = 0; i < a_max.size(); ++i)
            agents.push_back(make_agent(obs_dim, critic_in, nets, init_rng));
    }

    std::size_t n_agents() const { return a_max.size(); }

    // y = r_i + gamma * (1 - done) * Q'_i(o', a' = mu'(o')). Scalar form,
    // one transition; the batched updates below reproduce it exactly.
    double critic_target_value(std::size_t i, const Transition& t) const {
        check_agent(i);
        std::vector<double> input;
        if (algo == Algo::ctde) {
            for (std::size_t j = 0; j < n_agents(); ++j) {
                const double u = forward(agents[j].actor_target, t.next_obs[j])[0];
                input.insert(input.end(), t.next_obs[j].begin(), t.next_obs[j].end());
                input.push_back(u);
            }
        } else {
            const double u = forward(agents[i].actor_target, t.next_obs[i])[0];
            input.insert(input.end(), t.next_obs[i].begin(), t.next_obs[i].end());
            input.push_back(u);
        }
        const double q = forward(agents[i].critic_target, input)[0];
        return t.rewards[i] + gamma * (t.done ? 0.0 : 1.0) * q;
    }

    // One critic descent step on the mean squared TD error; returns the
    // pre-update loss.
    double update_critic(std::size_t i, const std::vector<const Transition*>& batch) {
        check_agent(i);
        load_batch(batch);
        const std::size_t B = batch.size();

        // Bootstrap targets from the target nets.
        for (std::size_t j = 0; j < n_agents(); ++j)
            if (algo == Algo::ctde || j == i)
                forward(agents[j].actor_target, ws_next_obs_[j], ws_u_tape_[j]);
        assemble_input(ws_next_in_, ws_next_obs_, i,
                       [&](std::size_t b, std::size_t j) {
                           return ws_u_tape_[j].output().at(b, 0);
                       });
        const Matrix& qn = forward(agents[i].critic_target, ws_next_in_, ws_qt_tape_);
        ws_y_.resize(B);
        for (std::size_t b = 0; b < B; ++b)
            ws_y_[b] = ws_rewards_.at(b, i) + gamma * (1.0 - ws_done_[b]) * qn.at(b, 0);

        assemble_input(ws_cur_in_, ws_obs_, i, [&](std::size_t b, std::size_t j) {
            return ws_act_norm_.at(b, j);
        });
        const Matrix& q = forward(agents[i].critic, ws_cur_in_, ws_q_tape_);

        double loss = 0.0;
        ws_grad_out_.resize(B, 1);
        const double inv_b = 1.0 / static_cast<double>(B);
        for (std::size_t b = 0; b < B; ++b) {
            const double e = q.at(b, 0) - ws_y_[b];
            loss += e * e * inv_b;
            ws_grad_out_.at(b, 0) = 2.0 * e * inv_b;
        }
        if (!std::isfinite(loss))
            throw contract_error("update_critic: non-finite TD loss, update aborted");

        ensure_grads(i);
        backward(agents[i].critic, ws_q_tape_, ws_grad_out_, ws_critic_grads_);
        apply_update(agents[i].critic, ws_critic_grads_, agents[i].critic_opt);
        return loss;
    }

    // Batch-mean critic value with a_i substituted by the current policy
    // and other agents' actions replayed from the batch. Forward only.
    double actor_objective(std::size_t i, const std::vector<const Transition*>& batch) {
        check_agent(i);
        load_batch(batch);
        const std::size_t B = batch.size();

        const Matrix& u_i = forward(agents[i].actor, ws_obs_[i], ws_actor_tape_);
        assemble_input(ws_cur_in_, ws_obs_, i, [&](std::size_t b, std::size_t j) {
            return j == i ? u_i.at(b, 0) : ws_act_norm_.at(b, j);
        });
        const Matrix& q = forward(agents[i].critic, ws_cur_in_, ws_q_tape_);

        double mean_q = 0.0;
        const double inv_b = 1.0 / static_cast<double>(B);
        for (std::size_t b = 0; b < B; ++b) mean_q += q.at(b, 0) * inv_b;
        if (!std::isfinite(mean_q))
            throw contract_error("update_actor: non-finite critic value, update aborted");
        return mean_q;
    }

    // Fills `grads` with the descent direction fed to the optimizer, i.e.
    // the gradient of -actor_objective with respect to the actor's
    // parameters. Returns the objective itself.
    double actor_gradient(std::size_t i, const std::vector<const Transition*>& batch,
                          Gradients& grads) {
        const double mean_q = actor_objective(i, batch);
        const std::size_t B = batch.size();
        const double inv_b = 1.0 / static_cast<double>(B);

        // Ascent through a descent optimizer: seed the chain with -1/B.
        ws_grad_out_.resize(B, 1);
        for (std::size_t b = 0; b < B; ++b) ws_grad_out_.at(b, 0) = -inv_b;
        backward_data(agents[i].critic, ws_q_tape_, ws_grad_out_, ws_input_grad_);

        const std::size_t u_col = algo == Algo::ctde
                                      ? i * critic_slice_dim(obs_dim) + obs_dim
                                      : static_cast<std::size_t>(obs_dim);
        ws_actor_grad_out_.resize(B, 1);
        for (std::size_t b = 0; b < B; ++b)
            ws_actor_grad_out_.at(b, 0) = ws_input_grad_.at(b, u_col);

        if (grads.dw.size() != agents[i].actor.layers.size())
            grads = make_gradients(agents[i].actor);
        backward(agents[i].actor, ws_actor_tape_, ws_actor_grad_out_, grads);
        return mean_q;
    }

    // One actor ascent step on the batch-mean critic value. The critic is
    // read but never modified. Returns the pre-update mean Q.
    double update_actor(std::size_t i, const std::vector<const Transition*>& batch) {
        const double mean_q = actor_gradient(i, batch, ws_actor_grads_);
        apply_update(agents[i].actor, ws_actor_grads_, agents[i].actor_opt);
        return mean_q;
    }

    void soft_update_targets(std::size_t i) {
        check_agent(i);
        soft_update(agents[i].actor_target, agents[i].actor, tau);
        soft_update(agents[i].critic_target, agents[i].critic, tau);
    }

  private:
    void check_agent(std::size_t i) const {
        if (i >= agents.size()) throw contract_error("learner: agent index out of range");
    }

    // Spread one sampled batch into per-agent matrices.
    void load_batch(const std::vector<const Transition*>& batch) {
        const std::size_t B = batch.size();
        if (B == 0) throw contract_error("learner: empty batch");
        const std::size_t n = n_agents();
        const auto d = static_cast<std::size_t>(obs_dim);
        ws_obs_.resize(n);
        ws_next_obs_.resize(n);
        ws_u_tape_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            ws_obs_[j].resize(B, d);
            ws_next_obs_[j].resize(B, d);
        }
        ws_act_norm_.resize(B, n);
        ws_rewards_.resize(B, n);
        ws_done_.resize(B);
        for (std::size_t b = 0; b < B; ++b) {
            const Transition& t = *batch[b];
            if (t.obs.size() != n || t.actions.size() != n)
                throw contract_error("learner: transition agent count mismatch");
            for (std::size_t j = 0; j < n; ++j) {
                if (t.obs[j].size() != d || t.next_obs[j].size() != d)
                    throw contract_error("learner: observation width mismatch");
                std::copy(t.obs[j].begin(), t.obs[j].end(), ws_obs_[j].row(b));
                std::copy(t.next_obs[j].begin(), t.next_obs[j].end(),
                          ws_next_obs_[j].row(b));
                ws_act_norm_.at(b, j) = t.actions[j] / a_max[j];
                ws_rewards_.at(b, j) = t.rewards[j];
            }
            ws_done_[b] = t.done ? 1.0 : 0.0;
        }
    }

    // Critic input rows: CTDE interleaves every agent's (obs, action);
    // I-DDPG sees only agent i's slice.
    template <class UFn>
    void assemble_input(Matrix& out, const std::vector<Matrix>& obs_mats, std::size_t i,
                        UFn u) const {
        const std::size_t B = obs_mats[0].rows;
        const auto d = static_cast<std::size_t>(obs_dim);
        const std::size_t slice = d + 1;
        if (algo == Algo::ctde) {
            out.resize(B, n_agents() * slice);
            for (std::size_t b = 0; b < B; ++b) {
                double* row = out.row(b);
                for (std::size_t j = 0; j < n_agents(); ++j) {
                    const double* o = obs_mats[j].row(b);
                    std::copy(o, o + d, row + j * slice);
                    row[j * slice + d] = u(b, j);
                }
            }
        } else {
            out.resize(B, slice);
            for (std::size_t b = 0; b < B; ++b) {
                double* row = out.row(b);
                const double* o = obs_mats[i].row(b);
                std::copy(o, o + d, row);
                row[d] = u(b, i);
            }
        }
    }

    void ensure_grads(std::size_t i) {
        if (ws_critic_grads_.dw.empty()) ws_critic_grads_ = make_gradients(agents[i].critic);
        if (ws_actor_grads_.dw.empty()) ws_actor_grads_ = make_gradients(agents[i].actor);
    }

    std::vector<Matrix> ws_obs_, ws_next_obs_;
    std::vector<Tape> ws_u_tape_;
    Matrix ws_act_norm_, ws_rewards_;
    std::vector<double> ws_done_, ws_y_;
    Matrix ws_cur_in_, ws_next_in_;
    Tape ws_q_tape_, ws_qt_tape_, ws_actor_tape_;
    Gradients ws_critic_grads_, ws_actor_grads_;
    Matrix ws_grad_out_, ws_input_grad_, ws_actor_grad_out_;
};

struct EpisodeLog {
    int episode = 0;
    double mean_reward = 0;
    double network_cost = 0;
    double par = 0;  // 0 marks a no-demand day (PAR undefined)
    double satisfaction_rate = 0;
    double noise_std = 0;
};

struct TrainResult {
    Learner learner;
    std::vector<EpisodeLog> log;
};

namespace detail {

inline double par_or_zero(const std::vector<double>& demand, int lo, int hi) {
    double mx = 0.0;
    for (int h = lo; h < hi; ++h) mx = std::max(mx, demand[static_cast<std::size_t>(h)]);
    if (mx == 0.0) return 0.0;
    return par_window(demand, lo, hi);
}

}  // namespace detail

// Full training run: `episodes` simulated days with exploration noise,
// replay, and per-step update rounds once the buffer can fill a batch.
inline TrainResult train(const ScenarioConfig& scenario, const TrainConfig& cfg,
                         const std::function<void(const EpisodeLog&)>& on_episode = {}) {
    scenario.validate();
    cfg.validate();

    const std::size_t n = scenario.agents;
    const int horizon = scenario.horizon;
    const Topology topology = Topology::star(n);
    topology.validate();
    const double price_ref = price(scenario.price, scenario.price_ref_load(), 0);

    const std::uint64_t behavior_seed = scenario.seed != 0 ? scenario.seed : cfg.seed;
    Rng profile_rng = Rng::stream(behavior_seed, "profiles");
    Rng init_rng = Rng::stream(cfg.seed, "init");
    Rng noise_rng = Rng::stream(cfg.seed, "noise");
    Rng replay_rng = Rng::stream(cfg.seed, "replay");

    TrainResult result{
        Learner(cfg.algo, kObsDim, std::vector<double>(n, scenario.table.max_rate),
                cfg.nets, cfg.gamma, cfg.tau, init_rng),
        {}};
    Learner& learner = result.learner;
    ReplayBuffer buffer(cfg.buffer_capacity);
    std::vector<const Transition*> batch;

    std::vector<double> actions(n);
    for (int episode = 0; episode < cfg.episodes; ++episode) {
        const double noise_std = noise_schedule(cfg, episode);
        const std::vector<EvProfile> profiles = scenario.draw_profiles(profile_rng);
        auto [state, raw_obs] = reset(topology, profiles, scenario.price);

        std::vector<std::vector<double>> obs_norm(n), next_norm(n);
        for (std::size_t i = 0; i < n; ++i)
            obs_norm[i] = normalize_obs(raw_obs[i], profiles[i], horizon, price_ref);

        std::vector<double> reward_sums(n, 0.0);
        for (int h = 0; h < horizon; ++h) {
            for (std::size_t i = 0; i < n; ++i)
                actions[i] =
                    act(learner.agents[i], obs_norm[i], noise_std, learner.a_max[i], noise_rng);
            StepResult sr = step(state, actions, profiles, scenario.price, scenario.reward);
            for (std::size_t i = 0; i < n; ++i) {
                next_norm[i] = normalize_obs(sr.observations[i], profiles[i], horizon, price_ref);
                reward_sums[i] += sr.rewards[i];
            }

            Transition t;
            t.obs = obs_norm;
            t.actions = sr.effective_actions;
            t.rewards = sr.rewards;
            t.next_obs = next_norm;
            t.done = sr.done;
            buffer.store(std::move(t));

            if (buffer.size() >= cfg.batch_size) {
                for (int round = 0; round < cfg.updates_per_step; ++round) {
                    for (std::size_t i = 0; i < n; ++i) {
                        buffer.sample(replay_rng, cfg.batch_size, batch);
                        learner.update_critic(i, batch);
                        learner.update_actor(i, batch);
                        learner.soft_update_targets(i);
                    }
                }
            }

            state = std::move(sr.state);
            obs_norm.swap(next_norm);
        }

        EpisodeLog log;
        log.episode = episode;
        log.noise_std = noise_std;
        double reward_total = 0.0;
        for (double r : reward_sums) reward_total += r;
        log.mean_reward = reward_total / static_cast<double>(n);
        for (std::size_t h = 0; h < state.demand_history.size(); ++h)
            log.network_cost += network_cost(scenario.price, state.demand_history[h], h);
        int par_lo = 0, par_hi = horizon;
        if (scenario.par_charging_window)
            std::tie(par_lo, par_hi) = charging_window(profiles);
        log.par = detail::par_or_zero(state.demand_history, par_lo, par_hi);
        log.satisfaction_rate =
            satisfaction(state.batteries, profiles, scenario.satisfaction_tol);
        result.log.push_back(log);
        if (on_episode) on_episode(log);
    }
    return result;
}

// One noise-free day on a fixed set of profiles. The policy path is
// local by construction: each action is computed from that agent's own
// observation vector alone.
struct RolloutTrace {
    std::vector<std::vector<double>> actions_by_hour;  // [hour][agent], kW
    std::vector<double> totals_by_hour;
    std::vector<double> price_by_hour;
    std::vector<double> final_batteries;
    std::vector<double> reward_sums;
};

inline RolloutTrace rollout(const Learner& learner, const ScenarioConfig& scenario,
                            const std::vector<EvProfile>& profiles) {
    const std::size_t n = profiles.size();
    if (n != learner.n_agents())
        throw contract_error("rollout: learner/profile agent count mismatch");
    const int horizon = scenario.horizon;
    const double price_ref = price(scenario.price, scenario.price_ref_load(), 0);
    const Topology topology = Topology::star(n);

    // Decentralized-execution guard: the policy input is exactly one
    // agent-local observation wide.
    for (const auto& a : learner.agents)
        if (a.actor.input_dim() != kObsDim)
            throw contract_error("rollout: actor input is not a single local observation");

    Rng no_noise = Rng::stream(0, "unused");
    RolloutTrace trace;
    auto [state, raw_obs] = reset(topology, profiles, scenario.price);
    std::vector<double> actions(n);
    trace.reward_sums.assign(n, 0.0);
    for (int h = 0; h < horizon; ++h) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> o =
                normalize_obs(raw_obs[i], profiles[i], horizon, price_ref);
            actions[i] = act(learner.agents[i], o, 0.0, learner.a_max[i], no_noise);
        }
        StepResult sr = step(state, actions, profiles, scenario.price, scenario.reward);
        trace.actions_by_hour.push_back(sr.effective_actions);
        trace.totals_by_hour.push_back(sr.total_demand);
        trace.price_by_hour.push_back(sr.price);
        for (std::size_t i = 0; i < n; ++i) trace.reward_sums[i] += sr.rewards[i];
        state = std::move(sr.state);
        raw_obs = std::move(sr.observations);
    }
    trace.final_batteries = state.batteries;
    return trace;
}

struct EpisodeEval {
    double par_full_day = 0;
    double par_charging_phase = 0;
    double network_cost = 0;
    std::vector<double> per_agent_cost;
    double satisfaction_rate = 0;
    bool all_satisfied = false;
};

// Noise-free evaluation over `episodes` freshly drawn days. Also fills
// per-episode records when the caller wants the distribution, not just the
// means.
inline EvalReport evaluate(const Learner& learner, const ScenarioConfig& scenario,
                           int episodes, std::uint64_t seed,
                           std::vector<EpisodeEval>* per_episode = nullptr) {
    scenario.validate();
    if (episodes < 1) throw contract_error("evaluate: episodes must be >= 1");
    if (scenario.agents != learner.n_agents())
        throw contract_error("evaluate: learner/scenario agent count mismatch");
    Rng profile_rng = Rng::stream(seed, "eval-profiles");
    const int horizon = scenario.horizon;

    EvalReport report;
    report.per_agent_cost.assign(scenario.agents, 0.0);
    report.mean_price_by_hour.assign(static_cast<std::size_t>(horizon), 0.0);
    report.mean_demand_by_hour.assign(static_cast<std::size_t>(horizon), 0.0);
    const double inv_e = 1.0 / static_cast<double>(episodes);

    for (int e = 0; e < episodes; ++e) {
        const std::vector<EvProfile> profiles = scenario.draw_profiles(profile_rng);
        const RolloutTrace trace = rollout(learner, scenario, profiles);

        EpisodeEval ev;
        const auto [lo, hi] = charging_window(profiles);
        ev.par_full_day = detail::par_or_zero(trace.totals_by_hour, 0, horizon);
        ev.par_charging_phase = detail::par_or_zero(trace.totals_by_hour, lo, hi);
        const EpisodeCosts costs =
            episode_costs(trace.actions_by_hour, trace.totals_by_hour, scenario.price);
        ev.network_cost = costs.network;
        ev.per_agent_cost = costs.per_agent;
        ev.satisfaction_rate =
            satisfaction(trace.final_batteries, profiles, scenario.satisfaction_tol);
        ev.all_satisfied = ev.satisfaction_rate == 1.0;

        report.par_full_day += ev.par_full_day * inv_e;
        report.par_charging_phase += ev.par_charging_phase * inv_e;
        report.total_network_cost += ev.network_cost * inv_e;
        for (std::size_t i = 0; i < scenario.agents; ++i)
            report.per_agent_cost[i] += ev.per_agent_cost[i] * inv_e;
        report.satisfaction_rate += ev.satisfaction_rate * inv_e;
        for (int h = 0; h < horizon; ++h) {
            report.mean_price_by_hour[h] += trace.price_by_hour[h] * inv_e;
            report.mean_demand_by_hour[h] += trace.totals_by_hour[h] * inv_e;
        }
        if (per_episode) per_episode->push_back(std::move(ev));
    }
    double cost_sum = 0.0;
    for (double c : report.per_agent_cost) cost_sum += c;
    report.mean_agent_cost = cost_sum / static_cast<double>(scenario.agents);
    return report;
}

}  // namespace evmarl
