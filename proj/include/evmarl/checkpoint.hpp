#pragma once

#include <fstream>
#include <string>

#include "evmarl/agent.hpp"
#include "evmarl/common.hpp"
#include "evmarl/nn_io.hpp"
#include "evmarl/trainer.hpp"

namespace evmarl {

inline constexpr int kCheckpointVersion = 1;

// One file per run: every agent's four networks plus both optimizer states,
// preceded by a manifest. Round-trips are bit-exact.
inline void save_checkpoint(const Learner& learner, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("checkpoint: cannot open for writing: " + path);
    os << "evmarl-checkpoint " << kCheckpointVersion << '\n';
    os << "algo " << algo_name(learner.algo) << '\n';
    os << "agents " << learner.n_agents() << '\n';
    os << "obs_dim " << learner.obs_dim << '\n';
    os << "gamma ";
    io::put_f64(os, learner.gamma);
    os << "\ntau ";
    io::put_f64(os, learner.tau);
    os << '\n';
    io::write_array(os, "a_max", learner.a_max.data(), learner.a_max.size());
    for (std::size_t i = 0; i < learner.n_agents(); ++i) {
        const AgentNets& a = learner.agents[i];
        os << "agent " << i << '\n';
        write_mlp(os, a.actor);
        write_mlp(os, a.critic);
        write_mlp(os, a.actor_target);
        write_mlp(os, a.critic_target);
        write_adam(os, a.actor_opt);
        write_adam(os, a.critic_opt);
    }
    os << "end\n";
    if (!os) throw config_error("checkpoint: write failed: " + path);
}

inline Learner load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("checkpoint: cannot open: " + path);
    io::TokenReader r{is};
    r.expect("evmarl-checkpoint");
    const auto version = r.u64();
    if (version != kCheckpointVersion)
        throw config_error("checkpoint: unsupported format version " +
                           std::to_string(version));
    Learner learner;
    r.expect("algo");
    learner.algo = algo_from_name(r.next());
    r.expect("agents");
    const auto n = r.u64();
    if (n < 1 || n > 100000) throw config_error("checkpoint: implausible agent count");
    r.expect("obs_dim");
    learner.obs_dim = static_cast<int>(r.u64());
    r.expect("gamma");
    learner.gamma = r.f64();
    r.expect("tau");
    learner.tau = r.f64();
    learner.a_max.resize(n);
    io::read_array(r, "a_max", learner.a_max.data(), n);

    const int want_critic_in = critic_input_dim(learner.algo, learner.obs_dim, n);
    learner.agents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.expect("agent");
        if (r.u64() != i) throw config_error("checkpoint: agent manifest out of order");
        AgentNets a;
        a.actor = read_mlp(r);
        a.critic = read_mlp(r);
        a.actor_target = read_mlp(r);
        a.critic_target = read_mlp(r);
        a.actor_opt = read_adam(r, a.actor);
        a.critic_opt = read_adam(r, a.critic);
        if (a.actor.input_dim() != learner.obs_dim || a.actor.output_dim() != 1)
            throw config_error("checkpoint: agent " + std::to_string(i) +
                               " actor dimensions do not match the manifest");
        if (a.critic.input_dim() != want_critic_in)
            throw config_error("checkpoint: agent " + std::to_string(i) +
                               " critic input does not match algo/agent count");
        if (a.actor_target.layer_sizes != a.actor.layer_sizes ||
            a.critic_target.layer_sizes != a.critic.layer_sizes)
            throw config_error("checkpoint: target/main shape mismatch");
        learner.agents.push_back(std::move(a));
    }
    r.expect("end");
    return learner;
}

}  // namespace evmarl
