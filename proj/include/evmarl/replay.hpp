#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/rng.hpp"

namespace evmarl {

// One joint experience tuple: every agent's (normalized) observation before
// and after the step, the actions the grid actually saw, and per-agent
// rewards. Never averaged across agents.
struct Transition {
    std::vector<std::vector<double>> obs;       // N x obs_dim
    std::vector<double> actions;                // N, kW after plug masking
    std::vector<double> rewards;                // N
    std::vector<std::vector<double>> next_obs;  // N x obs_dim
    bool done = false;

    bool all_finite() const {
        auto vec_ok = [](const std::vector<double>& v) {
            for (double x : v)
                if (!std::isfinite(x)) return false;
            return true;
        };
        for (const auto& o : obs)
            if (!vec_ok(o)) return false;
        for (const auto& o : next_obs)
            if (!vec_ok(o)) return false;
        return vec_ok(actions) && vec_ok(rewards);
    }
};

// Fixed-capacity FIFO ring, sampled uniformly with replacement.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw config_error("replay: capacity must be > 0");
        ring_.reserve(capacity);
    }

    void store(Transition t) {
        if (!t.all_finite()) throw contract_error("replay: non-finite transition");
        if (ring_.size() < capacity_) {
            ring_.push_back(std::move(t));
        } else {
            ring_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }

    // Logical indexing, oldest first.
    const Transition& at(std::size_t i) const {
        if (i >= ring_.size()) throw contract_error("replay: index out of range");
        return ring_[(head_ + i) % ring_.size()];
    }

    void sample(Rng& rng, std::size_t k, std::vector<const Transition*>& out) const {
        if (k > ring_.size())
            throw contract_error("replay: sampling " + std::to_string(k) +
                                 " from buffer of size " + std::to_string(ring_.size()));
        out.resize(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = &ring_[rng.index(ring_.size())];
    }

  private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next slot to overwrite once full
    std::vector<Transition> ring_;
};

}  // namespace evmarl
