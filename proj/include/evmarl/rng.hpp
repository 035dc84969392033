#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "evmarl/common.hpp"

namespace evmarl {

// Seeded random source. Thin wrapper over mt19937_64 so every draw site
// goes through one type and named substreams can be split off a run seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Independent substream for a named purpose ("profiles", "noise", ...).
    static Rng stream(std::uint64_t seed, std::string_view tag) {
        return Rng(derive_seed(seed, tag));
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    double normal(double mean, double stddev) {
        if (stddev == 0.0) return mean;
        return std::normal_distribution<double>(mean, stddev)(gen_);
    }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace evmarl
