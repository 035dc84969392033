#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/rng.hpp"

namespace evmarl {

// One EV owner's behavior and battery parameters for a day.
struct EvProfile {
    int arrival_hour = 0;          // h^arr
    int departure_hour = 0;        // h^dep (exclusive; plugged while h < dep)
    double battery_at_arrival = 0; // B^arr, kWh
    double expected_battery = 0;   // B^exp, kWh
    double capacity = 0;           // C, kWh
    double efficiency = 1.0;       // eta in (0, 1]
    double max_rate = 0;           // a^max, kW

    void validate(int horizon) const {
        if (!(0 <= arrival_hour && arrival_hour < departure_hour &&
              departure_hour <= horizon))
            throw contract_error("profile: need 0 <= arrival < departure <= horizon");
        if (!(0.0 <= battery_at_arrival && battery_at_arrival <= expected_battery &&
              expected_battery <= capacity))
            throw contract_error("profile: need 0 <= B_arr <= B_exp <= capacity");
        if (!(efficiency > 0.0 && efficiency <= 1.0))
            throw contract_error("profile: efficiency must be in (0, 1]");
        if (!(max_rate > 0.0)) throw contract_error("profile: max_rate must be > 0");
    }
};

// A truncated normal: N(mean, std^2) resampled until it lands in [lo, hi].
struct FieldSpec {
    double mean = 0;
    double std = 0;
    double lo = 0;
    double hi = 0;
};

// Distribution of owner behavior plus the fixed physical constants shared
// by every sampled profile.
struct BehaviorTable {
    FieldSpec arrival{9.0, 1.0, 7.0, 12.0};
    FieldSpec departure{18.0, 1.0, 16.0, 20.0};
    FieldSpec expected_battery{55.0, 1.0, 45.0, 65.0};
    FieldSpec battery_at_arrival{5.5, 1.0, 4.5, 6.0};
    double capacity = 70.0;
    double efficiency = 0.9;
    double max_rate = 10.0;

    void validate() const {
        auto check = [](const FieldSpec& f, const char* name) {
            if (!(f.std >= 0.0) || !(f.lo <= f.hi))
                throw config_error(std::string("behavior table: bad spec for ") + name);
        };
        check(arrival, "arrival");
        check(departure, "departure");
        check(expected_battery, "expected_battery");
        check(battery_at_arrival, "battery_at_arrival");
        // Bounds that make the profile invariants unsatisfiable are rejected
        // up front rather than spinning in the resample loop.
        if (arrival.lo >= departure.hi)
            throw config_error("behavior table: arrival lower bound >= departure upper bound");
        if (battery_at_arrival.lo > expected_battery.hi)
            throw config_error("behavior table: arrival battery bound above expected battery bound");
        if (expected_battery.lo > capacity)
            throw config_error("behavior table: expected battery lower bound exceeds capacity");
        if (!(efficiency > 0.0 && efficiency <= 1.0))
            throw config_error("behavior table: efficiency must be in (0, 1]");
        if (!(max_rate > 0.0))
            throw config_error("behavior table: max_rate must be > 0");
        if (!(capacity > 0.0))
            throw config_error("behavior table: capacity must be > 0");
    }
};

namespace detail {

inline constexpr int kResampleCap = 1000;

inline double sample_trunc(Rng& rng, const FieldSpec& f, const char* name) {
    for (int i = 0; i < kResampleCap; ++i) {
        double x = rng.normal(f.mean, f.std);
        if (f.lo <= x && x <= f.hi) return x;
    }
    throw config_error(std::string("behavior table: resample cap hit for ") + name);
}

inline int sample_trunc_hour(Rng& rng, const FieldSpec& f, const char* name) {
    for (int i = 0; i < kResampleCap; ++i) {
        long x = std::lround(rng.normal(f.mean, f.std));
        if (f.lo <= static_cast<double>(x) && static_cast<double>(x) <= f.hi)
            return static_cast<int>(x);
    }
    throw config_error(std::string("behavior table: resample cap hit for ") + name);
}

}  // namespace detail

// Draw n owner profiles from the table. Hours round to integers; every field
// is rejection-resampled into its bounds, and pairs that would break a
// profile invariant (arrival >= departure, B_arr > B_exp) are redrawn.
inline std::vector<EvProfile> sample_profiles(Rng& rng, std::size_t n,
                                              const BehaviorTable& table) {
    if (n == 0) throw contract_error("sample_profiles: n must be >= 1");
    table.validate();
    std::vector<EvProfile> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        EvProfile p;
        p.capacity = table.capacity;
        p.efficiency = table.efficiency;
        p.max_rate = table.max_rate;
        int tries = 0;
        for (;; ++tries) {
            if (tries >= detail::kResampleCap)
                throw config_error("behavior table: resample cap hit for arrival/departure pair");
            p.arrival_hour = detail::sample_trunc_hour(rng, table.arrival, "arrival");
            p.departure_hour = detail::sample_trunc_hour(rng, table.departure, "departure");
            if (p.arrival_hour < p.departure_hour) break;
        }
        tries = 0;
        for (;; ++tries) {
            if (tries >= detail::kResampleCap)
                throw config_error("behavior table: resample cap hit for battery pair");
            p.battery_at_arrival =
                detail::sample_trunc(rng, table.battery_at_arrival, "battery_at_arrival");
            p.expected_battery =
                detail::sample_trunc(rng, table.expected_battery, "expected_battery");
            if (p.battery_at_arrival <= p.expected_battery &&
                p.expected_battery <= table.capacity)
                break;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace evmarl
