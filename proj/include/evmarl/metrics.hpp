#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/pricing.hpp"
#include "evmarl/profile.hpp"

namespace evmarl {

// PAR = T * max_t(L_t) / sum_t(L_t). Undefined on an all-zero series; that
// is an error, not a sentinel.
inline double par(const std::vector<double>& demand) {
    if (demand.empty()) throw contract_error("par: empty demand series");
    double mx = 0.0, sum = 0.0;
    for (double v : demand) {
        if (!(v >= 0.0)) throw contract_error("par: negative or non-finite demand");
        mx = std::max(mx, v);
        sum += v;
    }
    if (sum == 0.0) throw contract_error("par: all-zero demand series is undefined");
    return static_cast<double>(demand.size()) * mx / sum;
}

// Hour range [first, last) covering every agent's plug window; the window
// the charging-phase PAR is computed over.
inline std::pair<int, int> charging_window(const std::vector<EvProfile>& profiles) {
    if (profiles.empty()) throw contract_error("charging_window: no profiles");
    int lo = profiles[0].arrival_hour, hi = profiles[0].departure_hour;
    for (const auto& p : profiles) {
        lo = std::min(lo, p.arrival_hour);
        hi = std::max(hi, p.departure_hour);
    }
    return {lo, hi};
}

inline double par_window(const std::vector<double>& demand, int lo, int hi) {
    if (lo < 0 || hi > static_cast<int>(demand.size()) || lo >= hi)
        throw contract_error("par_window: bad hour range");
    return par(std::vector<double>(demand.begin() + lo, demand.begin() + hi));
}

struct EpisodeCosts {
    double network = 0;
    std::vector<double> per_agent;
};

// Recompute costs from a logged trace: network cost from the hourly totals,
// per-agent bills from the proportional split. The trace must be internally
// consistent (actions sum to totals).
inline EpisodeCosts episode_costs(const std::vector<std::vector<double>>& actions_by_hour,
                                  const std::vector<double>& totals_by_hour,
                                  const PriceModel& model, double dt = 1.0) {
    if (actions_by_hour.size() != totals_by_hour.size())
        throw contract_error("episode_costs: trace length mismatch");
    if (totals_by_hour.empty()) throw contract_error("episode_costs: empty trace");
    const std::size_t n = actions_by_hour[0].size();
    EpisodeCosts out;
    out.per_agent.assign(n, 0.0);
    for (std::size_t h = 0; h < totals_by_hour.size(); ++h) {
        const auto& acts = actions_by_hour[h];
        if (acts.size() != n) throw contract_error("episode_costs: ragged trace");
        double s = 0.0;
        for (double a : acts) s += a;
        if (std::abs(s - totals_by_hour[h]) > 1e-9 * std::max(1.0, std::abs(s)))
            throw contract_error("episode_costs: actions do not sum to logged total at hour " +
                                 std::to_string(h));
        const double total = totals_by_hour[h];
        out.network += network_cost(model, total, h, dt);
        for (std::size_t i = 0; i < n; ++i)
            out.per_agent[i] += billing_share(model, acts[i], total, h, dt);
    }
    return out;
}

// Fraction of agents whose terminal battery is within tol_fraction * B_exp
// of the expectation.
inline double satisfaction(const std::vector<double>& final_batteries,
                           const std::vector<EvProfile>& profiles, double tol_fraction) {
    if (tol_fraction < 0) throw contract_error("satisfaction: negative tolerance");
    if (final_batteries.size() != profiles.size())
        throw contract_error("satisfaction: battery/profile count mismatch");
    if (profiles.empty()) return 1.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const double gap = std::abs(final_batteries[i] - profiles[i].expected_battery);
        if (gap <= tol_fraction * profiles[i].expected_battery) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(profiles.size());
}

struct EvalReport {
    double par_full_day = 0;
    double par_charging_phase = 0;
    double total_network_cost = 0;
    std::vector<double> per_agent_cost;
    double mean_agent_cost = 0;
    double satisfaction_rate = 0;
    std::vector<double> mean_price_by_hour;
    std::vector<double> mean_demand_by_hour;

    bool all_finite() const {
        auto fin = [](double v) { return std::isfinite(v); };
        if (!fin(par_full_day) || !fin(par_charging_phase) || !fin(total_network_cost) ||
            !fin(mean_agent_cost) || !fin(satisfaction_rate))
            return false;
        for (double v : per_agent_cost)
            if (!fin(v)) return false;
        for (double v : mean_price_by_hour)
            if (!fin(v)) return false;
        for (double v : mean_demand_by_hour)
            if (!fin(v)) return false;
        return true;
    }
};

struct Summary {
    double mean = 0;
    double std = 0;  // sample standard deviation (n-1); 0 for a single value
};

inline Summary summarize(const std::vector<double>& xs) {
    if (xs.empty()) throw contract_error("summarize: empty input");
    Summary s;
    for (double v : xs) s.mean += v;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double v : xs) acc += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace evmarl
