#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/env.hpp"
#include "evmarl/metrics.hpp"
#include "evmarl/pricing.hpp"
#include "evmarl/profile.hpp"

namespace evmarl {

// A frozen, fully deterministic instance small enough to enumerate.
struct OracleInstance {
    std::vector<EvProfile> profiles;
    PriceModel price_model;
    int horizon = 0;
    std::vector<double> action_grid;  // allowed charge rates, must include 0
    double feasibility_tol = 0.5;     // kWh slack on the B_exp requirement
    std::uint64_t enumeration_cap = 10000000;

    void validate() const {
        if (profiles.empty()) throw config_error("oracle: no profiles");
        if (horizon < 1) throw config_error("oracle: horizon must be >= 1");
        if (static_cast<int>(price_model.horizon()) < horizon)
            throw config_error("oracle: price coefficients do not cover the horizon");
        price_model.validate();
        for (const auto& p : profiles) p.validate(horizon);
        if (action_grid.empty()) throw config_error("oracle: empty action grid");
        if (!std::is_sorted(action_grid.begin(), action_grid.end()))
            throw config_error("oracle: action grid must be sorted ascending");
        if (std::adjacent_find(action_grid.begin(), action_grid.end()) != action_grid.end())
            throw config_error("oracle: duplicate grid value");
        if (action_grid.front() != 0.0) throw config_error("oracle: grid must contain 0");
        for (double g : action_grid)
            for (const auto& p : profiles)
                if (g > p.max_rate)
                    throw config_error("oracle: grid value exceeds an agent's max rate");
        if (feasibility_tol < 0) throw config_error("oracle: feasibility_tol must be >= 0");
        if (enumeration_cap < 1) throw config_error("oracle: enumeration_cap must be >= 1");
    }

    // Joint enumeration size: |grid| ^ (total plugged slots), saturating at
    // cap + 1 so oversized instances are rejected without overflow.
    std::uint64_t enumeration_size() const {
        std::uint64_t total = 1;
        const auto g = static_cast<std::uint64_t>(action_grid.size());
        for (const auto& p : profiles) {
            const int lo = std::max(0, p.arrival_hour);
            const int hi = std::min(horizon, p.departure_hour);
            for (int h = lo; h < hi; ++h) {
                if (total > enumeration_cap / g) return enumeration_cap + 1;
                total *= g;
            }
        }
        return total;
    }
};

struct OracleSolution {
    std::vector<std::vector<double>> schedule;  // [agent][hour] kW, zero off-window
    std::vector<double> totals_by_hour;         // L_h
    double cost = 0;
    double par = 0;  // 0 if the optimal schedule draws nothing at all
    std::uint64_t feasible_count = 0;           // exact: pruning only cuts infeasible branches
};

inline double snap_to_grid(double value, const std::vector<double>& grid) {
    double best = grid.front();
    double best_gap = std::abs(value - grid.front());
    for (double g : grid) {
        const double gap = std::abs(value - g);
        if (gap < best_gap) {
            best = g;
            best_gap = gap;
        }
    }
    return best;
}

// True iff the schedule uses only grid actions inside plug windows, nothing
// outside them, and every agent reaches B_exp - tol.
inline bool check_feasible(const std::vector<std::vector<double>>& schedule,
                           const OracleInstance& inst) {
    const std::size_t n = inst.profiles.size();
    if (schedule.size() != n) throw contract_error("check_feasible: agent count mismatch");
    for (const auto& row : schedule)
        if (row.size() != static_cast<std::size_t>(inst.horizon))
            throw contract_error("check_feasible: schedule horizon mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        const EvProfile& p = inst.profiles[i];
        double b = p.battery_at_arrival;
        for (int h = 0; h < inst.horizon; ++h) {
            const double a = schedule[i][h];
            const bool plugged = p.arrival_hour <= h && h < p.departure_hour;
            if (!plugged) {
                if (a != 0.0) return false;
                continue;
            }
            bool on_grid = false;
            for (double g : inst.action_grid)
                if (std::abs(a - g) <= 1e-9) {
                    on_grid = true;
                    break;
                }
            if (!on_grid) return false;
            b = battery_update(b, a, p.efficiency, 1.0, p.capacity);
        }
        if (b < p.expected_battery - inst.feasibility_tol) return false;
    }
    return true;
}

// Cost + PAR of an arbitrary (not necessarily feasible) schedule under the
// instance's price model.
inline std::pair<double, double> schedule_cost_par(
    const std::vector<std::vector<double>>& schedule, const OracleInstance& inst) {
    double cost = 0.0;
    std::vector<double> totals(static_cast<std::size_t>(inst.horizon), 0.0);
    for (int h = 0; h < inst.horizon; ++h) {
        for (const auto& row : schedule) totals[h] += row[h];
        cost += network_cost(inst.price_model, totals[h], static_cast<std::size_t>(h));
    }
    double mx = 0.0;
    for (double v : totals) mx = std::max(mx, v);
    const double p = mx == 0.0 ? 0.0 : par(totals);
    return {cost, p};
}

namespace detail {

struct OracleSlot {
    int hour = 0;
    std::size_t agent = 0;
    bool last_of_hour = false;
};

// Depth-first walk over plugged (hour, agent) slots in hour-major order.
// Zero-load hours cost exactly zero, so the running cost only accrues when
// an hour's last slot is assigned.
struct OracleSearch {
    const OracleInstance& inst;
    std::vector<OracleSlot> slots;
    std::vector<std::vector<double>> schedule;
    std::vector<double> battery;
    std::vector<int> slots_left;
    std::vector<double> hour_load;
    std::uint64_t feasible = 0;

    bool have_best = false;
    double best_cost = 0, best_par = 0;
    std::vector<std::vector<double>> best_schedule;
    std::vector<double> best_totals;

    explicit OracleSearch(const OracleInstance& i) : inst(i) {}

    static bool lex_less(const std::vector<std::vector<double>>& a,
                         const std::vector<std::vector<double>>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t h = 0; h < a[i].size(); ++h) {
                if (a[i][h] < b[i][h]) return true;
                if (a[i][h] > b[i][h]) return false;
            }
        return false;
    }

    void consider_leaf(double cost) {
        for (std::size_t i = 0; i < inst.profiles.size(); ++i)
            if (battery[i] < inst.profiles[i].expected_battery - inst.feasibility_tol)
                return;
        ++feasible;
        double mx = 0.0;
        for (double v : hour_load) mx = std::max(mx, v);
        const double p = mx == 0.0 ? 0.0 : par(hour_load);
        if (!have_best || cost < best_cost ||
            (cost == best_cost &&
             (p < best_par || (p == best_par && lex_less(schedule, best_schedule))))) {
            have_best = true;
            best_cost = cost;
            best_par = p;
            best_schedule = schedule;
            best_totals = hour_load;
        }
    }

    void dfs(std::size_t s, double partial_cost) {
        if (s == slots.size()) {
            consider_leaf(partial_cost);
            return;
        }
        const OracleSlot& slot = slots[s];
        const EvProfile& p = inst.profiles[slot.agent];
        const double g_max = inst.action_grid.back();
        for (double a : inst.action_grid) {
            const double b_before = battery[slot.agent];
            const double b_after =
                battery_update(b_before, a, p.efficiency, 1.0, p.capacity);
            // Remaining-charge bound: can the rest of this agent's window
            // still reach the target? Cuts only branches with no feasible
            // completion, keeping the feasible count exact.
            const double need = p.expected_battery - inst.feasibility_tol - b_after;
            if (need > p.efficiency * g_max *
                           static_cast<double>(slots_left[slot.agent] - 1))
                continue;

            battery[slot.agent] = b_after;
            slots_left[slot.agent] -= 1;
            schedule[slot.agent][slot.hour] = a;
            hour_load[slot.hour] += a;

            double next_cost = partial_cost;
            if (slot.last_of_hour)
                next_cost += network_cost(inst.price_model, hour_load[slot.hour],
                                          static_cast<std::size_t>(slot.hour));
            dfs(s + 1, next_cost);

            hour_load[slot.hour] -= a;
            schedule[slot.agent][slot.hour] = 0.0;
            slots_left[slot.agent] += 1;
            battery[slot.agent] = b_before;
        }
    }
};

}  // namespace detail

// Exhaustive minimum-cost joint schedule. Ties broken by lower PAR, then by
// lexicographic order of the [agent][hour] matrix, so the result is total
// and deterministic.
inline OracleSolution solve(const OracleInstance& inst) {
    inst.validate();
    if (inst.enumeration_size() > inst.enumeration_cap)
        throw config_error("oracle: enumeration size exceeds cap of " +
                           std::to_string(inst.enumeration_cap));

    const std::size_t n = inst.profiles.size();
    detail::OracleSearch search(inst);
    search.schedule.assign(n, std::vector<double>(static_cast<std::size_t>(inst.horizon), 0.0));
    search.battery.resize(n);
    search.slots_left.assign(n, 0);
    search.hour_load.assign(static_cast<std::size_t>(inst.horizon), 0.0);

    const double g_max = inst.action_grid.back();
    for (std::size_t i = 0; i < n; ++i) {
        const EvProfile& p = inst.profiles[i];
        search.battery[i] = p.battery_at_arrival;
        search.slots_left[i] = std::max(0, p.departure_hour - p.arrival_hour);
        const double reachable =
            p.efficiency * g_max * static_cast<double>(search.slots_left[i]);
        if (p.expected_battery - inst.feasibility_tol - p.battery_at_arrival > reachable)
            throw infeasible_error("oracle: agent " + std::to_string(i) +
                                   " cannot reach its target within its window");
    }
    for (int h = 0; h < inst.horizon; ++h)
        for (std::size_t i = 0; i < n; ++i) {
            const EvProfile& p = inst.profiles[i];
            if (p.arrival_hour <= h && h < p.departure_hour)
                search.slots.push_back({h, i, false});
        }
    for (std::size_t s = 0; s < search.slots.size(); ++s)
        if (s + 1 == search.slots.size() || search.slots[s + 1].hour != search.slots[s].hour)
            search.slots[s].last_of_hour = true;

    search.dfs(0, 0.0);
    if (!search.have_best)
        throw infeasible_error("oracle: no feasible schedule reaches every target");

    OracleSolution sol;
    sol.schedule = std::move(search.best_schedule);
    sol.totals_by_hour = std::move(search.best_totals);
    sol.cost = search.best_cost;
    double mx = 0.0;
    for (double v : sol.totals_by_hour) mx = std::max(mx, v);
    sol.par = mx == 0.0 ? 0.0 : par(sol.totals_by_hour);
    sol.feasible_count = search.feasible;
    return sol;
}

}  // namespace evmarl
