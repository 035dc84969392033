// Exhaustively solves a two-EV, three-hour toy instance (729 joint
// schedules) and prints the cost-optimal charging plan.

#include <cstdio>

#include "evmarl/oracle.hpp"

int main() {
    using namespace evmarl;

    OracleInstance inst;
    inst.horizon = 3;
    inst.action_grid = {0, 5, 10};
    inst.price_model = PriceModel::uniform(3, 0.01, 0.05, 0.01);
    EvProfile p;
    p.arrival_hour = 0;
    p.departure_hour = 3;
    p.battery_at_arrival = 5;
    p.expected_battery = 15;
    p.capacity = 70;
    p.efficiency = 1.0;
    p.max_rate = 10;
    inst.profiles = {p, p};

    const OracleSolution sol = solve(inst);
    std::printf("enumerated %llu joint schedules, %llu feasible\n",
                static_cast<unsigned long long>(inst.enumeration_size()),
                static_cast<unsigned long long>(sol.feasible_count));
    std::printf("optimal cost %.4f, PAR %.4f\n\n", sol.cost, sol.par);

    std::printf("hour ");
    for (std::size_t i = 0; i < sol.schedule.size(); ++i) std::printf("   ev_%zu", i);
    std::printf("   total\n");
    for (int h = 0; h < inst.horizon; ++h) {
        std::printf("%4d ", h);
        for (const auto& row : sol.schedule) std::printf(" %6.1f", row[h]);
        std::printf("  %6.1f\n", sol.totals_by_hour[h]);
    }
    return 0;
}
