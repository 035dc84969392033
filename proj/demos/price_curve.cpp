// Prints the network price and the proportional bill split for a slot as
// total load rises: the convexity that makes valley-filling pay off.

#include <cstdio>

#include "evmarl/pricing.hpp"

int main() {
    using namespace evmarl;
    const PriceModel model = PriceModel::uniform(24, 0.01, 0.05, 0.01);

    std::printf("%8s %10s %12s %16s\n", "load_kw", "price", "network_cost", "bill_for_5kw");
    for (double load = 5.0; load <= 30.0; load += 5.0) {
        const double f = price(model, load, 0);
        const double c = network_cost(model, load, 0);
        const double bill = billing_share(model, 5.0, load, 0);
        std::printf("%8.1f %10.4f %12.4f %16.4f\n", load, f, c, bill);
    }

    std::printf("\nsplitting 20 kW on one slot vs 10+10 on two:\n");
    const double peaky = network_cost(model, 20.0, 0) + network_cost(model, 0.0, 1);
    const double flat = network_cost(model, 10.0, 0) + network_cost(model, 10.0, 1);
    std::printf("  peaky %.4f  flat %.4f  saved %.4f\n", peaky, flat, peaky - flat);
    return 0;
}
