#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evmarl/common.hpp"

namespace evmarl {

// Quadratic per-hour electricity price F_h(L) = a_h L^2 + b_h L + c_h.
// a_h > 0 with b_h, c_h >= 0 makes the price strictly increasing and
// strictly convex on L >= 0, which the billing derivation relies on.
struct HourCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct PriceModel {
    std::vector<HourCoeffs> coefficients;  // one triple per hour
    double kappa = 1.0;                    // billing constant

    std::size_t horizon() const { return coefficients.size(); }

    // Uniform coefficients across `horizon` hours.
    static PriceModel uniform(std::size_t horizon, double a, double b, double c,
                              double kappa = 1.0) {
        PriceModel m;
        m.coefficients.assign(horizon, HourCoeffs{a, b, c});
        m.kappa = kappa;
        return m;
    }

    void validate() const {
        if (coefficients.empty())
            throw config_error("price model: no hourly coefficients");
        for (std::size_t h = 0; h < coefficients.size(); ++h) {
            const auto& k = coefficients[h];
            if (!(k.a > 0.0) || !(k.b >= 0.0) || !(k.c >= 0.0))
                throw config_error("price model: hour " + std::to_string(h) +
                                   " needs a > 0, b >= 0, c >= 0");
        }
        if (!(kappa > 0.0)) throw config_error("price model: kappa must be > 0");
    }
};

// Unit price F_h at total network load `load` (kW).
inline double price(const PriceModel& model, double load, std::size_t hour) {
    if (load < 0.0) throw contract_error("price: negative load");
    if (hour >= model.horizon()) throw contract_error("price: hour out of range");
    const auto& k = model.coefficients[hour];
    return k.a * load * load + k.b * load + k.c;
}

// Network cost over one slot of width dt hours: unit price times energy.
inline double network_cost(const PriceModel& model, double load, std::size_t hour,
                           double dt = 1.0) {
    if (!(dt > 0.0)) throw contract_error("network_cost: dt must be > 0");
    return price(model, load, hour) * load * dt;
}

// User's share of the slot cost under proportional billing:
// b_m = kappa * (l_m / L) * C_h(L). The all-idle slot is the defined limit 0.
inline double billing_share(const PriceModel& model, double own_load,
                            double total_load, std::size_t hour, double dt = 1.0) {
    if (own_load < 0.0) throw contract_error("billing_share: negative own load");
    if (own_load > total_load)
        throw contract_error("billing_share: own load exceeds total load");
    if (total_load == 0.0) return 0.0;
    return model.kappa * (own_load / total_load) *
           network_cost(model, total_load, hour, dt);
}

}  // namespace evmarl
