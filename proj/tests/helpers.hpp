#pragma once

#include <string>
#include <vector>

#include "battlytics/domain.hpp"
#include "battlytics/segmentation.hpp"

namespace testing {

inline battlytics::BatterySample sample(double t, int soc, int voltage = 4000, double temp = 30.0,
                                        std::string user = "u1") {
    battlytics::BatterySample s;
    s.timestamp = t;
    s.user_id = std::move(user);
    s.model = "m1";
    s.soc = soc;
    s.voltage_mv = voltage;
    s.temperature_c = temp;
    return s;
}

/// Samples at the given soc levels, `dt` seconds apart.
inline std::vector<battlytics::BatterySample> ramp(const std::vector<int>& socs, double dt = 72.0, double t0 = 1000.0) {
    std::vector<battlytics::BatterySample> out;
    for (std::size_t i = 0; i < socs.size(); ++i) out.push_back(sample(t0 + dt * static_cast<double>(i), socs[i]));
    return out;
}

/// Steps with the given C-rates, one percent each.
inline std::vector<battlytics::ChargeStep> steps_with_rates(const std::vector<double>& rates) {
    std::vector<battlytics::BatterySample> s{sample(0.0, 1)};
    for (double r : rates) {
        const auto& last = s.back();
        s.push_back(sample(last.timestamp + 36.0 / r, last.soc + 1));
    }
    return battlytics::pair_consecutive(s);
}

}  // namespace testing
