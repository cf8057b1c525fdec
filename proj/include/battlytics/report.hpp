#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "battlytics/classification.hpp"
#include "battlytics/domain.hpp"

namespace battlytics {

/// Corpus-level tallies built from device profiles and behavior reports.
struct CorpusSummary {
    std::size_t devices = 0;
    std::map<Technique, std::size_t> techniques;
    std::map<Variant, std::size_t> variants;
    std::map<FuelGauge, std::size_t> fuel_gauges;
    std::vector<double> losses;  // devices with an estimate
    std::size_t users = 0;
    std::size_t charging_events = 0;
    std::size_t events_with_fluctuation = 0;
    std::size_t fluctuation_episodes = 0;
    std::size_t active_use_episodes = 0;
    std::map<int, std::size_t> fluctuation_levels;  // soc_low -> episode count
    std::size_t full_plugged_episodes = 0;
    std::size_t maintenance_cycles = 0;
    std::optional<double> wasted_energy_mah;
    HealthSummary health;

    void add(const DeviceProfile& profile);
    void add(const BehaviorReport& report, std::size_t user_charging_events);

    double technique_share(Technique t) const;
    double variant_share(Variant v) const;
    double fuel_gauge_share(FuelGauge f) const;
    /// Share of devices with a loss estimate whose loss lies in [lo, hi].
    double loss_share(double lo, double hi) const;
    /// Lowest fluctuation level at or above the given quantile of the episode distribution.
    std::optional<int> fluctuation_tail_level(double quantile) const;
};

nlohmann::json to_json(const CorpusSummary& summary, double tail_quantile);
std::string to_markdown(const CorpusSummary& summary, double tail_quantile);

}  // namespace battlytics
