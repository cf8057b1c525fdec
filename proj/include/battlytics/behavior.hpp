#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "battlytics/domain.hpp"
#include "battlytics/segmentation.hpp"

namespace battlytics {

struct BehaviorConfig {
    double maintenance_pct_per_cycle = 1.5;  // midpoint of a 1-2 % recharge window
    std::optional<double> capacity_mah;
    double termination_c = kDefaultTerminationC;  // used to attach event ids
};

/// Runs where the level alternates between two adjacent values L and L+1 with
/// at least two direction reversals. Expects raw, time-sorted samples of one user.
std::vector<FluctuationEpisode> detect_fluctuation(std::span<const BatterySample> samples,
                                                   double termination_c = kDefaultTerminationC);

/// Periods spent plugged in at 100 %. An episode opens at the first charging
/// sample at 100 % and lasts until the last charging sample before the charger
/// is removed (or the data ends). Episodes of zero duration are not reported.
std::vector<FullPluggedEpisode> detect_full_plugged(std::span<const BatterySample> samples);

/// cycles * pct/100 * capacity. Throws std::invalid_argument if capacity <= 0.
double estimate_wasted_energy(const FullPluggedEpisode& episode, double nominal_capacity_mah,
                              double maintenance_pct_per_cycle = 1.5);

/// Fluctuation episodes (minus 99/100 alternation inside a full-plugged period)
/// plus the full-plugged episodes that needed at least one maintenance recharge.
BehaviorReport analyze_behavior(std::span<const BatterySample> samples, const BehaviorConfig& config = {});

}  // namespace battlytics
