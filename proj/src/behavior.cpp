#include "battlytics/behavior.hpp"

#include <algorithm>
#include <stdexcept>

namespace battlytics {

namespace {

int event_id_at(std::span<const SampleLabel> labels, double timestamp) {
    const auto it = std::lower_bound(labels.begin(), labels.end(), timestamp,
                                     [](const SampleLabel& l, double t) { return l.timestamp < t; });
    if (it != labels.end() && it->timestamp == timestamp) return it->event_id;
    return it == labels.begin() ? 0 : std::prev(it)->event_id;
}

}  // namespace

std::vector<FluctuationEpisode> detect_fluctuation(std::span<const BatterySample> samples, double termination_c) {
    std::vector<FluctuationEpisode> episodes;
    const std::size_t n = samples.size();
    std::vector<SampleLabel> labels;
    bool labeled = false;

    std::size_t i = 0;
    while (i + 1 < n) {
        // First level change after i decides the candidate pair.
        std::size_t k = i + 1;
        while (k < n && samples[k].soc == samples[i].soc) ++k;
        if (k == n) break;
        if (std::abs(samples[k].soc - samples[i].soc) != 1) {
            i = k;
            continue;
        }
        const int low = std::min(samples[i].soc, samples[k].soc);
        std::size_t j = k;
        while (j + 1 < n && (samples[j + 1].soc == low || samples[j + 1].soc == low + 1)) ++j;

        int moves = 0;
        bool active = false;
        for (std::size_t m = i; m <= j; ++m) {
            if (m > i && samples[m].soc != samples[m - 1].soc) ++moves;
            active = active || samples[m].screen == Screen::On;
        }
        const int reversals = moves - 1;
        if (reversals >= 2) {
            if (!labeled) {
                labels = label_samples(pair_consecutive(samples), termination_c);
                labeled = true;
            }
            FluctuationEpisode ep;
            ep.event_id = event_id_at(labels, samples[i].timestamp);
            ep.soc_low = low;
            ep.soc_high = low + 1;
            ep.repetitions = reversals;
            ep.start_time = samples[i].timestamp;
            ep.end_time = samples[j].timestamp;
            ep.total_duration_s = ep.end_time - ep.start_time;
            ep.active_use = active;
            episodes.push_back(ep);
            i = j + 1;
        } else {
            i = j;
        }
    }
    return episodes;
}

std::vector<FullPluggedEpisode> detect_full_plugged(std::span<const BatterySample> samples) {
    std::vector<FullPluggedEpisode> episodes;
    const std::size_t n = samples.size();
    std::size_t i = 0;
    while (i < n) {
        if (!(samples[i].soc == 100 && samples[i].charging)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::size_t last = i;
        int cycles = 0;
        bool dipping = false;
        int dip_min = 100;
        ++i;
        for (; i < n && samples[i].charging; ++i) {
            last = i;
            const int soc = samples[i].soc;
            if (soc < 100) {
                dip_min = dipping ? std::min(dip_min, soc) : soc;
                dipping = true;
            } else if (dipping) {
                if (dip_min >= 98) ++cycles;
                dipping = false;
            }
        }
        const double duration = samples[last].timestamp - samples[start].timestamp;
        if (duration > 0.0) episodes.push_back({samples[start].timestamp, duration, cycles, std::nullopt});
    }
    return episodes;
}

double estimate_wasted_energy(const FullPluggedEpisode& episode, double nominal_capacity_mah,
                              double maintenance_pct_per_cycle) {
    if (!(nominal_capacity_mah > 0.0)) throw std::invalid_argument("nominal capacity must be positive");
    return episode.maintenance_cycles * (maintenance_pct_per_cycle / 100.0) * nominal_capacity_mah;
}

BehaviorReport analyze_behavior(std::span<const BatterySample> samples, const BehaviorConfig& config) {
    BehaviorReport report;
    if (!samples.empty()) {
        report.user_id = samples.front().user_id;
        report.model = samples.front().model;
    }
    const auto plugged = detect_full_plugged(samples);
    // 99/100 alternation while sitting on the charger is maintenance, not fluctuation.
    for (auto& f : detect_fluctuation(samples, config.termination_c)) {
        const bool maintenance = f.soc_high == 100 && std::any_of(plugged.begin(), plugged.end(), [&](const auto& p) {
                                     return f.start_time <= p.start_time + p.duration_s && f.end_time >= p.start_time;
                                 });
        if (!maintenance) report.fluctuation_episodes.push_back(f);
    }
    for (auto ep : plugged) {
        if (ep.maintenance_cycles < 1) continue;
        if (config.capacity_mah)
            ep.wasted_energy_mah = estimate_wasted_energy(ep, *config.capacity_mah, config.maintenance_pct_per_cycle);
        report.full_plugged_episodes.push_back(ep);
    }
    if (config.capacity_mah) {
        double total = 0.0;
        for (const auto& ep : report.full_plugged_episodes) total += ep.wasted_energy_mah.value_or(0.0);
        report.wasted_energy_estimate = total;
    }
    return report;
}

}  // namespace battlytics
