#include "battlytics/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "battlytics/stats.hpp"

namespace battlytics {

namespace {

double share(std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

template <typename K>
std::size_t count_of(const std::map<K, std::size_t>& m, K key) {
    const auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
}

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
    return buf;
}

}  // namespace

void CorpusSummary::add(const DeviceProfile& p) {
    ++devices;
    ++techniques[p.technique];
    for (auto v : p.variants) ++variants[v];
    ++fuel_gauges[p.fuel_gauge];
    if (p.capacity_loss_pct) losses.push_back(*p.capacity_loss_pct);
}

void CorpusSummary::add(const BehaviorReport& r, std::size_t user_charging_events) {
    ++users;
    charging_events += user_charging_events;
    std::set<int> events;
    for (const auto& e : r.fluctuation_episodes) {
        ++fluctuation_episodes;
        if (e.active_use) ++active_use_episodes;
        ++fluctuation_levels[e.soc_low];
        events.insert(e.event_id);
    }
    events_with_fluctuation += events.size();
    for (const auto& e : r.full_plugged_episodes) {
        ++full_plugged_episodes;
        maintenance_cycles += static_cast<std::size_t>(e.maintenance_cycles);
    }
    if (r.wasted_energy_estimate) wasted_energy_mah = wasted_energy_mah.value_or(0.0) + *r.wasted_energy_estimate;
}

double CorpusSummary::technique_share(Technique t) const { return share(count_of(techniques, t), devices); }
double CorpusSummary::variant_share(Variant v) const { return share(count_of(variants, v), devices); }
double CorpusSummary::fuel_gauge_share(FuelGauge f) const { return share(count_of(fuel_gauges, f), devices); }

double CorpusSummary::loss_share(double lo, double hi) const {
    const auto n = std::count_if(losses.begin(), losses.end(), [&](double l) { return l >= lo && l <= hi; });
    return share(static_cast<std::size_t>(n), losses.size());
}

std::optional<int> CorpusSummary::fluctuation_tail_level(double quantile) const {
    if (fluctuation_episodes == 0) return std::nullopt;
    std::vector<double> levels;
    for (const auto& [lvl, n] : fluctuation_levels) levels.insert(levels.end(), n, lvl);
    return static_cast<int>(std::ceil(stats::quantile(std::move(levels), quantile)));
}

nlohmann::json to_json(const CorpusSummary& s, double tail_quantile) {
    nlohmann::json j;
    j["devices"] = s.devices;
    auto tech = nlohmann::json::object();
    for (auto t : {Technique::CcCv, Technique::Dlc, Technique::Quick, Technique::FastPulse, Technique::Unknown})
        tech[std::string(to_string(t))] = {{"count", count_of(s.techniques, t)}, {"share", s.technique_share(t)}};
    j["techniques"] = tech;
    auto var = nlohmann::json::object();
    for (auto v : {Variant::CvFirst, Variant::CcTail, Variant::FastRate})
        var[std::string(to_string(v))] = {{"count", count_of(s.variants, v)}, {"share", s.variant_share(v)}};
    j["variants"] = var;
    auto fg = nlohmann::json::object();
    for (auto f : {FuelGauge::CoulombCounter, FuelGauge::VoltageBased, FuelGauge::Inconclusive})
        fg[std::string(to_string(f))] = {{"count", count_of(s.fuel_gauges, f)}, {"share", s.fuel_gauge_share(f)}};
    j["fuel_gauges"] = fg;
    j["capacity_loss"] = {{"estimated", s.losses.size()},
                          {"share_1_to_10", s.loss_share(1.0, 10.0)},
                          {"share_below_1", s.loss_share(0.0, 1.0 - 1e-9)},
                          {"share_above_10", s.loss_share(10.0 + 1e-9, 1e9)}};
    if (!s.losses.empty()) j["capacity_loss"]["median"] = stats::median(s.losses);
    auto levels = nlohmann::json::object();
    for (const auto& [lvl, n] : s.fluctuation_levels) levels[std::to_string(lvl)] = n;
    const auto tail = s.fluctuation_tail_level(tail_quantile);
    j["behavior"] = {{"users", s.users},
                     {"charging_events", s.charging_events},
                     {"events_with_fluctuation", s.events_with_fluctuation},
                     {"fluctuation_event_share", share(s.events_with_fluctuation, s.charging_events)},
                     {"fluctuation_episodes", s.fluctuation_episodes},
                     {"active_use_episodes", s.active_use_episodes},
                     {"fluctuation_levels", levels},
                     {"tail_quantile", tail_quantile},
                     {"fluctuation_tail_level", tail ? nlohmann::json(*tail) : nlohmann::json(nullptr)},
                     {"full_plugged_episodes", s.full_plugged_episodes},
                     {"maintenance_cycles", s.maintenance_cycles},
                     {"wasted_energy_mah",
                      s.wasted_energy_mah ? nlohmann::json(*s.wasted_energy_mah) : nlohmann::json(nullptr)}};
    auto health = nlohmann::json::object();
    for (const auto& [h, r] : s.health)
        health[std::string(to_string(h))] = {{"voltage_min", r.voltage_min}, {"voltage_max", r.voltage_max},
                                             {"temp_min", r.temp_min},       {"temp_max", r.temp_max},
                                             {"count", r.count}};
    j["health"] = health;
    return j;
}

std::string to_markdown(const CorpusSummary& s, double tail_quantile) {
    std::ostringstream md;
    md << "# Battery analytics report\n\n";
    md << "Devices profiled: " << s.devices << "\n\n";

    md << "## Charging techniques\n\n| technique | devices | share |\n|---|---|---|\n";
    for (auto t : {Technique::CcCv, Technique::Dlc, Technique::Quick, Technique::FastPulse, Technique::Unknown})
        md << "| " << to_string(t) << " | " << count_of(s.techniques, t) << " | " << pct(s.technique_share(t)) << " |\n";

    md << "\n## Variants\n\n| variant | devices | share |\n|---|---|---|\n";
    for (auto v : {Variant::CvFirst, Variant::CcTail, Variant::FastRate})
        md << "| " << to_string(v) << " | " << count_of(s.variants, v) << " | " << pct(s.variant_share(v)) << " |\n";

    md << "\n## Fuel gauges\n\n| fuel gauge | devices | share |\n|---|---|---|\n";
    for (auto f : {FuelGauge::CoulombCounter, FuelGauge::VoltageBased, FuelGauge::Inconclusive})
        md << "| " << to_string(f) << " | " << count_of(s.fuel_gauges, f) << " | " << pct(s.fuel_gauge_share(f))
           << " |\n";

    md << "\n## Capacity loss\n\n";
    md << "Devices with an estimate: " << s.losses.size() << "\n\n";
    md << "- loss in [1, 10] %: " << pct(s.loss_share(1.0, 10.0)) << "\n";
    md << "- loss below 1 %: " << pct(s.loss_share(0.0, 1.0 - 1e-9)) << "\n";
    md << "- loss above 10 %: " << pct(s.loss_share(10.0 + 1e-9, 1e9)) << "\n";

    md << "\n## Charging behavior\n\n";
    md << "- charging events: " << s.charging_events << "\n";
    md << "- events with SOC fluctuation: " << s.events_with_fluctuation << " ("
       << pct(share(s.events_with_fluctuation, s.charging_events)) << ")\n";
    md << "- fluctuation episodes during active use: " << s.active_use_episodes << " of " << s.fluctuation_episodes
       << "\n";
    if (const auto tail = s.fluctuation_tail_level(tail_quantile))
        md << "- fluctuation level at the " << tail_quantile << " quantile: " << *tail << " %\n";
    md << "- full-plugged episodes with maintenance recharges: " << s.full_plugged_episodes << " ("
       << s.maintenance_cycles << " cycles)\n";
    if (s.wasted_energy_mah) md << "- estimated wasted energy: " << *s.wasted_energy_mah << " mAh\n";

    if (!s.health.empty()) {
        md << "\n## Battery health\n\n| health | voltage (mV) | temperature (C) | samples |\n|---|---|---|---|\n";
        for (const auto& [h, r] : s.health)
            md << "| " << to_string(h) << " | " << r.voltage_min << "-" << r.voltage_max << " | " << r.temp_min << "-"
               << r.temp_max << " | " << r.count << " |\n";
    }
    return md.str();
}

}  // namespace battlytics
