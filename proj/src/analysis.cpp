#include "battlytics/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace battlytics {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

std::set<Health> parse_health_set(const json& j) {
    std::set<Health> out;
    for (const auto& h : j) out.insert(parse_health(h.get<std::string>()));
    return out;
}

}  // namespace

json to_json(const AnalysisConfig& c) {
    json j;
    j["termination_c"] = c.termination_c;
    j["include_terminal"] = c.include_terminal;
    j["group"] = c.group == GroupKey::Device ? "device" : "model";
    j["model_consensus"] = c.model_consensus;
    j["min_support"] = c.min_support;

    json filter = json::object();
    if (c.filter.charger) filter["charger"] = to_string(*c.filter.charger);
    if (c.filter.screen) filter["screen"] = to_string(*c.filter.screen);
    if (c.filter.health) {
        auto hs = json::array();
        for (auto h : *c.filter.health) hs.push_back(to_string(h));
        filter["health"] = hs;
    }
    if (c.filter.model) filter["model"] = *c.filter.model;
    j["filter"] = filter;

    const auto& b = c.classifier.bands;
    j["bands"] = {{"cccv_center_mv", b.cccv_center_mv},
                  {"dlc_center_mv", b.dlc_center_mv},
                  {"half_width_mv", b.half_width_mv},
                  {"quick_threshold_mv", b.quick_threshold_mv}};
    const auto& p = c.classifier.pulse;
    j["pulse"] = {{"min_reversals", p.min_reversals},
                  {"min_amplitude_mv", p.min_amplitude_mv},
                  {"soc_low", p.soc_low},
                  {"soc_high", p.soc_high},
                  {"min_levels", p.min_levels}};
    const auto& v = c.classifier.variants;
    j["variants"] = {{"cv_first_high", v.cv_first_high},       {"cv_first_max_rate", v.cv_first_max_rate},
                     {"reference_low", v.reference_low},       {"reference_high", v.reference_high},
                     {"reference_min_rate", v.reference_min_rate}, {"tail_low", v.tail_low},
                     {"tail_ratio", v.tail_ratio},             {"tail_min_rate", v.tail_min_rate},
                     {"cc_low", v.cc_low},                     {"cc_high", v.cc_high},
                     {"fast_rate_c", v.fast_rate_c},           {"fast_share", v.fast_share}};
    const auto& f = c.classifier.fuel_gauge;
    j["fuel_gauge"] = {{"cv_threshold", f.cv_threshold},
                       {"soc_low", f.soc_low},
                       {"soc_high", f.soc_high},
                       {"min_levels", f.min_levels}};
    j["behavior"] = {{"maintenance_pct_per_cycle", c.behavior.maintenance_pct_per_cycle},
                     {"capacity_mah", optional_json(c.behavior.capacity_mah)}};
    j["tail_quantile"] = c.tail_quantile;
    return j;
}

void apply_json(AnalysisConfig& c, const json& j) {
    if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
    auto take = [](const json& obj, const char* key, auto& field) {
        if (obj.contains(key) && !obj.at(key).is_null()) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    take(j, "termination_c", c.termination_c);
    take(j, "include_terminal", c.include_terminal);
    take(j, "model_consensus", c.model_consensus);
    take(j, "min_support", c.min_support);
    take(j, "tail_quantile", c.tail_quantile);
    if (j.contains("group")) {
        const auto g = j.at("group").get<std::string>();
        if (g != "device" && g != "model") throw std::invalid_argument("group must be 'device' or 'model'");
        c.group = g == "device" ? GroupKey::Device : GroupKey::Model;
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        if (f.contains("charger")) {
            const auto ch = parse_charger(f.at("charger").get<std::string>());
            if (!ch) throw std::invalid_argument("unknown charger in filter");
            c.filter.charger = *ch;
        }
        if (f.contains("screen")) {
            const auto sc = parse_screen(f.at("screen").get<std::string>());
            if (!sc) throw std::invalid_argument("unknown screen in filter");
            c.filter.screen = *sc;
        }
        if (f.contains("health")) c.filter.health = parse_health_set(f.at("health"));
        if (f.contains("model")) c.filter.model = f.at("model").get<std::string>();
    }
    if (j.contains("bands")) {
        const auto& b = j.at("bands");
        take(b, "cccv_center_mv", c.classifier.bands.cccv_center_mv);
        take(b, "dlc_center_mv", c.classifier.bands.dlc_center_mv);
        take(b, "half_width_mv", c.classifier.bands.half_width_mv);
        take(b, "quick_threshold_mv", c.classifier.bands.quick_threshold_mv);
        if (!c.classifier.bands.valid()) throw std::invalid_argument("technique bands overlap");
    }
    if (j.contains("pulse")) {
        const auto& p = j.at("pulse");
        take(p, "min_reversals", c.classifier.pulse.min_reversals);
        take(p, "min_amplitude_mv", c.classifier.pulse.min_amplitude_mv);
        take(p, "soc_low", c.classifier.pulse.soc_low);
        take(p, "soc_high", c.classifier.pulse.soc_high);
        take(p, "min_levels", c.classifier.pulse.min_levels);
    }
    if (j.contains("variants")) {
        const auto& v = j.at("variants");
        auto& cv = c.classifier.variants;
        take(v, "cv_first_high", cv.cv_first_high);
        take(v, "cv_first_max_rate", cv.cv_first_max_rate);
        take(v, "reference_low", cv.reference_low);
        take(v, "reference_high", cv.reference_high);
        take(v, "reference_min_rate", cv.reference_min_rate);
        take(v, "tail_low", cv.tail_low);
        take(v, "tail_ratio", cv.tail_ratio);
        take(v, "tail_min_rate", cv.tail_min_rate);
        take(v, "cc_low", cv.cc_low);
        take(v, "cc_high", cv.cc_high);
        take(v, "fast_rate_c", cv.fast_rate_c);
        take(v, "fast_share", cv.fast_share);
    }
    if (j.contains("fuel_gauge")) {
        const auto& f = j.at("fuel_gauge");
        take(f, "cv_threshold", c.classifier.fuel_gauge.cv_threshold);
        take(f, "soc_low", c.classifier.fuel_gauge.soc_low);
        take(f, "soc_high", c.classifier.fuel_gauge.soc_high);
        take(f, "min_levels", c.classifier.fuel_gauge.min_levels);
    }
    if (j.contains("behavior")) {
        const auto& b = j.at("behavior");
        take(b, "maintenance_pct_per_cycle", c.behavior.maintenance_pct_per_cycle);
        if (b.contains("capacity_mah") && !b.at("capacity_mah").is_null())
            c.behavior.capacity_mah = b.at("capacity_mah").get<double>();
    }
    if (!(c.termination_c > 0.0)) throw std::invalid_argument("termination rate must be positive");
    c.behavior.termination_c = c.termination_c;
}

std::vector<ChargingEvent> user_events(std::span<const BatterySample> samples, const AnalysisConfig& config) {
    if (config.filter.empty()) return segment_events(pair_consecutive(samples), config.termination_c);
    std::vector<BatterySample> kept;
    kept.reserve(samples.size());
    for (const auto& s : samples)
        if (config.filter.matches(s)) kept.push_back(s);
    return segment_events(pair_consecutive(kept), config.termination_c);
}

void finalize_capacity_loss(DeviceProfile& profile, const TechniqueBands& bands) {
    profile.nominal_final_voltage = nominal_final_voltage(profile.technique, bands);
    profile.capacity_loss_pct.reset();
    if (!profile.nominal_final_voltage) {
        profile.capacity_loss_reason = "no nominal final voltage for technique " + std::string(to_string(profile.technique));
    } else if (profile.final_voltages.empty()) {
        profile.capacity_loss_reason = "no event reached 100%";
    } else {
        profile.capacity_loss_pct = capacity_loss(profile.final_voltages, *profile.nominal_final_voltage);
        profile.capacity_loss_reason.clear();
    }
}

GroupAnalysis analyze_group(const std::string& group_id, const std::string& model,
                            std::span<const ChargingEvent> events, const AnalysisConfig& config) {
    GroupAnalysis out;
    auto& p = out.profile;
    p.user_id = group_id;
    p.model = model;

    out.voltage = voltage_curve(events);
    out.charge_time = charge_time_curve(events, config.include_terminal);
    out.temperature = temperature_curve(events);

    TechniqueInputs inputs;
    for (const auto& ev : events) {
        if (ev.rate_steps(true).empty()) continue;
        ++p.event_count;
        const auto ep = event_endpoints(ev);
        if (ep.soc_max >= 95) inputs.final_voltages_mv.push_back(ep.final_voltage_mv);
        if (ep.final_voltage_candidate) p.final_voltages.push_back(*ep.final_voltage_candidate);
    }
    inputs.voltage_curve = out.voltage;

    const auto tech = classify_technique(inputs, config.classifier);
    p.technique = p.device_technique = tech.technique;
    p.technique_reason = tech.reason;
    p.band_voltage_mean = tech.mean_final_voltage;
    p.peak_voltage = tech.peak_voltage;
    p.pulse_reversals = tech.pulse.reversals;

    p.variants = detect_variants(events, config.classifier.variants).variants;

    const auto fg = infer_fuel_gauge(out.charge_time, config.classifier.fuel_gauge);
    p.fuel_gauge = fg.fuel_gauge;
    p.fuel_gauge_reason = fg.reason;
    p.fuel_gauge_dispersion = fg.dispersion;

    if (const auto v1 = out.voltage.at(1)) p.initial_voltage = static_cast<int>(std::lround(*v1));
    if (!p.final_voltages.empty()) {
        p.final_voltage_mean = std::accumulate(p.final_voltages.begin(), p.final_voltages.end(), 0.0) /
                               static_cast<double>(p.final_voltages.size());
    }
    finalize_capacity_loss(p, config.classifier.bands);
    return out;
}

void apply_model_consensus(std::vector<DeviceProfile>& profiles, const ClassifierConfig& config) {
    std::map<std::string, std::vector<Technique>> labels;
    for (const auto& p : profiles) labels[p.model].push_back(p.device_technique);
    std::map<std::string, std::optional<Technique>> consensus;
    for (const auto& [model, ls] : labels) consensus[model] = model_consensus(ls);

    for (auto& p : profiles) {
        if (p.device_technique == Technique::Quick || p.device_technique == Technique::FastPulse) continue;
        const auto& c = consensus[p.model];
        if (!c || *c == p.technique) continue;
        p.technique = *c;
        p.technique_source = "model";
        p.technique_reason = "model majority band (" + std::string(to_string(p.device_technique)) + " on its own)";
        finalize_capacity_loss(p, config.bands);
    }
}

json to_json(const DeviceProfile& p) {
    json j;
    j["user"] = p.user_id;
    j["model"] = p.model;
    j["technique"] = to_string(p.technique);
    j["technique_source"] = p.technique_source;
    j["device_technique"] = to_string(p.device_technique);
    j["technique_reason"] = p.technique_reason;
    auto variants = json::array();
    for (auto v : p.variants) variants.push_back(to_string(v));
    j["variants"] = variants;
    j["fuel_gauge"] = to_string(p.fuel_gauge);
    j["fuel_gauge_dispersion"] = p.fuel_gauge_dispersion;
    if (!p.fuel_gauge_reason.empty()) j["fuel_gauge_reason"] = p.fuel_gauge_reason;
    j["initial_voltage"] = optional_json(p.initial_voltage);
    j["final_voltage_mean"] = optional_json(p.final_voltage_mean);
    j["final_voltages"] = p.final_voltages;
    j["band_voltage_mean"] = optional_json(p.band_voltage_mean);
    j["peak_voltage"] = optional_json(p.peak_voltage);
    j["pulse_reversals"] = p.pulse_reversals;
    j["nominal_final_voltage"] = optional_json(p.nominal_final_voltage);
    j["capacity_loss_pct"] = optional_json(p.capacity_loss_pct);
    if (!p.capacity_loss_reason.empty()) j["capacity_loss_reason"] = p.capacity_loss_reason;
    j["event_count"] = p.event_count;
    return j;
}

json to_json(const BehaviorReport& r) {
    json j;
    j["user"] = r.user_id;
    j["model"] = r.model;
    auto fl = json::array();
    for (const auto& e : r.fluctuation_episodes) {
        fl.push_back({{"event_id", e.event_id},
                      {"soc_low", e.soc_low},
                      {"soc_high", e.soc_high},
                      {"repetitions", e.repetitions},
                      {"start_time", e.start_time},
                      {"total_duration_s", e.total_duration_s},
                      {"active_use", e.active_use}});
    }
    j["fluctuation_episodes"] = fl;
    auto fp = json::array();
    int cycles = 0;
    for (const auto& e : r.full_plugged_episodes) {
        cycles += e.maintenance_cycles;
        fp.push_back({{"start_time", e.start_time},
                      {"duration_s", e.duration_s},
                      {"maintenance_cycles", e.maintenance_cycles},
                      {"wasted_energy_mah", optional_json(e.wasted_energy_mah)}});
    }
    j["full_plugged_episodes"] = fp;
    j["wasted_energy_estimate"] = optional_json(r.wasted_energy_estimate);
    j["totals"] = {{"fluctuation_episodes", r.fluctuation_episodes.size()},
                   {"full_plugged_episodes", r.full_plugged_episodes.size()},
                   {"maintenance_cycles", cycles}};
    return j;
}

json to_json(const HealthSummary& summary) {
    json j = json::object();
    for (const auto& [health, range] : summary) {
        j[std::string(to_string(health))] = {{"voltage_min", range.voltage_min}, {"voltage_max", range.voltage_max},
                                             {"temp_min", range.temp_min},       {"temp_max", range.temp_max},
                                             {"count", range.count}};
    }
    return j;
}

}  // namespace battlytics
