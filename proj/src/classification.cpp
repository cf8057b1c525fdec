#include "battlytics/classification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "battlytics/stats.hpp"

namespace battlytics {

PulseResult detect_pulse(const SocCurve& voltage_curve, const PulseConfig& config) {
    std::vector<double> window;
    for (const auto& [soc, point] : voltage_curve.points) {
        if (soc >= config.soc_low && soc <= config.soc_high) window.push_back(point.value);
    }
    PulseResult result;
    if (static_cast<int>(window.size()) < config.min_levels) {
        result.reason = "only " + std::to_string(window.size()) + " levels in [" + std::to_string(config.soc_low) +
                        ", " + std::to_string(config.soc_high) + "]";
        return result;
    }
    int last_sign = 0;
    for (std::size_t i = 1; i < window.size(); ++i) {
        const double d = window[i] - window[i - 1];
        if (std::abs(d) < config.min_amplitude_mv) continue;
        const int sign = d > 0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++result.reversals;
        last_sign = sign;
    }
    result.detected = result.reversals >= config.min_reversals;
    return result;
}

Technique band_technique(double mean_final_voltage, const TechniqueBands& bands) {
    if (mean_final_voltage >= bands.cccv_low() && mean_final_voltage <= bands.cccv_high()) return Technique::CcCv;
    if (mean_final_voltage >= bands.dlc_low() && mean_final_voltage <= bands.dlc_high()) return Technique::Dlc;
    return Technique::Unknown;
}

TechniqueResult classify_technique(const TechniqueInputs& inputs, const ClassifierConfig& config) {
    TechniqueResult result;
    if (!inputs.voltage_curve.points.empty()) {
        double peak = inputs.voltage_curve.points.begin()->second.value;
        for (const auto& [soc, p] : inputs.voltage_curve.points) peak = std::max(peak, p.value);
        result.peak_voltage = static_cast<int>(std::lround(peak));
    }
    if (inputs.final_voltages_mv.empty()) {
        result.reason = "no event reached 95%";
        return result;
    }
    const double sum = std::accumulate(inputs.final_voltages_mv.begin(), inputs.final_voltages_mv.end(), 0.0);
    const double mean = sum / static_cast<double>(inputs.final_voltages_mv.size());
    result.mean_final_voltage = mean;

    result.pulse = detect_pulse(inputs.voltage_curve, config.pulse);
    if (result.pulse.detected) {
        result.technique = Technique::FastPulse;
        result.reason = std::to_string(result.pulse.reversals) + " voltage reversals";
        return result;
    }
    if (result.peak_voltage && *result.peak_voltage > config.bands.quick_threshold_mv) {
        result.technique = Technique::Quick;
        result.reason = "peak voltage " + std::to_string(*result.peak_voltage) + " mV";
        return result;
    }
    result.technique = band_technique(mean, config.bands);
    result.reason = result.technique == Technique::Unknown ? "mean final voltage outside both bands"
                                                           : "mean final voltage in band";
    return result;
}

namespace {

using LevelValues = std::array<std::vector<double>, 101>;

LevelValues rates_by_level(std::span<const ChargingEvent> events) {
    LevelValues levels;
    for (const auto& ev : events) {
        for (const auto* step : ev.rate_steps()) {
            for (int lvl = std::max(step->first.soc + 1, 0); lvl <= std::min(step->second.soc, 100); ++lvl)
                levels[static_cast<std::size_t>(lvl)].push_back(step->c_rate);
        }
    }
    return levels;
}

std::optional<double> window_median(const LevelValues& levels, int lo, int hi) {
    std::vector<double> pooled;
    for (int lvl = std::max(lo, 0); lvl <= std::min(hi, 100); ++lvl) {
        const auto& v = levels[static_cast<std::size_t>(lvl)];
        pooled.insert(pooled.end(), v.begin(), v.end());
    }
    if (pooled.empty()) return std::nullopt;
    return stats::median(std::move(pooled));
}

}  // namespace

VariantResult detect_variants(std::span<const ChargingEvent> events, const VariantConfig& config) {
    VariantResult result;
    const auto levels = rates_by_level(events);
    const auto reference = window_median(levels, config.reference_low, config.reference_high);

    const auto low = window_median(levels, 1, config.cv_first_high);
    if (low && reference) {
        result.cv_first_evaluable = true;
        if (*low < config.cv_first_max_rate && *reference >= config.reference_min_rate)
            result.variants.insert(Variant::CvFirst);
    }

    const auto tail = window_median(levels, config.tail_low + 1, 100);
    if (tail && reference) {
        result.cc_tail_evaluable = true;
        if (*tail >= config.tail_ratio * *reference && *tail >= config.tail_min_rate)
            result.variants.insert(Variant::CcTail);
    }

    std::size_t cc_steps = 0;
    std::size_t fast_steps = 0;
    for (const auto& ev : events) {
        for (const auto* step : ev.rate_steps()) {
            if (step->second.soc < config.cc_low || step->second.soc > config.cc_high) continue;
            ++cc_steps;
            if (step->c_rate > config.fast_rate_c) ++fast_steps;
        }
    }
    if (cc_steps > 0) {
        result.fast_rate_evaluable = true;
        if (static_cast<double>(fast_steps) >= config.fast_share * static_cast<double>(cc_steps))
            result.variants.insert(Variant::FastRate);
    }
    return result;
}

FuelGaugeResult infer_fuel_gauge(const SocCurve& charge_time_curve, const FuelGaugeConfig& config) {
    FuelGaugeResult result;
    std::vector<double> times;
    for (const auto& [soc, p] : charge_time_curve.points) {
        if (soc >= config.soc_low && soc <= config.soc_high && p.value > 0.0) times.push_back(p.value);
    }
    result.levels = static_cast<int>(times.size());
    if (result.levels < config.min_levels) {
        result.reason = "only " + std::to_string(result.levels) + " covered levels in [" +
                        std::to_string(config.soc_low) + ", " + std::to_string(config.soc_high) + "]";
        return result;
    }
    result.dispersion = stats::relative_iqr(std::move(times));
    if (result.dispersion <= config.cv_threshold) {
        result.fuel_gauge = FuelGauge::CoulombCounter;
    } else if (result.dispersion > 2.0 * config.cv_threshold) {
        result.fuel_gauge = FuelGauge::VoltageBased;
    } else {
        result.reason = "dispersion between thresholds";
    }
    return result;
}

double capacity_loss(std::span<const int> final_voltages_mv, int nominal_mv) {
    if (final_voltages_mv.empty()) throw std::invalid_argument("no final voltages");
    if (nominal_mv <= 0) throw std::invalid_argument("nominal final voltage must be positive");
    const double sum = std::accumulate(final_voltages_mv.begin(), final_voltages_mv.end(), 0.0);
    const double mean = sum / static_cast<double>(final_voltages_mv.size());
    return std::max(0.0, (nominal_mv - mean) / 10.0);
}

std::optional<int> nominal_final_voltage(Technique technique, const TechniqueBands& bands) {
    if (technique == Technique::CcCv) return bands.cccv_center_mv;
    if (technique == Technique::Dlc) return bands.dlc_center_mv;
    return std::nullopt;
}

std::optional<Technique> model_consensus(std::span<const Technique> device_labels) {
    const auto cccv = std::count(device_labels.begin(), device_labels.end(), Technique::CcCv);
    const auto dlc = std::count(device_labels.begin(), device_labels.end(), Technique::Dlc);
    if (cccv > dlc) return Technique::CcCv;
    if (dlc > cccv) return Technique::Dlc;
    return std::nullopt;
}

void HealthRange::add(const BatterySample& s) {
    if (count == 0) {
        voltage_min = voltage_max = s.voltage_mv;
        temp_min = temp_max = s.temperature_c;
    } else {
        voltage_min = std::min(voltage_min, s.voltage_mv);
        voltage_max = std::max(voltage_max, s.voltage_mv);
        temp_min = std::min(temp_min, s.temperature_c);
        temp_max = std::max(temp_max, s.temperature_c);
    }
    ++count;
}

HealthSummary health_summary(std::span<const BatterySample> samples) {
    HealthSummary summary;
    for (const auto& s : samples) summary[s.health].add(s);
    return summary;
}

}  // namespace battlytics
