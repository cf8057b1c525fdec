#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "battlytics/domain.hpp"

namespace battlytics {

/// Final-voltage bands separating standard CC-CV from double-loop control, and
/// the peak voltage above which a device is using a high-voltage quick charger.
struct TechniqueBands {
    int cccv_center_mv = 4200;
    int dlc_center_mv = 4350;
    int half_width_mv = 50;
    int quick_threshold_mv = 4400;  // exclusive

    int cccv_low() const { return cccv_center_mv - half_width_mv; }
    int cccv_high() const { return cccv_center_mv + half_width_mv; }
    int dlc_low() const { return dlc_center_mv - half_width_mv; }
    int dlc_high() const { return dlc_center_mv + half_width_mv; }
    /// Bands disjoint and the quick threshold not below the DLC upper edge.
    bool valid() const { return cccv_high() < dlc_low() && quick_threshold_mv >= dlc_high() && half_width_mv >= 0; }
};

struct PulseConfig {
    int min_reversals = 4;
    int min_amplitude_mv = 40;
    int soc_low = 30;
    int soc_high = 95;
    int min_levels = 10;
};

struct VariantConfig {
    int cv_first_high = 10;       // window [1, cv_first_high]
    double cv_first_max_rate = 0.1;
    int reference_low = 20;       // CC reference window [reference_low, reference_high]
    int reference_high = 50;
    double reference_min_rate = 0.3;
    int tail_low = 95;            // window (tail_low, 100]
    double tail_ratio = 0.7;
    double tail_min_rate = 0.3;
    int cc_low = 10;              // CC-phase window used for the fast-rate share
    int cc_high = 50;
    double fast_rate_c = 1.0;
    double fast_share = 0.05;
};

struct FuelGaugeConfig {
    double cv_threshold = 0.10;  // relative IQR; VoltageBased above twice this
    int soc_low = 10;
    int soc_high = 50;
    int min_levels = 20;
};

struct ClassifierConfig {
    TechniqueBands bands;
    PulseConfig pulse;
    VariantConfig variants;
    FuelGaugeConfig fuel_gauge;
};

struct PulseResult {
    bool detected = false;
    int reversals = 0;
    std::string reason;
};

/// Counts sign changes among the successive differences of the curve inside
/// [soc_low, soc_high] whose magnitude reaches min_amplitude_mv.
PulseResult detect_pulse(const SocCurve& voltage_curve, const PulseConfig& config = {});

struct TechniqueInputs {
    std::vector<int> final_voltages_mv;  // voltage at the top of every event reaching >= 95 %
    SocCurve voltage_curve;
};

struct TechniqueResult {
    Technique technique = Technique::Unknown;
    std::string reason;
    std::optional<double> mean_final_voltage;
    std::optional<int> peak_voltage;
    PulseResult pulse;
};

TechniqueResult classify_technique(const TechniqueInputs& inputs, const ClassifierConfig& config = {});

/// Technique implied by the final-voltage band alone.
Technique band_technique(double mean_final_voltage, const TechniqueBands& bands = {});

struct VariantResult {
    std::set<Variant> variants;
    bool cv_first_evaluable = false;
    bool cc_tail_evaluable = false;
    bool fast_rate_evaluable = false;
};

VariantResult detect_variants(std::span<const ChargingEvent> events, const VariantConfig& config = {});

struct FuelGaugeResult {
    FuelGauge fuel_gauge = FuelGauge::Inconclusive;
    double dispersion = 0.0;
    int levels = 0;
    std::string reason;
};

FuelGaugeResult infer_fuel_gauge(const SocCurve& charge_time_curve, const FuelGaugeConfig& config = {});

/// Every 10 mV below the nominal final voltage is one percent of lost capacity.
/// Throws std::invalid_argument on an empty list or non-positive nominal.
double capacity_loss(std::span<const int> final_voltages_mv, int nominal_mv);

/// Nominal final voltage for the two standard techniques; none otherwise.
std::optional<int> nominal_final_voltage(Technique technique, const TechniqueBands& bands = {});

/// Majority band label among devices of one model. Quick, FastPulse and Unknown
/// labels do not vote; a tie gives no consensus.
std::optional<Technique> model_consensus(std::span<const Technique> device_labels);

struct HealthRange {
    int voltage_min = 0;
    int voltage_max = 0;
    double temp_min = 0.0;
    double temp_max = 0.0;
    std::size_t count = 0;

    void add(const BatterySample& s);
    bool operator==(const HealthRange&) const = default;
};

using HealthSummary = std::map<Health, HealthRange>;

HealthSummary health_summary(std::span<const BatterySample> samples);

}  // namespace battlytics
