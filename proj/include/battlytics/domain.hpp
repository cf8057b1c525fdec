#pragma once

// Core value types shared by every analysis stage. All types are plain values:
// once built they are never mutated, so they can be shared across worker threads.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace battlytics {

enum class Health { Good, Overheat, OverVoltage, Other };
enum class Charger { AC, USB, Unplugged };
enum class Screen { On, Off };

// Plausibility bounds applied at ingestion.
inline constexpr int kMinVoltageMv = 2000;
inline constexpr int kMaxVoltageMv = 5000;
inline constexpr double kMinTemperatureC = -30.0;
inline constexpr double kMaxTemperatureC = 100.0;

std::string_view to_string(Health h);
std::string_view to_string(Charger c);
std::string_view to_string(Screen s);

// Unrecognized health strings map to Health::Other.
Health parse_health(std::string_view text);
std::optional<Charger> parse_charger(std::string_view text);
std::optional<Screen> parse_screen(std::string_view text);

/// One SOC-update event reported by a device.
struct BatterySample {
    double timestamp = 0.0;  // epoch seconds
    std::string user_id;
    std::string model;
    int soc = 0;  // percent, 0..100
    int voltage_mv = 0;
    double temperature_c = 0.0;
    Health health = Health::Good;
    Charger charger = Charger::AC;
    bool charging = true;
    Screen screen = Screen::Off;

    bool operator==(const BatterySample&) const = default;
};

/// Returns an empty string when the sample is plausible, otherwise the reason it is not.
std::string validate(const BatterySample& s);

/// A pair of consecutive samples and the charging rate between them.
struct ChargeStep {
    BatterySample first;
    BatterySample second;
    int delta_soc = 0;
    double delta_t = 0.0;  // seconds, always > 0
    double c_rate = 0.0;   // 0 whenever delta_soc <= 0

    bool is_charging() const { return delta_soc > 0; }
    bool operator==(const ChargeStep&) const = default;
};

struct ChargingEvent {
    int event_id = 0;
    std::string user_id;
    std::string model;
    std::vector<ChargeStep> steps;
    double start_time = 0.0;
    double end_time = 0.0;
    // True when the last step is the one whose rate fell to the termination threshold.
    bool closed = false;

    /// Steps that are neither the closing step nor non-charging.
    std::vector<const ChargeStep*> rate_steps(bool include_terminal = false) const;
    /// The samples labeled with this event id: the opening sample, then every
    /// sample reached by a non-closing step.
    std::vector<const BatterySample*> samples() const;
};

enum class CurveKind { Voltage, ChargeTime, Temperature };
std::string_view to_string(CurveKind k);

struct CurvePoint {
    double value = 0.0;
    std::size_t count = 0;

    bool low_confidence(std::size_t min_support = 3) const { return count < min_support; }
    bool operator==(const CurvePoint&) const = default;
};

/// Per-SOC-level aggregate. At most one point per level in 0..100.
struct SocCurve {
    CurveKind kind = CurveKind::Voltage;
    std::map<int, CurvePoint> points;

    std::optional<double> at(int soc) const;
    bool operator==(const SocCurve&) const = default;
};

enum class Technique { CcCv, Dlc, Quick, FastPulse, Unknown };
enum class Variant { CvFirst, CcTail, FastRate };
enum class FuelGauge { CoulombCounter, VoltageBased, Inconclusive };

std::string_view to_string(Technique t);
std::string_view to_string(Variant v);
std::string_view to_string(FuelGauge f);
std::optional<Technique> parse_technique(std::string_view text);
std::optional<Variant> parse_variant(std::string_view text);
std::optional<FuelGauge> parse_fuel_gauge(std::string_view text);

struct DeviceProfile {
    std::string user_id;  // group key when profiling per model
    std::string model;
    Technique technique = Technique::Unknown;
    std::string technique_reason;
    // "device" when the final-voltage band of this device decided, "model" when
    // the per-model consensus supplied the band.
    std::string technique_source = "device";
    Technique device_technique = Technique::Unknown;
    std::set<Variant> variants;
    FuelGauge fuel_gauge = FuelGauge::Inconclusive;
    std::string fuel_gauge_reason;
    double fuel_gauge_dispersion = 0.0;
    std::optional<int> initial_voltage;        // mV at soc 1
    std::optional<double> final_voltage_mean;  // V_rf, mean of voltages at soc 100
    std::vector<int> final_voltages;
    std::optional<int> nominal_final_voltage;  // V_f
    std::optional<double> capacity_loss_pct;
    std::string capacity_loss_reason;
    std::optional<double> band_voltage_mean;  // mean final voltage of events reaching >= 95
    std::optional<int> peak_voltage;
    int pulse_reversals = 0;
    int event_count = 0;
};

struct FluctuationEpisode {
    int event_id = 0;
    int soc_low = 0;
    int soc_high = 0;
    int repetitions = 0;  // direction reversals
    double start_time = 0.0;
    double end_time = 0.0;
    double total_duration_s = 0.0;
    bool active_use = false;  // any sample in the run had the screen on
};

struct FullPluggedEpisode {
    double start_time = 0.0;
    double duration_s = 0.0;
    int maintenance_cycles = 0;
    std::optional<double> wasted_energy_mah;
};

struct BehaviorReport {
    std::string user_id;
    std::string model;
    std::vector<FluctuationEpisode> fluctuation_episodes;
    std::vector<FullPluggedEpisode> full_plugged_episodes;
    std::optional<double> wasted_energy_estimate;  // mAh, needs a nominal capacity

    bool empty() const { return fluctuation_episodes.empty() && full_plugged_episodes.empty(); }
};

}  // namespace battlytics
